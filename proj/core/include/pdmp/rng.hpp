#ifndef PDMP_RNG_HPP
#define PDMP_RNG_HPP

#include <cmath>
#include <cstdint>

namespace pdmp {

// Deterministic, versioned random stream. Algorithm (fixed for
// reproducibility, do not change without bumping the library version):
//   - engine: xoshiro256++ (Blackman & Vigna),
//   - state seeded from the SplitMix64 sequence started at the stream seed,
//   - stream k of a master seed uses seed' = master + k * 0x9E3779B97F4A7C15,
//   - uniform doubles take the top 53 bits: (x >> 11) * 2^-53,
//   - exponentials use inverse CDF -log(1 - u) / rate.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& word : state_) word = splitmix64(sm);
  }

  static Rng stream(std::uint64_t master_seed, std::uint64_t k) {
    return Rng(master_seed + k * 0x9E3779B97F4A7C15ULL);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform on [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Exponential with the given rate, via inverse CDF.
  double exponential(double rate) { return -std::log1p(-uniform()) / rate; }

  static std::uint64_t splitmix64(std::uint64_t& s) {
    std::uint64_t z = (s += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  std::uint64_t state_[4];
};

}  // namespace pdmp

#endif  // PDMP_RNG_HPP
