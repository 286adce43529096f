#include "pdmp/reach.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <thread>

#include "pdmp/flow.hpp"

namespace pdmp::reach {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

long resolve_max_iters(const ReachOptions& opt) {
  return opt.max_iters > 0 ? opt.max_iters : 10L * opt.resolution;
}

double resolve_tau(const SwitchingSystem& sys, const ReachGrid& grid, const ReachOptions& opt) {
  double min_cell = kInf;
  for (int k = 0; k < grid.box.dimension(); ++k)
    min_cell = std::min(min_cell, grid.cell_width(k));
  if (!(sys.speed_bound() > 0.0)) return opt.tau > 0.0 ? opt.tau : 1.0;
  double tau = opt.tau > 0.0 ? opt.tau : 0.5 * min_cell / sys.speed_bound();

  double diag2 = 0.0;
  for (int k = 0; k < grid.box.dimension(); ++k) {
    const double w = grid.cell_width(k);
    diag2 += w * w;
  }
  if (tau * sys.speed_bound() >= 2.0 * min_cell)
    throw ResolutionTooCoarse("tau * C_sp >= 2 cells; refine the grid or shrink tau");
  if (!(tau * sys.speed_bound() < std::sqrt(diag2)))
    throw ResolutionTooCoarse("tau * C_sp must stay below one cell diagonal");
  return tau;
}

}  // namespace

std::size_t ReachGrid::cell_count() const {
  std::size_t n = 1;
  for (int k = 0; k < box.dimension(); ++k) n *= static_cast<std::size_t>(resolution);
  return n;
}

double ReachGrid::cell_width(int axis) const { return box.extent(axis) / resolution; }

std::size_t ReachGrid::cell_of(std::span<const double> x) const {
  std::size_t cell = 0;
  for (int k = 0; k < box.dimension(); ++k) {
    auto ku = static_cast<std::size_t>(k);
    double rel = (x[ku] - box.lo[ku]) / box.extent(k);
    long b = static_cast<long>(rel * resolution);
    b = std::clamp<long>(b, 0, resolution - 1);
    cell = cell * static_cast<std::size_t>(resolution) + static_cast<std::size_t>(b);
  }
  return cell;
}

Point ReachGrid::center_of(std::size_t cell) const {
  const int d = box.dimension();
  Point p(static_cast<std::size_t>(d));
  for (int k = d - 1; k >= 0; --k) {
    auto ku = static_cast<std::size_t>(k);
    const std::size_t b = cell % static_cast<std::size_t>(resolution);
    cell /= static_cast<std::size_t>(resolution);
    p[ku] = box.lo[ku] + (static_cast<double>(b) + 0.5) * cell_width(k);
  }
  return p;
}

std::size_t ReachGrid::occupied_count() const {
  std::size_t n = 0;
  for (auto v : occupied) n += v;
  return n;
}

ReachGrid ReachGrid::dilated(int cells) const {
  ReachGrid out = *this;
  const int d = box.dimension();
  const auto res = static_cast<long>(resolution);

  std::vector<long> strides(static_cast<std::size_t>(d));
  long s = 1;
  for (int k = d - 1; k >= 0; --k) {
    strides[static_cast<std::size_t>(k)] = s;
    s *= res;
  }

  std::vector<long> coord(static_cast<std::size_t>(d));
  for (std::size_t cell = 0; cell < occupied.size(); ++cell) {
    if (!occupied[cell]) continue;
    long rem = static_cast<long>(cell);
    for (int k = 0; k < d; ++k) {
      coord[static_cast<std::size_t>(k)] = rem / strides[static_cast<std::size_t>(k)];
      rem %= strides[static_cast<std::size_t>(k)];
    }
    // Chebyshev neighborhood, respecting wrap flags.
    std::vector<long> off(static_cast<std::size_t>(d), -cells);
    for (;;) {
      long idx = 0;
      bool ok = true;
      for (int k = 0; k < d; ++k) {
        auto ku = static_cast<std::size_t>(k);
        long c = coord[ku] + off[ku];
        if (box.wraps(k)) {
          c = ((c % res) + res) % res;
        } else if (c < 0 || c >= res) {
          ok = false;
          break;
        }
        idx += c * strides[ku];
      }
      if (ok) {
        auto iu = static_cast<std::size_t>(idx);
        if (!out.occupied[iu]) {
          out.occupied[iu] = 1;
          out.arrival[iu] = arrival[cell];
        }
      }
      int k = 0;
      for (; k < d; ++k) {
        auto ku = static_cast<std::size_t>(k);
        if (++off[ku] <= cells) break;
        off[ku] = -cells;
      }
      if (k == d) break;
    }
  }
  return out;
}

ReachGrid reachable_multi(const SwitchingSystem& sys, const std::vector<Point>& starts,
                          const ReachOptions& opt) {
  if (starts.empty()) throw DomainError("reachable needs at least one start point");
  if (sys.dimension() >= 4)
    throw ResolutionTooCoarse("grid reachability rejected for dimension >= 4");
  if (opt.resolution < 2) throw ResolutionTooCoarse("need at least 2 cells per axis");

  ReachGrid grid;
  grid.box = sys.box();
  grid.resolution = opt.resolution;
  grid.occupied.assign(grid.cell_count(), 0);
  grid.arrival.assign(grid.cell_count(), kInf);
  grid.starts = starts;
  grid.tau = resolve_tau(sys, grid, opt);

  const long max_rounds = resolve_max_iters(opt);
  flow::Stepper stepper(sys);

  std::vector<std::size_t> frontier;
  for (const auto& s : starts) {
    if (!grid.box.contains(s, 1e-9))
      throw DomainError("start point outside the box");
    const std::size_t c = grid.cell_of(s);
    if (!grid.occupied[c]) {
      grid.occupied[c] = 1;
      grid.arrival[c] = 0.0;
      frontier.push_back(c);
    }
  }

  std::vector<std::size_t> next;
  Point x(static_cast<std::size_t>(sys.dimension()));
  while (!frontier.empty() && grid.rounds < max_rounds) {
    ++grid.rounds;
    next.clear();
    for (const std::size_t cell : frontier) {
      const Point rep = grid.center_of(cell);
      for (int regime = 0; regime < sys.regimes(); ++regime) {
        x = rep;
        std::size_t cur = cell;
        long last_new = 0, found = 0;
        for (long s = 1; s <= opt.micro_steps; ++s) {
          stepper.step(regime, x, grid.tau);
          // Keep field evaluations on the (assumed invariant) box.
          for (int k = 0; k < sys.dimension(); ++k) {
            if (grid.box.wraps(k)) continue;
            auto ku = static_cast<std::size_t>(k);
            x[ku] = std::clamp(x[ku], grid.box.lo[ku], grid.box.hi[ku]);
          }
          const std::size_t c = grid.cell_of(x);
          if (c != cur) {
            cur = c;
            if (!grid.occupied[c]) {
              grid.occupied[c] = 1;
              grid.arrival[c] = grid.arrival[cell] + static_cast<double>(s) * grid.tau;
              next.push_back(c);
              last_new = s;
              if (++found >= 16) break;
            }
          }
          if (s - last_new >= opt.stall_steps) break;
        }
      }
    }
    frontier.swap(next);
  }
  return grid;
}

ReachGrid reachable(const SwitchingSystem& sys, std::span<const double> x0,
                    const ReachOptions& opt) {
  return reachable_multi(sys, {Point(x0.begin(), x0.end())}, opt);
}

std::vector<Point> halton_sample(const Box& box, int count) {
  static constexpr int primes[] = {2, 3, 5, 7, 11, 13};
  const int d = box.dimension();
  if (d > 6) throw DomainError("halton_sample supports dimension <= 6");
  auto radical_inverse = [](int base, int n) {
    double inv = 1.0 / base, r = 0.0, f = inv;
    while (n > 0) {
      r += f * (n % base);
      n /= base;
      f *= inv;
    }
    return r;
  };
  std::vector<Point> pts;
  pts.reserve(static_cast<std::size_t>(count));
  for (int n = 0; n < count; ++n) {
    Point p(static_cast<std::size_t>(d));
    for (int k = 0; k < d; ++k) {
      auto ku = static_cast<std::size_t>(k);
      // n+1: skip the origin corner of the sequence.
      p[ku] = box.lo[ku] + box.extent(k) * radical_inverse(primes[k], n + 1);
    }
    pts.push_back(std::move(p));
  }
  return pts;
}

ReachGrid accessible_set(const SwitchingSystem& sys, const std::vector<Point>& starts,
                         const ReachOptions& opt) {
  if (starts.empty()) throw DomainError("accessible_set needs start samples");

  int threads = opt.threads;
  if (threads <= 0) {
    unsigned hw = std::thread::hardware_concurrency();
    threads = hw == 0 ? 1 : static_cast<int>(hw);
  }
  threads = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(threads),
                                                   starts.size()));

  std::vector<ReachGrid> grids(starts.size());
  std::atomic<std::size_t> cursor{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t k = cursor.fetch_add(1);
      if (k >= starts.size()) return;
      try {
        grids[k] = reachable(sys, starts[k], opt).dilated(1);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 0; w < threads; ++w) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);

  ReachGrid out = grids.front();
  out.starts = starts;
  for (std::size_t g = 1; g < grids.size(); ++g) {
    for (std::size_t c = 0; c < out.occupied.size(); ++c) {
      if (out.occupied[c] && !grids[g].occupied[c]) {
        out.occupied[c] = 0;
        out.arrival[c] = kInf;
      }
    }
  }
  return out;
}

ReachGrid accessible_set(const SwitchingSystem& sys, int start_samples,
                         const ReachOptions& opt) {
  if (start_samples < 1) throw DomainError("need at least one start sample");
  return accessible_set(sys, halton_sample(sys.box(), start_samples), opt);
}

ReachGrid omega_limit(const SwitchingSystem& sys, std::span<const double> x0,
                      double burn_in_time, const ReachOptions& opt) {
  ReachGrid first = reachable(sys, x0, opt);

  std::vector<Point> seeds;
  double latest = 0.0;
  for (std::size_t c = 0; c < first.occupied.size(); ++c)
    if (first.occupied[c] && first.arrival[c] < kInf)
      latest = std::max(latest, first.arrival[c]);
  const double cutoff = std::min(burn_in_time, latest);
  for (std::size_t c = 0; c < first.occupied.size(); ++c)
    if (first.occupied[c] && first.arrival[c] >= cutoff) seeds.push_back(first.center_of(c));
  if (seeds.empty()) seeds.push_back(Point(x0.begin(), x0.end()));
  return reachable_multi(sys, seeds, opt);
}

}  // namespace pdmp::reach
