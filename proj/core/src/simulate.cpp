#include "pdmp/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>

namespace pdmp::sim {

std::size_t HybridPath::jumps_up_to(double t) const {
  std::size_t n = 0;
  for (std::size_t k = 1; k < skeleton.size(); ++k)
    if (skeleton[k].time <= t) ++n;
  return n;
}

StepResult embedded_step(const SwitchingSystem& sys, const State& from, Rng& rng, double h) {
  StepResult res;
  res.interarrival = rng.exponential(sys.lambda_bar());
  auto leg = flow::integrate(sys, from.regime, from.x, res.interarrival, h);
  res.clamp_events = leg.clamp_events;
  res.state.x = std::move(leg.endpoint);

  const auto q = sys.q_matrix(res.state.x);
  const int n = sys.regimes();
  double u = rng.uniform();
  int next = from.regime;
  double acc = 0.0;
  for (int j = 0; j < n; ++j) {
    acc += q[static_cast<std::size_t>(from.regime * n + j)];
    if (u < acc) {
      next = j;
      break;
    }
  }
  res.state.regime = next;
  res.true_switch = next != from.regime;
  return res;
}

HybridPath sample_embedded(const SwitchingSystem& sys, const State& z0, long n_steps,
                           Rng& rng, double h) {
  HybridPath path;
  path.skeleton.reserve(static_cast<std::size_t>(n_steps) + 1);
  path.skeleton.push_back({0.0, 0.0, z0.x, z0.regime, false});
  State cur = z0;
  double t = 0.0;
  for (long n = 0; n < n_steps; ++n) {
    auto step = embedded_step(sys, cur, rng, h);
    t += step.interarrival;
    path.clamp_events += step.clamp_events;
    cur = step.state;
    path.skeleton.push_back({t, step.interarrival, cur.x, cur.regime, step.true_switch});
  }
  path.horizon = t;
  return path;
}

namespace {

// Dense samples within one inter-jump segment [t0, t0+len) of `regime`,
// emitted at grid times k*output_dt. Integration restarts from the segment
// start so the skeleton stays independent of the output grid.
void emit_segment(const SwitchingSystem& sys, const Point& x_start, int regime, double t0,
                  double len, bool opens_with_jump, bool opens_with_switch,
                  const SimOptions& opt, HybridPath& path) {
  path.dense.push_back({t0, x_start, regime, opens_with_jump, opens_with_switch});
  if (len <= 0.0) return;
  const double dt = opt.output_dt;
  long k = static_cast<long>(std::floor(t0 / dt)) + 1;
  Point cur = x_start;
  double cur_t = t0;
  while (static_cast<double>(k) * dt < t0 + len) {
    const double target = static_cast<double>(k) * dt;
    auto leg = flow::integrate(sys, regime, cur, target - cur_t, opt.step);
    cur = std::move(leg.endpoint);
    cur_t = target;
    path.dense.push_back({cur_t, cur, regime, false, false});
    ++k;
  }
}

}  // namespace

HybridPath sample_path(const SwitchingSystem& sys, const State& z0, double horizon,
                       const SimOptions& opt, Rng& rng) {
  if (!(horizon > 0.0)) throw DomainError("horizon must be positive");
  HybridPath path;
  path.horizon = horizon;
  path.skeleton.push_back({0.0, 0.0, z0.x, z0.regime, false});

  State cur = z0;
  double t = 0.0;
  while (t < horizon) {
    auto step = embedded_step(sys, cur, rng, opt.step);
    const double t_next = t + step.interarrival;
    if (opt.record_dense) {
      const bool at_jump = t > 0.0;
      const auto& prev = path.skeleton.back();
      emit_segment(sys, cur.x, cur.regime, t, std::min(t_next, horizon) - t, at_jump,
                   at_jump && prev.true_switch, opt, path);
    }
    if (t_next > horizon) break;
    t = t_next;
    path.clamp_events += step.clamp_events;
    cur = step.state;
    path.skeleton.push_back({t, step.interarrival, cur.x, cur.regime, step.true_switch});
  }

  if (opt.record_dense) {
    // Closing sample at the horizon.
    const auto& last = path.skeleton.back();
    auto leg = flow::integrate(sys, last.regime, last.position, horizon - last.time, opt.step);
    path.dense.push_back({horizon, leg.endpoint, last.regime, false, false});
  }
  return path;
}

void run_ensemble(long n_replicas, std::uint64_t master_seed,
                  const std::function<void(long, Rng&)>& op, int threads) {
  if (n_replicas < 1) throw DomainError("need at least one replica");
  if (threads <= 0) {
    unsigned hw = std::thread::hardware_concurrency();
    threads = hw == 0 ? 1 : static_cast<int>(hw);
  }
  threads = static_cast<int>(std::min<long>(threads, n_replicas));

  if (threads == 1) {
    for (long k = 0; k < n_replicas; ++k) {
      Rng rng = Rng::stream(master_seed, static_cast<std::uint64_t>(k));
      op(k, rng);
    }
    return;
  }

  std::atomic<long> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      long k = next.fetch_add(1);
      if (k >= n_replicas) return;
      try {
        Rng rng = Rng::stream(master_seed, static_cast<std::uint64_t>(k));
        op(k, rng);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int w = 0; w < threads; ++w) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace pdmp::sim
