// Acceptance suite: one line per criterion, nonzero exit when any fails.
// Budgets are generous on purpose; every threshold is pinned in code here or
// in pdmp/verify.hpp.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <vector>

#include "pdmp/verify.hpp"

namespace fs = std::filesystem;
using pdmp::verify::CheckResult;

namespace {

int g_failures = 0;

void report(const std::string& criterion, const std::vector<CheckResult>& checks,
            double seconds) {
  bool pass = true;
  for (const auto& c : checks) pass = pass && c.pass;
  if (!pass) ++g_failures;
  std::printf("%s %s (%.1fs)\n", pass ? "PASS" : "FAIL", criterion.c_str(), seconds);
  for (const auto& c : checks)
    std::printf("     %s %s: %s\n", c.pass ? "ok  " : "FAIL", c.name.c_str(),
                c.detail.c_str());
  std::fflush(stdout);
}

template <class Fn>
void criterion(const std::string& name, Fn&& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<CheckResult> checks;
  try {
    checks = fn();
  } catch (const std::exception& e) {
    CheckResult err;
    err.name = "exception";
    err.pass = false;
    err.detail = e.what();
    checks.push_back(err);
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  report(name, checks, seconds);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Criterion 10: identical config + seed => byte-identical outputs, at the
// level of the installed CLI.
std::vector<CheckResult> determinism_checks() {
  std::vector<CheckResult> out;
  const fs::path dir = fs::temp_directory_path() / "pdmp_acceptance_det";
  fs::remove_all(dir);
  fs::create_directories(dir);

  {
    std::ofstream cfg(dir / "sim.ini");
    cfg << "[model]\nexample = interval_beta\nlambda = 2.0\n\n"
           "[simulation]\nseed = 20240801\nhorizon = 100.0\noutput_dt = 0.05\n"
           "n_replicas = 2\nx0 = \"0.5\"\n\n[analysis]\nh = 0.002\n\n"
           "[output]\ndir = out\n";
  }
  {
    std::ofstream cfg(dir / "reach.ini");
    cfg << "[model]\nexample = radulescu\nalpha = 3.0\n\n"
           "[simulation]\nseed = 7\nx0 = \"2.5 0.5\"\n\n"
           "[analysis]\ngrid_resolution = 64\nreach_mode = accessible\n"
           "start_samples = 8\n\n[output]\ndir = out\n";
  }

  auto run = [&](const std::string& args) {
    const std::string cmd =
        "cd " + dir.string() + " && " + PDMP_CLI_BIN + " " + args + " > /dev/null 2>&1";
    return WEXITSTATUS(std::system(cmd.c_str()));
  };

  CheckResult sim;
  sim.name = "simulate_byte_identical";
  if (run("simulate -c sim.ini") == 0) {
    const std::string a0 = slurp(dir / "out" / "replica_0_path.csv");
    const std::string a1 = slurp(dir / "out" / "replica_1_skeleton.json");
    sim.pass = run("simulate -c sim.ini") == 0 &&
               slurp(dir / "out" / "replica_0_path.csv") == a0 &&
               slurp(dir / "out" / "replica_1_skeleton.json") == a1 && !a0.empty();
  }
  sim.detail = sim.pass ? "two runs, identical bytes" : "outputs differ or run failed";
  out.push_back(sim);

  CheckResult re;
  re.name = "reach_byte_identical";
  if (run("reach -c reach.ini") == 0) {
    const std::string g = slurp(dir / "out" / "reach.csv");
    re.pass = run("reach -c reach.ini") == 0 && slurp(dir / "out" / "reach.csv") == g &&
              !g.empty();
  }
  re.detail = re.pass ? "two runs, identical bytes" : "outputs differ or run failed";
  out.push_back(re);
  return out;
}

}  // namespace

int main() {
  using namespace pdmp::verify;

  criterion("[1] invariant Beta marginals (lambda = 2 and 1)", [] {
    return std::vector<CheckResult>{beta_invariant_law(2.0, 42), beta_invariant_law(1.0, 42)};
  });

  criterion("[2] fixed-point algebra of the competing-fields example",
            [] { return radulescu_fixed_point_algebra(3.0); });

  criterion("[3] transience: decay of the distance to the diagonal", [] {
    return std::vector<CheckResult>{radulescu_transience(3.0, 1.0, 4.0, 20, 2024)};
  });

  criterion("[4] recurrence: visits to the off-diagonal sink", [] {
    return std::vector<CheckResult>{radulescu_recurrence(3.0, 1.0, 0.05, 20, 2024)};
  });

  criterion("[5] weak/strong bracket verdicts on the catalog",
            [] { return bracket_verdicts(5, 4); });

  criterion("[6] symbolic vs finite-difference brackets", [] {
    return std::vector<CheckResult>{bracket_oracle_equivalence(7, 20)};
  });

  criterion("[7] accessible sets: segment and diagonal", [] {
    return std::vector<CheckResult>{accessible_segment(128, 32),
                                    accessible_radulescu(128, 32)};
  });

  criterion("[8] correspondence gap decays with the horizon", [] {
    return std::vector<CheckResult>{correspondence_gap_decay(20, 5)};
  });

  criterion("[9] thinning distributional checks",
            [] { return thinning_distribution(11); });

  criterion("[10] determinism of CLI runs", [] { return determinism_checks(); });

  if (g_failures == 0) {
    std::printf("acceptance: all criteria passed\n");
  } else {
    std::printf("acceptance: %d criterion(s) FAILED\n", g_failures);
  }
  return g_failures == 0 ? 0 : 1;
}
