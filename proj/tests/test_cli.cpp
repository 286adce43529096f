#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& content) {
  fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  out << content;
}

int run(const std::string& args, const fs::path& cwd) {
  const std::string cmd = "cd " + cwd.string() + " && " + PDMP_CLI_BIN + " " + args +
                          " > cli_stdout.txt 2> cli_stderr.txt";
  const int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("pdmp_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

const char* kSimConfig = R"([model]
example = interval_beta
lambda = 2.0

[simulation]
seed = 42
horizon = 50.0
output_dt = 0.1
n_replicas = 2
x0 = "0.5"

[analysis]
h = 0.002

[output]
dir = out
)";

}  // namespace

TEST_CASE("validate exits 0 on a sane model and 1 on an invalid one") {
  auto dir = fresh_dir("validate");
  spit(dir / "good.ini", "[model]\nexample = radulescu\nalpha = 3.0\n");
  CHECK(run("validate -c good.ini", dir) == 0);
  CHECK(slurp(dir / "out" / "validate.json").find("\"valid\": true") != std::string::npos);

  spit(dir / "bad.ini", R"([model]
dimension = 1
regimes = 2
lambda_bar = 1.0
box_lo = "0"
box_hi = "1"
field.0.1 = "0"
field.1.1 = "0"
rate.0.1 = "2"
rate.1.0 = "1"
)");
  CHECK(run("validate -c bad.ini", dir) == 1);
}

TEST_CASE("config errors exit 2 and leave an error report") {
  auto dir = fresh_dir("conferr");
  spit(dir / "broken.ini", "[model]\nexample = torus\nbogus = 1\n");
  CHECK(run("simulate -c broken.ini", dir) == 2);
  CHECK(slurp(dir / "out" / "error.json").find("bogus") != std::string::npos);

  // Missing seed is a config error as well.
  spit(dir / "noseed.ini", "[model]\nexample = interval_beta\n");
  CHECK(run("simulate -c noseed.ini", dir) == 2);
}

TEST_CASE("simulate is byte-identical for identical config and seed") {
  auto dir = fresh_dir("determinism");
  spit(dir / "sim.ini", kSimConfig);

  REQUIRE(run("simulate -c sim.ini", dir) == 0);
  const std::string path0 = slurp(dir / "out" / "replica_0_path.csv");
  const std::string path1 = slurp(dir / "out" / "replica_1_path.csv");
  const std::string skel0 = slurp(dir / "out" / "replica_0_skeleton.json");
  const std::string manifest = slurp(dir / "out" / "manifest.json");

  REQUIRE(run("simulate -c sim.ini", dir) == 0);
  CHECK(slurp(dir / "out" / "replica_0_path.csv") == path0);
  CHECK(slurp(dir / "out" / "replica_1_path.csv") == path1);
  CHECK(slurp(dir / "out" / "replica_0_skeleton.json") == skel0);
  CHECK(slurp(dir / "out" / "manifest.json") == manifest);

  CHECK(path0 != path1);  // replicas differ from each other
  CHECK(path0.find("t,x1,regime,is_jump,is_true_switch") == 0);
}

TEST_CASE("brackets subcommand writes the torus verdict map") {
  auto dir = fresh_dir("brackets");
  spit(dir / "br.ini", "[model]\nexample = torus\nd = 2\n\n[analysis]\nscan_points = 5\n");
  REQUIRE(run("brackets -c br.ini", dir) == 0);
  const std::string csv = slurp(dir / "out" / "verdicts.csv");

  std::istringstream is(csv);
  std::string line;
  std::getline(is, line);
  CHECK(line == "x1,x2,kind,order_achieved,rank,satisfied");
  int weak_rows = 0, strong_rows = 0;
  while (std::getline(is, line)) {
    if (line.find(",weak,") != std::string::npos) {
      ++weak_rows;
      CHECK(line.back() == '1');
    }
    if (line.find(",strong,") != std::string::npos) {
      ++strong_rows;
      CHECK(line.back() == '0');
    }
  }
  CHECK(weak_rows == 25);
  CHECK(strong_rows == 25);
}

TEST_CASE("reach subcommand is deterministic and writes grid artifacts") {
  auto dir = fresh_dir("reach");
  spit(dir / "reach.ini", R"([model]
example = planar_linear_segment

[simulation]
seed = 1
x0 = "0.4 0.3"

[analysis]
grid_resolution = 32
reach_mode = reachable

[output]
dir = out
)");
  REQUIRE(run("reach -c reach.ini", dir) == 0);
  const std::string csv = slurp(dir / "out" / "reach.csv");
  const std::string pgm = slurp(dir / "out" / "reach.pgm");
  REQUIRE(run("reach -c reach.ini", dir) == 0);
  CHECK(slurp(dir / "out" / "reach.csv") == csv);
  CHECK(slurp(dir / "out" / "reach.pgm") == pgm);
  CHECK(pgm.rfind("P5", 0) == 0);
}

TEST_CASE("the manifest's embedded config reproduces the run exactly") {
  auto dir = fresh_dir("roundtrip");
  spit(dir / "sim.ini", kSimConfig);
  REQUIRE(run("simulate -c sim.ini", dir) == 0);
  const std::string path0 = slurp(dir / "out" / "replica_0_path.csv");

  // Pull the config text back out of the manifest and rerun from it.
  const std::string manifest = slurp(dir / "out" / "manifest.json");
  const auto key = manifest.find("\"config\":");
  REQUIRE(key != std::string::npos);
  const auto open = manifest.find('"', key + 9);
  const auto close = manifest.find("\",\n", open + 1);
  REQUIRE(open != std::string::npos);
  REQUIRE(close != std::string::npos);
  std::string embedded = manifest.substr(open + 1, close - open - 1);
  // Undo JSON string escapes (the config only needs \n and \").
  std::string text;
  for (std::size_t k = 0; k < embedded.size(); ++k) {
    if (embedded[k] == '\\' && k + 1 < embedded.size()) {
      ++k;
      text += embedded[k] == 'n' ? '\n' : embedded[k];
    } else {
      text += embedded[k];
    }
  }
  spit(dir / "recovered.ini", text);
  REQUIRE(run("simulate -c recovered.ini", dir) == 0);
  CHECK(slurp(dir / "out" / "replica_0_path.csv") == path0);
}

TEST_CASE("occupation subcommand writes measures, histogram and gap report") {
  auto dir = fresh_dir("occupation");
  spit(dir / "occ.ini", R"([model]
example = interval_beta
lambda = 2.0

[simulation]
seed = 9
horizon = 200.0
output_dt = 0.05
x0 = "0.5"

[analysis]
h = 0.005
bins = 16

[output]
dir = out
)");
  REQUIRE(run("occupation -c occ.ini", dir) == 0);
  const std::string hist = slurp(dir / "out" / "histogram.csv");
  CHECK(hist.rfind("center1,regime,mass", 0) == 0);
  CHECK(slurp(dir / "out" / "occupation_continuous.csv").rfind("x1,regime,weight", 0) == 0);
  const std::string gap = slurp(dir / "out" / "correspondence_gap.json");
  CHECK(gap.find("gap_large") != std::string::npos);

  // Histogram masses sum to one.
  std::istringstream is(hist);
  std::string line;
  std::getline(is, line);
  double total = 0.0;
  while (std::getline(is, line)) {
    const auto comma = line.rfind(',');
    total += std::atof(line.c_str() + comma + 1);
  }
  CHECK(std::abs(total - 1.0) < 1e-9);
}

TEST_CASE("verify subcommand emits a machine-readable verdict") {
  auto dir = fresh_dir("verify");
  // The fast verify target: fixed-point algebra only.
  CHECK(run("verify radulescu --alpha 3", dir) == 0);
  const std::string json = slurp(dir / "out" / "verify.json");
  CHECK(json.find("\"pass\": true") != std::string::npos);
  CHECK(run("verify unknown_example", dir) == 2);
}
