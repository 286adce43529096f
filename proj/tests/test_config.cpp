#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pdmp/config.hpp"

using namespace pdmp;

namespace {

const char* kExampleConfig = R"cfg(# model selection
[model]
example = interval_beta
lambda = 2.0

[simulation]
seed = 42
horizon = 100.0
output_dt = 0.05
n_replicas = 2
x0 = "0.5"
regime0 = 0

[analysis]
h = 0.002
quad_order = 32

[output]
dir = out_test
)cfg";

const char* kInlineConfig = R"cfg([model]
dimension = 2
regimes = 2
lambda_bar = 4.0
box_lo = "0 0"
box_hi = "4 4"
field.0.1 = "-x1 + 3"
field.0.2 = "-x2 + 3"
field.1.1 = "-x1 + 3/(1 + x2^2)"
field.1.2 = "-x2 + 3/(1 + x1^2)"
rate.0.1 = "1"
rate.1.0 = "1"

[simulation]
seed = 7
)cfg";

}  // namespace

TEST_CASE("named-example config parses and builds") {
  auto cfg = config::parse_config(kExampleConfig);
  CHECK(cfg.example == "interval_beta");
  CHECK(cfg.example_params.at("lambda") == 2.0);
  CHECK(cfg.seed.has_value());
  CHECK(*cfg.seed == 42);
  CHECK(cfg.horizon == 100.0);
  CHECK(cfg.n_replicas == 2);
  CHECK(cfg.step == 0.002);
  CHECK(cfg.out_dir == "out_test");
  CHECK(cfg.x0 == std::vector<double>{0.5});

  auto sys = config::build_system(cfg);
  CHECK(sys.dimension() == 1);
  CHECK(sys.lambda_bar() == 5.0);
  CHECK(config::initial_point(cfg, sys) == std::vector<double>{0.5});
}

TEST_CASE("inline model config builds the competing-fields system") {
  auto cfg = config::parse_config(kInlineConfig);
  auto sys = config::build_system(cfg);
  CHECK(sys.dimension() == 2);
  CHECK(sys.regimes() == 2);
  CHECK(sys.validate().ok());
  // Default start point is the box centre.
  CHECK(config::initial_point(cfg, sys) == std::vector<double>{2.0, 2.0});
}

TEST_CASE("unknown keys, sections and duplicates are hard errors") {
  CHECK_THROWS_AS(config::parse_config("[model]\nexample = torus\ntypo_key = 1\n"),
                  ConfigError);
  CHECK_THROWS_AS(config::parse_config("[nope]\nx = 1\n"), ConfigError);
  CHECK_THROWS_AS(config::parse_config("[model]\nexample = torus\nexample = torus\n"),
                  ConfigError);
  CHECK_THROWS_AS(config::parse_config("example = torus\n"), ConfigError);  // no section
  CHECK_THROWS_AS(config::parse_config("[simulation]\nseed = -3\n"), ConfigError);
  CHECK_THROWS_AS(config::parse_config("[simulation]\nhorizon\n"), ConfigError);
}

TEST_CASE("inline model validation errors") {
  // Missing field component.
  CHECK_THROWS_AS(config::build_system(config::parse_config(R"cfg([model]
dimension = 1
regimes = 2
lambda_bar = 2.0
box_lo = "0"
box_hi = "1"
field.0.1 = "-x1"
rate.0.1 = "1"
rate.1.0 = "1"
)cfg")),
                  ConfigError);

  // Diagonal rate is not configurable.
  CHECK_THROWS_AS(config::parse_config(R"cfg([model]
dimension = 1
regimes = 2
lambda_bar = 2.0
box_lo = "0"
box_hi = "1"
field.0.1 = "-x1"
field.1.1 = "-x1"
rate.0.0 = "1"
)cfg"),
                  ConfigError);

  // Box size mismatch.
  CHECK_THROWS_AS(config::build_system(config::parse_config(R"cfg([model]
dimension = 2
regimes = 2
lambda_bar = 2.0
box_lo = "0"
box_hi = "1 1"
field.0.1 = "-x1"
field.0.2 = "-x2"
field.1.1 = "-x1"
field.1.2 = "-x2"
rate.0.1 = "1"
rate.1.0 = "1"
)cfg")),
                  ConfigError);
}

TEST_CASE("x0 outside the box is rejected") {
  auto cfg = config::parse_config(R"cfg([model]
example = interval_beta
lambda = 1.0

[simulation]
seed = 1
x0 = "3.0"
)cfg");
  auto sys = config::build_system(cfg);
  CHECK_THROWS_AS(config::initial_point(cfg, sys), ConfigError);
}

TEST_CASE("reach mode values are checked") {
  CHECK_THROWS_AS(config::parse_config("[analysis]\nreach_mode = sideways\n"), ConfigError);
  auto cfg = config::parse_config("[analysis]\nreach_mode = accessible\n");
  CHECK(cfg.reach_mode == "accessible");
}
