#include "pdmp/config.hpp"

#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "pdmp/examples.hpp"

namespace pdmp::config {

namespace {

struct RawValue {
  std::string text;
  bool quoted = false;
  int line = 0;
};

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

double to_number(const RawValue& v, const std::string& key) {
  char* end = nullptr;
  const double x = std::strtod(v.text.c_str(), &end);
  if (end == v.text.c_str() || *end != '\0')
    throw ConfigError("line " + std::to_string(v.line) + ": key '" + key +
                      "' expects a number, got '" + v.text + "'");
  return x;
}

long to_long(const RawValue& v, const std::string& key) {
  const double x = to_number(v, key);
  if (x != static_cast<double>(static_cast<long>(x)))
    throw ConfigError("key '" + key + "' expects an integer");
  return static_cast<long>(x);
}

std::vector<double> to_vector(const RawValue& v, const std::string& key) {
  std::vector<double> out;
  std::istringstream is(v.text);
  std::string tok;
  while (is >> tok) {
    char* end = nullptr;
    const double x = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str() || *end != '\0')
      throw ConfigError("key '" + key + "' expects space-separated numbers");
    out.push_back(x);
  }
  if (out.empty()) throw ConfigError("key '" + key + "' is empty");
  return out;
}

bool parse_indexed(const std::string& key, const std::string& prefix, int& i, int& j) {
  // prefix.i.j
  if (key.rfind(prefix + ".", 0) != 0) return false;
  const std::string rest = key.substr(prefix.size() + 1);
  const auto dot = rest.find('.');
  if (dot == std::string::npos) throw ConfigError("malformed key '" + key + "'");
  try {
    i = std::stoi(rest.substr(0, dot));
    j = std::stoi(rest.substr(dot + 1));
  } catch (const std::exception&) {
    throw ConfigError("malformed key '" + key + "'");
  }
  return true;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  cfg.raw_text = text;

  std::map<std::string, RawValue> values;  // "section.key" -> value
  std::istringstream is(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto comment = line.find('#');
    if (comment != std::string::npos) line = line.substr(0, comment);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("line " + std::to_string(lineno) + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section != "model" && section != "simulation" && section != "analysis" &&
          section != "output")
        throw ConfigError("line " + std::to_string(lineno) + ": unknown section [" + section +
                          "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    if (section.empty())
      throw ConfigError("line " + std::to_string(lineno) + ": key outside any section");
    const std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    bool quoted = false;
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      quoted = true;
      value = value.substr(1, value.size() - 2);
    }
    if (key.empty() || value.empty())
      throw ConfigError("line " + std::to_string(lineno) + ": empty key or value");
    const std::string full = section + "." + key;
    if (values.count(full))
      throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + full + "'");
    values[full] = {value, quoted, lineno};
  }

  auto take = [&](const std::string& full) -> std::optional<RawValue> {
    auto it = values.find(full);
    if (it == values.end()) return std::nullopt;
    RawValue v = it->second;
    values.erase(it);
    return v;
  };

  // [model]
  if (auto v = take("model.example")) cfg.example = v->text;
  for (const std::string p : {"alpha", "lambda", "lambda0", "lambda1", "d"})
    if (auto v = take("model." + p)) cfg.example_params[p] = to_number(*v, p);
  if (auto v = take("model.dimension")) cfg.dimension = static_cast<int>(to_long(*v, "dimension"));
  if (auto v = take("model.regimes")) cfg.regimes = static_cast<int>(to_long(*v, "regimes"));
  if (auto v = take("model.lambda_bar")) cfg.lambda_bar = to_number(*v, "lambda_bar");
  if (auto v = take("model.box_lo")) cfg.box_lo = to_vector(*v, "box_lo");
  if (auto v = take("model.box_hi")) cfg.box_hi = to_vector(*v, "box_hi");
  if (auto v = take("model.wrap")) {
    for (double w : to_vector(*v, "wrap")) cfg.wrap.push_back(w != 0.0);
  }

  // Remaining model.* keys must be field.i.j / rate.i.j.
  for (auto it = values.begin(); it != values.end();) {
    const std::string& full = it->first;
    if (full.rfind("model.", 0) == 0) {
      const std::string key = full.substr(6);
      int i = 0, j = 0;
      if (parse_indexed(key, "field", i, j)) {
        cfg.field_exprs[{i, j}] = it->second.text;
        it = values.erase(it);
        continue;
      }
      if (parse_indexed(key, "rate", i, j)) {
        if (i == j)
          throw ConfigError("rate." + std::to_string(i) + "." + std::to_string(j) +
                            ": diagonal rates are fixed at zero");
        cfg.rate_exprs[{i, j}] = it->second.text;
        it = values.erase(it);
        continue;
      }
    }
    ++it;
  }

  // [simulation]
  if (auto v = take("simulation.seed")) {
    const long s = to_long(*v, "seed");
    if (s < 0) throw ConfigError("seed must be nonnegative");
    cfg.seed = static_cast<std::uint64_t>(s);
  }
  if (auto v = take("simulation.horizon")) cfg.horizon = to_number(*v, "horizon");
  if (auto v = take("simulation.n_steps")) cfg.n_steps = to_long(*v, "n_steps");
  if (auto v = take("simulation.output_dt")) cfg.output_dt = to_number(*v, "output_dt");
  if (auto v = take("simulation.n_replicas")) cfg.n_replicas = to_long(*v, "n_replicas");
  if (auto v = take("simulation.x0")) cfg.x0 = to_vector(*v, "x0");
  if (auto v = take("simulation.regime0"))
    cfg.regime0 = static_cast<int>(to_long(*v, "regime0"));

  // [analysis]
  if (auto v = take("analysis.h")) cfg.step = to_number(*v, "h");
  if (auto v = take("analysis.quad_order"))
    cfg.quad_order = static_cast<int>(to_long(*v, "quad_order"));
  if (auto v = take("analysis.k_max")) cfg.k_max = static_cast<int>(to_long(*v, "k_max"));
  if (auto v = take("analysis.rank_tol")) cfg.rank_tol = to_number(*v, "rank_tol");
  if (auto v = take("analysis.grid_resolution"))
    cfg.grid_resolution = static_cast<int>(to_long(*v, "grid_resolution"));
  if (auto v = take("analysis.tau")) cfg.tau = to_number(*v, "tau");
  if (auto v = take("analysis.bins")) cfg.bins = static_cast<int>(to_long(*v, "bins"));
  if (auto v = take("analysis.start_samples"))
    cfg.start_samples = static_cast<int>(to_long(*v, "start_samples"));
  if (auto v = take("analysis.burn_in")) cfg.burn_in = to_number(*v, "burn_in");
  if (auto v = take("analysis.scan_points"))
    cfg.scan_points = static_cast<int>(to_long(*v, "scan_points"));
  if (auto v = take("analysis.reach_mode")) {
    cfg.reach_mode = v->text;
    if (cfg.reach_mode != "reachable" && cfg.reach_mode != "accessible" &&
        cfg.reach_mode != "omega")
      throw ConfigError("reach_mode must be reachable, accessible or omega");
  }
  if (auto v = take("analysis.threads")) cfg.threads = static_cast<int>(to_long(*v, "threads"));

  // [output]
  if (auto v = take("output.dir")) cfg.out_dir = v->text;

  if (!values.empty())
    throw ConfigError("unknown config key '" + values.begin()->first + "' (line " +
                      std::to_string(values.begin()->second.line) + ")");

  if (!(cfg.step > 0.0)) throw ConfigError("h must be positive");
  if (!(cfg.output_dt > 0.0)) throw ConfigError("output_dt must be positive");
  if (cfg.n_replicas < 1) throw ConfigError("n_replicas must be >= 1");
  if (cfg.quad_order < 1 || cfg.quad_order > 256)
    throw ConfigError("quad_order out of range [1, 256]");
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

SwitchingSystem build_system(const RunConfig& cfg) {
  if (!cfg.example.empty()) return examples::by_name(cfg.example, cfg.example_params);

  if (cfg.dimension < 1 || cfg.regimes < 2)
    throw ConfigError("inline model needs dimension >= 1 and regimes >= 2");
  if (static_cast<int>(cfg.box_lo.size()) != cfg.dimension ||
      static_cast<int>(cfg.box_hi.size()) != cfg.dimension)
    throw ConfigError("box_lo/box_hi must have `dimension` entries");
  if (!(cfg.lambda_bar > 0.0)) throw ConfigError("lambda_bar must be positive");

  Box box;
  box.lo = cfg.box_lo;
  box.hi = cfg.box_hi;
  if (!cfg.wrap.empty()) {
    if (static_cast<int>(cfg.wrap.size()) != cfg.dimension)
      throw ConfigError("wrap must have `dimension` entries");
    box.wrap = cfg.wrap;
  }

  std::vector<VectorField> fields;
  for (int i = 0; i < cfg.regimes; ++i) {
    std::vector<expr::Expression> comps;
    for (int c = 1; c <= cfg.dimension; ++c) {
      auto it = cfg.field_exprs.find({i, c});
      if (it == cfg.field_exprs.end())
        throw ConfigError("missing field." + std::to_string(i) + "." + std::to_string(c));
      comps.push_back(expr::parse(it->second, cfg.dimension));
    }
    fields.emplace_back(std::move(comps));
  }
  for (const auto& [key, value] : cfg.field_exprs) {
    (void)value;
    if (key.first < 0 || key.first >= cfg.regimes || key.second < 1 ||
        key.second > cfg.dimension)
      throw ConfigError("field." + std::to_string(key.first) + "." +
                        std::to_string(key.second) + " is out of range");
  }

  std::vector<expr::Expression> rates;
  for (int i = 0; i < cfg.regimes; ++i)
    for (int j = 0; j < cfg.regimes; ++j) {
      auto it = cfg.rate_exprs.find({i, j});
      if (i == j) {
        if (it != cfg.rate_exprs.end())
          throw ConfigError("rate." + std::to_string(i) + "." + std::to_string(j) +
                            ": diagonal rates are fixed at zero");
        rates.push_back(expr::constant(0.0, cfg.dimension));
      } else {
        rates.push_back(it == cfg.rate_exprs.end()
                            ? expr::constant(0.0, cfg.dimension)
                            : expr::parse(it->second, cfg.dimension));
      }
    }
  for (const auto& [key, value] : cfg.rate_exprs) {
    (void)value;
    if (key.first < 0 || key.first >= cfg.regimes || key.second < 0 ||
        key.second >= cfg.regimes)
      throw ConfigError("rate." + std::to_string(key.first) + "." +
                        std::to_string(key.second) + " is out of range");
  }

  return SwitchingSystem(cfg.dimension, cfg.regimes, std::move(fields), std::move(rates),
                         cfg.lambda_bar, std::move(box));
}

Point initial_point(const RunConfig& cfg, const SwitchingSystem& sys) {
  if (!cfg.x0.empty()) {
    if (static_cast<int>(cfg.x0.size()) != sys.dimension())
      throw ConfigError("x0 must have `dimension` entries");
    if (!sys.box().contains(cfg.x0, 1e-12)) throw ConfigError("x0 lies outside the box");
    return cfg.x0;
  }
  Point p(static_cast<std::size_t>(sys.dimension()));
  for (int k = 0; k < sys.dimension(); ++k) {
    auto ku = static_cast<std::size_t>(k);
    p[ku] = 0.5 * (sys.box().lo[ku] + sys.box().hi[ku]);
  }
  return p;
}

}  // namespace pdmp::config
