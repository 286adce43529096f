#include "pdmp/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace pdmp::io {

void atomic_write(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp.string() + " for writing");
    out << content;
    if (!out) throw Error("write failed for " + tmp.string());
  }
  fs::rename(tmp, target);
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::uint64_t fnv1a(const std::string& data) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string path_csv(const sim::HybridPath& path, int dimension) {
  std::ostringstream os;
  os << "t";
  for (int k = 1; k <= dimension; ++k) os << ",x" << k;
  os << ",regime,is_jump,is_true_switch\n";
  for (const auto& s : path.dense) {
    os << format_double(s.t);
    for (int k = 0; k < dimension; ++k)
      os << "," << format_double(s.x[static_cast<std::size_t>(k)]);
    os << "," << s.regime << "," << (s.at_jump ? 1 : 0) << ","
       << (s.at_true_switch ? 1 : 0) << "\n";
  }
  return os.str();
}

std::string skeleton_json(const sim::HybridPath& path, int dimension) {
  std::ostringstream os;
  os << "{\n  \"seed\": " << path.seed << ",\n  \"horizon\": "
     << format_double(path.horizon) << ",\n  \"clamp_events\": " << path.clamp_events
     << ",\n  \"skeleton\": [\n";
  for (std::size_t n = 0; n < path.skeleton.size(); ++n) {
    const auto& e = path.skeleton[n];
    os << "    {\"t\": " << format_double(e.time) << ", \"u\": "
       << format_double(e.interarrival) << ", \"x\": [";
    for (int k = 0; k < dimension; ++k)
      os << (k ? ", " : "") << format_double(e.position[static_cast<std::size_t>(k)]);
    os << "], \"regime\": " << e.regime << ", \"true_switch\": "
       << (e.true_switch ? "true" : "false") << "}";
    os << (n + 1 < path.skeleton.size() ? ",\n" : "\n");
  }
  os << "  ]\n}\n";
  return os.str();
}

std::string measure_csv(const measure::EmpiricalMeasure& m, int dimension) {
  std::ostringstream os;
  for (int k = 1; k <= dimension; ++k) os << "x" << k << ",";
  os << "regime,weight\n";
  for (const auto& a : m.atoms) {
    for (int k = 0; k < dimension; ++k)
      os << format_double(a.x[static_cast<std::size_t>(k)]) << ",";
    os << a.regime << "," << format_double(a.weight) << "\n";
  }
  return os.str();
}

std::string histogram_csv(const measure::Histogram& h) {
  const int d = h.box.dimension();
  std::ostringstream os;
  for (int k = 1; k <= d; ++k) os << "center" << k << ",";
  os << "regime,mass\n";
  const std::size_t cells = h.cells_per_regime();
  for (int r = 0; r < h.regimes; ++r) {
    for (std::size_t cell = 0; cell < cells; ++cell) {
      std::size_t rem = cell;
      Point center(static_cast<std::size_t>(d));
      for (int k = d - 1; k >= 0; --k) {
        auto ku = static_cast<std::size_t>(k);
        const std::size_t b = rem % static_cast<std::size_t>(h.bins_per_axis);
        rem /= static_cast<std::size_t>(h.bins_per_axis);
        center[ku] = h.box.lo[ku] +
                     (static_cast<double>(b) + 0.5) * h.box.extent(k) / h.bins_per_axis;
      }
      for (int k = 0; k < d; ++k)
        os << format_double(center[static_cast<std::size_t>(k)]) << ",";
      os << r << "," << format_double(h.at(r, cell)) << "\n";
    }
  }
  return os.str();
}

std::string verdicts_csv(const std::vector<brackets::VerdictRow>& rows, int dimension) {
  std::ostringstream os;
  for (int k = 1; k <= dimension; ++k) os << "x" << k << ",";
  os << "kind,order_achieved,rank,satisfied\n";
  for (const auto& row : rows) {
    for (int k = 0; k < dimension; ++k)
      os << format_double(row.x[static_cast<std::size_t>(k)]) << ",";
    os << (row.kind == brackets::ConditionKind::weak ? "weak" : "strong") << ","
       << row.order_achieved << "," << row.rank << "," << (row.satisfied ? 1 : 0) << "\n";
  }
  return os.str();
}

std::string grid_csv(const reach::ReachGrid& grid) {
  const int d = grid.box.dimension();
  std::ostringstream os;
  for (int k = 1; k <= d; ++k) os << "center" << k << ",";
  os << "occupied\n";
  for (std::size_t cell = 0; cell < grid.occupied.size(); ++cell) {
    const Point c = grid.center_of(cell);
    for (int k = 0; k < d; ++k) os << format_double(c[static_cast<std::size_t>(k)]) << ",";
    os << (grid.occupied[cell] ? 1 : 0) << "\n";
  }
  return os.str();
}

std::string grid_pgm(const reach::ReachGrid& grid) {
  if (grid.box.dimension() != 2) throw Error("PGM export needs a 2-d grid");
  const int n = grid.resolution;
  std::ostringstream os;
  os << "P5\n" << n << " " << n << "\n255\n";
  // Row 0 at the top = highest x2, so the image reads like a plot.
  for (int row = n - 1; row >= 0; --row)
    for (int col = 0; col < n; ++col) {
      const std::size_t cell =
          static_cast<std::size_t>(col) * static_cast<std::size_t>(n) +
          static_cast<std::size_t>(row);
      os.put(grid.occupied[cell] ? static_cast<char>(0) : static_cast<char>(255));
    }
  return os.str();
}

}  // namespace pdmp::io
