#ifndef PDMP_IO_HPP
#define PDMP_IO_HPP

#include <cstdint>
#include <string>

#include "pdmp/brackets.hpp"
#include "pdmp/measure.hpp"
#include "pdmp/reach.hpp"
#include "pdmp/simulate.hpp"

namespace pdmp::io {

// Writes content to path via a temp file + rename, so readers never observe
// a partial file.
void atomic_write(const std::string& path, const std::string& content);

// Deterministic text form of a double: 17 significant digits, C locale.
std::string format_double(double v);

std::uint64_t fnv1a(const std::string& data);
std::string hex64(std::uint64_t v);

// CSV dialect everywhere: comma separated, '.' decimal point, header row,
// LF line endings.
std::string path_csv(const sim::HybridPath& path, int dimension);
std::string skeleton_json(const sim::HybridPath& path, int dimension);
std::string measure_csv(const measure::EmpiricalMeasure& m, int dimension);
std::string histogram_csv(const measure::Histogram& h);
std::string verdicts_csv(const std::vector<brackets::VerdictRow>& rows, int dimension);
std::string grid_csv(const reach::ReachGrid& grid);
std::string grid_pgm(const reach::ReachGrid& grid);  // d == 2 only

}  // namespace pdmp::io

#endif  // PDMP_IO_HPP
