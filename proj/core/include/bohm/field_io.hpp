#pragma once

#include "bohm/field.hpp"

#include <filesystem>
#include <iosfwd>

namespace bohm {

// Little-endian binary field file:
//   uint32 dim, uint32 points[dim], float64 half_widths[dim], uint32 k,
//   then (re, im) float64 pairs, row-major over the grid, components innermost.
void write_field(std::ostream& out, const SpinorField& psi);
void write_field(const std::filesystem::path& path, const SpinorField& psi);
SpinorField read_field(std::istream& in);
SpinorField read_field(const std::filesystem::path& path);

}  // namespace bohm
