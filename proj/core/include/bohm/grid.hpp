#pragma once

#include "bohm/types.hpp"

#include <cstddef>
#include <vector>

namespace bohm {

// Uniform tensor grid on the box [-extent, extent) per axis. Node i on an axis
// sits at -extent + i * spacing, so periodic axes never duplicate the end point.
struct GridSpec {
  int dim = 1;
  std::vector<double> extent;        // half-widths
  std::vector<int> points;           // nodes per axis
  std::vector<bool> periodic;

  static GridSpec uniform(int dim, int points_per_axis, double half_width, bool periodic = true);

  void validate() const;

  double spacing(int axis) const { return 2.0 * extent[axis] / points[axis]; }
  double coordinate(int axis, int i) const { return -extent[axis] + i * spacing(axis); }
  double cell_volume() const;
  std::size_t size() const;

  // Row-major: the last axis is contiguous.
  std::size_t stride(int axis) const;
  std::vector<int> unflatten(std::size_t index) const;
  Vec node(std::size_t index) const;
  Vec cell_center(std::size_t index) const;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

// Angular wavenumbers in FFTW order for one axis.
std::vector<double> wavenumbers(const GridSpec& grid, int axis);

}  // namespace bohm
