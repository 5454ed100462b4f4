#include "bohm/grid.hpp"

#include <numbers>

namespace bohm {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::node_encountered: return "NodeEncountered";
    case Errc::out_of_domain: return "OutOfDomain";
    case Errc::dimension_mismatch: return "DimensionMismatch";
    case Errc::on_singular_set: return "OnSingularSet";
    case Errc::unsupported_field: return "UnsupportedField";
    case Errc::axiom_violation: return "AxiomViolation";
    case Errc::bad_start: return "BadStart";
    case Errc::provider_window: return "ProviderWindow";
    case Errc::degenerate_density: return "DegenerateDensity";
    case Errc::too_few_survivors: return "TooFewSurvivors";
    case Errc::box_too_large: return "BoxTooLarge";
    case Errc::window_exceeded: return "WindowExceeded";
    case Errc::wrong_codimension: return "WrongCodimension";
    case Errc::invalid_argument: return "InvalidArgument";
    case Errc::io_error: return "IoError";
  }
  return "Unknown";
}

std::string_view to_string(Axiom axiom) noexcept {
  switch (axiom) {
    case Axiom::smoothness: return "smoothness (finite C1 field)";
    case Axiom::divergence_free: return "divergence-free";
    case Axiom::positivity: return "positivity (j0 > 0 wherever j != 0)";
    case Axiom::normalization: return "normalization (unit mass)";
  }
  return "unknown";
}

GridSpec GridSpec::uniform(int dim, int points_per_axis, double half_width, bool periodic) {
  GridSpec g;
  g.dim = dim;
  g.extent.assign(static_cast<std::size_t>(dim), half_width);
  g.points.assign(static_cast<std::size_t>(dim), points_per_axis);
  g.periodic.assign(static_cast<std::size_t>(dim), periodic);
  g.validate();
  return g;
}

void GridSpec::validate() const {
  require(dim >= 1 && dim <= kMaxDim, Errc::invalid_argument, "grid dimension must be in [1, 4]");
  require(extent.size() == static_cast<std::size_t>(dim) && points.size() == extent.size() &&
              periodic.size() == extent.size(),
          Errc::dimension_mismatch, "grid per-axis arrays must have length dim");
  for (int a = 0; a < dim; ++a) {
    require(points[a] >= 4, Errc::invalid_argument, "grid needs at least 4 points per axis");
    require(extent[a] > 0.0, Errc::invalid_argument, "grid extent must be positive");
  }
}

double GridSpec::cell_volume() const {
  double v = 1.0;
  for (int a = 0; a < dim; ++a) v *= spacing(a);
  return v;
}

std::size_t GridSpec::size() const {
  std::size_t n = 1;
  for (int p : points) n *= static_cast<std::size_t>(p);
  return n;
}

std::size_t GridSpec::stride(int axis) const {
  std::size_t s = 1;
  for (int a = dim - 1; a > axis; --a) s *= static_cast<std::size_t>(points[a]);
  return s;
}

std::vector<int> GridSpec::unflatten(std::size_t index) const {
  std::vector<int> idx(static_cast<std::size_t>(dim));
  for (int a = dim - 1; a >= 0; --a) {
    idx[a] = static_cast<int>(index % static_cast<std::size_t>(points[a]));
    index /= static_cast<std::size_t>(points[a]);
  }
  return idx;
}

Vec GridSpec::node(std::size_t index) const {
  Vec q(dim);
  for (int a = dim - 1; a >= 0; --a) {
    const auto n = static_cast<std::size_t>(points[a]);
    q(a) = coordinate(a, static_cast<int>(index % n));
    index /= n;
  }
  return q;
}

Vec GridSpec::cell_center(std::size_t index) const {
  Vec q = node(index);
  for (int a = 0; a < dim; ++a) q(a) += 0.5 * spacing(a);
  return q;
}

std::vector<double> wavenumbers(const GridSpec& grid, int axis) {
  const int n = grid.points[axis];
  const double dk = std::numbers::pi / grid.extent[axis];
  std::vector<double> k(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) k[j] = dk * (j <= n / 2 - (n % 2 == 0 ? 1 : 0) ? j : j - n);
  return k;
}

}  // namespace bohm
