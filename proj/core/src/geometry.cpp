#include "bohm/geometry.hpp"

#include <cmath>
#include <limits>

namespace bohm {

void SingularSubspace::validate(int dim) const {
  require(anchor.size() == dim, Errc::dimension_mismatch, "subspace anchor dimension");
  require(!normals.empty() && codimension() <= dim, Errc::invalid_argument,
          "subspace codimension must lie in [1, dim]");
  for (std::size_t i = 0; i < normals.size(); ++i) {
    require(normals[i].size() == dim, Errc::dimension_mismatch, "subspace normal dimension");
    require(std::abs(normals[i].norm() - 1.0) <= 1e-12, Errc::invalid_argument,
            "subspace normals must have unit length");
    for (std::size_t j = 0; j < i; ++j) {
      require(std::abs(normals[i].dot(normals[j])) <= 1e-12, Errc::invalid_argument,
              "subspace normals must be pairwise orthogonal");
    }
  }
}

void ConfigSpace::validate() const {
  require(dim >= 1 && dim <= kMaxDim, Errc::invalid_argument, "config space dimension");
  require(delta > 0.0, Errc::invalid_argument, "delta must be positive");
  for (const auto& s : singular) s.validate(dim);
}

namespace {

// Coordinates of q relative to the anchor along each normal.
Eigen::VectorXd normal_coordinates(const SingularSubspace& sub, const Vec& q) {
  Eigen::VectorXd y(sub.codimension());
  const Vec rel = q - sub.anchor;
  for (int i = 0; i < sub.codimension(); ++i) y(i) = sub.normals[i].dot(rel);
  return y;
}

}  // namespace

double distance_to(const SingularSubspace& sub, const Vec& q) {
  return normal_coordinates(sub, q).norm();
}

std::vector<SingularDistance> singular_distance(const ConfigSpace& space, const Vec& q,
                                                bool require_direction) {
  require(q.size() == space.dim, Errc::dimension_mismatch, "point dimension");
  std::vector<SingularDistance> out;
  out.reserve(space.singular.size());
  for (std::size_t l = 0; l < space.singular.size(); ++l) {
    const auto& sub = space.singular[l];
    const Eigen::VectorXd y = normal_coordinates(sub, q);
    SingularDistance sd;
    sd.index = static_cast<int>(l);
    sd.dist = y.norm();
    if (sd.dist > 0.0) {
      sd.direction = Vec::Zero(space.dim);
      for (int i = 0; i < sub.codimension(); ++i) sd.direction -= (y(i) / sd.dist) * sub.normals[i];
    } else if (require_direction) {
      throw Error(Errc::on_singular_set, "point lies on singular subspace " + std::to_string(l));
    }
    out.push_back(std::move(sd));
  }
  return out;
}

double min_singular_distance(const ConfigSpace& space, const Vec& q) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& sub : space.singular) m = std::min(m, distance_to(sub, q));
  return m;
}

}  // namespace bohm
