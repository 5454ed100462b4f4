#pragma once

#include "bohm/types.hpp"

#include <optional>
#include <vector>

namespace bohm {

// Affine subspace {q : N^T (q - anchor) = 0} given by an orthonormal set of
// normals N. Its codimension is the number of normals.
struct SingularSubspace {
  Vec anchor;
  std::vector<Vec> normals;

  int codimension() const { return static_cast<int>(normals.size()); }
  void validate(int dim) const;
};

// Configuration space R^d minus a finite union of singular subspaces.
// delta is the tube radius used by the singular-set condition integral.
struct ConfigSpace {
  int dim = 1;
  std::vector<SingularSubspace> singular;
  double delta = 1.0;

  static ConfigSpace free(int dim, double delta = 1.0) { return ConfigSpace{dim, {}, delta}; }
  void validate() const;
};

struct SingularDistance {
  int index = 0;
  double dist = 0.0;
  Vec direction;  // unit vector toward the subspace; empty when dist == 0
  bool has_direction() const { return direction.size() > 0; }
};

// Distance from q to each singular subspace together with e = -grad dist.
// Throws OnSingularSet when q lies on a subspace and require_direction is set.
std::vector<SingularDistance> singular_distance(const ConfigSpace& space, const Vec& q,
                                                bool require_direction = false);

// Distance to a single subspace, without the direction.
double distance_to(const SingularSubspace& sub, const Vec& q);

// min over subspaces; +inf when there are none.
double min_singular_distance(const ConfigSpace& space, const Vec& q);

}  // namespace bohm
