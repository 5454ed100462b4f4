#pragma once

#include "bohm/field.hpp"
#include "bohm/geometry.hpp"

namespace bohm {

struct HardyResult {
  double lhs = 0.0;  // integral of |phi|^2 / (4 dist^2)
  double rhs = 0.0;  // integral of |grad phi|^2
  double ratio = 0.0;
};

// Both sides by rectangle-rule quadrature on the nodes of phi's grid, the
// gradient taken spectrally. The subspace must have codimension 3
// (WrongCodimension otherwise) and must not pass through a grid node
// (OnSingularSet); a half-cell shift of the grid avoids that.
HardyResult hardy_check(const SpinorField& phi, const SingularSubspace& sub);

}  // namespace bohm
