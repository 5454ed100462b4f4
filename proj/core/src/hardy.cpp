#include "bohm/hardy.hpp"

#include "bohm/numerics.hpp"

#include <cmath>

namespace bohm {

HardyResult hardy_check(const SpinorField& phi, const SingularSubspace& sub) {
  require(sub.codimension() == 3, Errc::wrong_codimension,
          "subspace has codimension " + std::to_string(sub.codimension()) + ", the inequality needs 3");
  const GridSpec& g = phi.grid;
  sub.validate(g.dim);
  const auto grad = spectral_gradient(phi);
  std::vector<double> left(g.size()), right(g.size());
  for (std::size_t p = 0; p < g.size(); ++p) {
    const double dist = distance_to(sub, g.node(p));
    double rho = 0.0, gsq = 0.0;
    for (int c = 0; c < phi.k; ++c) {
      rho += std::norm(phi.at(p, c));
      for (int a = 0; a < g.dim; ++a) gsq += std::norm(grad[a].at(p, c));
    }
    if (dist == 0.0) require(rho == 0.0, Errc::on_singular_set, "grid node on the subspace; shift the grid");
    left[p] = dist > 0.0 ? rho / (4.0 * dist * dist) : 0.0;
    right[p] = gsq;
  }
  HardyResult r;
  r.lhs = pairwise_sum(left) * g.cell_volume();
  r.rhs = pairwise_sum(right) * g.cell_volume();
  require(r.rhs > 0.0, Errc::degenerate_density, "phi is constant on the grid");
  r.ratio = r.lhs / r.rhs;
  return r;
}

}  // namespace bohm
