#include "bohm/conditions.hpp"

#include "bohm/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bohm {

ConditionReport condition_integrals(const CurrentProvider& provider, const ConfigSpace& space, double R, double T,
                                    const QuadratureSpec& quad) {
  const int d = provider.dim();
  require(space.dim == d, Errc::dimension_mismatch, "configuration space dimension");
  require(R > 0.0 && T > 0.0 && quad.h > 0.0 && quad.dt > 0.0, Errc::invalid_argument,
          "R, T, h and dt must be positive");
  const TimeWindow w = provider.window();
  require(w.contains(0.0) && w.contains(T), Errc::window_exceeded,
          "[0, " + std::to_string(T) + "] exceeds the provider window");

  ConditionReport rep;
  rep.R = R;
  rep.T = T;
  rep.delta = space.delta;
  const int nt = std::max(1, static_cast<int>(std::ceil(T / quad.dt - 1e-12)));
  const int nx = std::max(2, static_cast<int>(std::ceil(2.0 * R / quad.h - 1e-12)));
  rep.dt = T / nt;
  rep.h = 2.0 * R / nx;
  const double cell = std::pow(rep.h, d) * rep.dt;
  const double threshold = quad.epsilon_node * provider.density_scale();
  const std::size_t nsub = space.singular.size();

  // Cell centres inside the ball.
  std::vector<Vec> centres;
  {
    GridSpec box = GridSpec::uniform(d, nx, R, false);
    for (std::size_t c = 0; c < box.size(); ++c) {
      const Vec q = box.cell_center(c);
      if (q.norm() <= R) centres.push_back(q);
    }
  }

  std::vector<double> node_terms, excluded, escape_terms, ed_terms;
  std::vector<std::vector<double>> sing_terms(nsub);
  const double hd = 0.5 * rep.h;
  for (int k = 0; k < nt; ++k) {
    const double t = (k + 0.5) * rep.dt;
    for (const Vec& q : centres) {
      const CurrentSample s = provider.current(t, q);
      const double Jn = s.J.norm();
      ed_terms.push_back(Jn);
      const double r = q.norm();
      if (r > 0.0) escape_terms.push_back(std::abs(s.J.dot(q)) / r);
      if (nsub > 0) {
        for (const SingularDistance& sd : singular_distance(space, q)) {
          if (sd.dist < space.delta && sd.has_direction())
            sing_terms[sd.index].push_back(std::abs(s.J.dot(sd.direction)) / sd.dist);
        }
      }
      if (!(s.j0 >= threshold)) {
        excluded.push_back(s.j0);
        continue;
      }
      const double dtj = (provider.current(t + 0.5 * rep.dt, q).j0 - provider.current(t - 0.5 * rep.dt, q).j0) / rep.dt;
      double adv = 0.0;
      for (int a = 0; a < d; ++a) {
        Vec qp = q, qm = q;
        qp(a) += hd;
        qm(a) -= hd;
        const double g = (provider.current(t, qp).j0 - provider.current(t, qm).j0) / rep.h;
        adv += s.J(a) / s.j0 * g;
      }
      node_terms.push_back(std::abs(dtj + adv));
    }
  }
  rep.I_node = pairwise_sum(node_terms) * cell;
  rep.node_excluded_mass = pairwise_sum(excluded) * cell;
  rep.I_escape = pairwise_sum(escape_terms) * cell;
  rep.ED_bound = pairwise_sum(ed_terms) * cell;
  for (std::size_t l = 0; l < nsub; ++l) rep.I_singular.push_back(pairwise_sum(sing_terms[l]) * cell);
  return rep;
}

double default_delta(const CurrentProvider& provider, const ConfigSpace& space, const GridSpec& grid) {
  if (space.singular.empty()) return 1.0;
  const double cut = 1e-3 * provider.density_scale();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < grid.size(); ++p) {
    const Vec q = grid.node(p);
    if (provider.current(0.0, q).j0 >= cut) best = std::min(best, min_singular_distance(space, q));
  }
  if (!(best > 0.0) || !std::isfinite(best)) return 1.0;
  return std::min(1.0, 0.5 * best);
}

ExpectedDistance expected_distance_check(const Ensemble& pushed, const ConditionReport& report) {
  require(pushed.pushed(), Errc::invalid_argument, "ensemble has not been pushed forward");
  std::vector<double> D, D2;
  for (std::size_t i = 0; i < pushed.size(); ++i) {
    const double v = pushed.errors[i].empty() ? pushed.diagnostics[i].D : 0.0;
    D.push_back(v);
    D2.push_back(v * v);
  }
  const double n = static_cast<double>(D.size());
  ExpectedDistance r;
  r.mean_D = pairwise_sum(D) / n;
  const double var = n > 1 ? std::max(0.0, (pairwise_sum(D2) - n * r.mean_D * r.mean_D) / (n - 1.0)) : 0.0;
  r.standard_error = std::sqrt(var / n);
  r.bound = report.ED_bound;
  if (r.standard_error > 0.0)
    r.margin_in_sigmas = (r.bound - r.mean_D) / r.standard_error;
  else
    r.margin_in_sigmas = r.mean_D <= r.bound ? std::numeric_limits<double>::infinity()
                                             : -std::numeric_limits<double>::infinity();
  return r;
}

}  // namespace bohm
