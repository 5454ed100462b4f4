#include "bohm/current.hpp"

#include <cmath>
#include <random>

#include "bohm/numerics.hpp"

namespace bohm {

DensityJet CurrentProvider::density_jet(double t, const Vec& q) const {
  const TimeWindow w = window();
  DensityJet jet;
  jet.j0 = current(t, q).j0;
  const double dt = 1e-5 * std::max(1.0, std::abs(t));
  const double tp = std::min(t + dt, w.t_max);
  const double tm = std::max(t - dt, w.t_min);
  jet.dt_j0 = tp > tm ? (current(tp, q).j0 - current(tm, q).j0) / (tp - tm) : 0.0;
  jet.grad_j0 = Vec::Zero(q.size());
  for (Eigen::Index a = 0; a < q.size(); ++a) {
    const double h = 1e-5 * std::max(1.0, std::abs(q(a)));
    Vec qp = q, qm = q;
    qp(a) += h;
    qm(a) -= h;
    jet.grad_j0(a) = (current(t, qp).j0 - current(t, qm).j0) / (2.0 * h);
  }
  return jet;
}

Vec velocity(const CurrentProvider& provider, const NodePolicy& policy, double t, const Vec& q) {
  require(q.size() == provider.dim(), Errc::dimension_mismatch, "point dimension");
  if (!provider.window().contains(t)) throw Error(Errc::out_of_domain, "time outside provider window");
  for (const auto& sub : provider.config_space().singular) {
    if (distance_to(sub, q) == 0.0) throw Error(Errc::out_of_domain, "point on singular subspace");
  }
  const CurrentSample s = provider.current(t, q);
  if (policy.is_node(provider, s.j0)) throw Error(Errc::node_encountered, "j0 below node threshold");
  return s.J / s.j0;
}

namespace {

class ReversedProvider final : public CurrentProvider {
 public:
  explicit ReversedProvider(ProviderPtr inner) : inner_(std::move(inner)) {}

  int dim() const override { return inner_->dim(); }
  CurrentSample current(double t, const Vec& q) const override {
    CurrentSample s = inner_->current(-t, q);
    s.J = -s.J;
    return s;
  }
  DensityJet density_jet(double t, const Vec& q) const override {
    DensityJet jet = inner_->density_jet(-t, q);
    jet.dt_j0 = -jet.dt_j0;
    return jet;
  }
  TimeWindow window() const override {
    const TimeWindow w = inner_->window();
    return {-w.t_max, -w.t_min};
  }
  double density_scale() const override { return inner_->density_scale(); }
  const ConfigSpace& config_space() const override { return inner_->config_space(); }
  std::optional<double> domain_half_width() const override { return inner_->domain_half_width(); }

  const ProviderPtr& inner() const { return inner_; }

 private:
  ProviderPtr inner_;
};

}  // namespace

ProviderPtr time_reverse(ProviderPtr provider) {
  require(provider != nullptr, Errc::invalid_argument, "null provider");
  if (auto* r = dynamic_cast<const ReversedProvider*>(provider.get())) return r->inner();
  return std::make_shared<ReversedProvider>(std::move(provider));
}

std::vector<double> divergence_residual(const CurrentProvider& provider, double t,
                                        const GridSpec& region, double h, double dt) {
  require(region.dim == provider.dim(), Errc::dimension_mismatch, "region dimension");
  require(h > 0.0 && dt > 0.0, Errc::invalid_argument, "steps must be positive");
  const TimeWindow w = provider.window();
  if (!w.contains(t - dt) || !w.contains(t + dt))
    throw Error(Errc::out_of_domain, "time stencil leaves provider window");

  std::vector<double> out(region.size());
  for (std::size_t i = 0; i < region.size(); ++i) {
    const Vec q = region.node(i);
    double r = (provider.current(t + dt, q).j0 - provider.current(t - dt, q).j0) / (2.0 * dt);
    for (int a = 0; a < region.dim; ++a) {
      Vec qp = q, qm = q;
      qp(a) += h;
      qm(a) -= h;
      r += (provider.current(t, qp).J(a) - provider.current(t, qm).J(a)) / (2.0 * h);
    }
    out[i] = r;
  }
  return out;
}

FunctionProvider::FunctionProvider(int dim, Fn fn, TimeWindow window, double density_scale,
                                   ConfigSpace space)
    : dim_(dim), fn_(std::move(fn)), window_(window), scale_(density_scale), space_(std::move(space)) {
  require(dim_ == space_.dim, Errc::dimension_mismatch, "config space dimension");
  require(scale_ > 0.0, Errc::invalid_argument, "density scale must be positive");
}

double max_density(const CurrentProvider& provider, const GridSpec& grid, double t) {
  double m = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) m = std::max(m, provider.current(t, grid.node(i)).j0);
  return m;
}

double total_mass(const CurrentProvider& provider, const GridSpec& grid, double t) {
  std::vector<double> v(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) v[i] = provider.current(t, grid.node(i)).j0;
  return pairwise_sum(v) * grid.cell_volume();
}

void validate_axioms(const CurrentProvider& provider, const GridSpec& grid,
                     const AxiomCheckOptions& options) {
  require(grid.dim == provider.dim(), Errc::dimension_mismatch, "validation grid dimension");
  const TimeWindow w = provider.window();
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> pick(w.t_min, w.t_max);

  std::vector<double> times{0.0};
  if (!w.contains(0.0)) times[0] = w.t_min;
  for (int i = 1; i < options.n_times; ++i) times.push_back(pick(rng));

  std::vector<double> dens(grid.size());
  for (double t : times) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const Vec q = grid.node(i);
      const CurrentSample s = provider.current(t, q);
      if (!std::isfinite(s.j0) || !s.J.allFinite())
        throw AxiomViolation(Axiom::smoothness, "non-finite current at t=" + std::to_string(t));
      if (s.j0 < 0.0)
        throw AxiomViolation(Axiom::positivity, "negative j0 at t=" + std::to_string(t));
      if (s.j0 == 0.0 && s.J.norm() > 0.0)
        throw AxiomViolation(Axiom::positivity,
                             "j0 = 0 with J != 0 at t=" + std::to_string(t));
      dens[i] = s.j0;
    }
    const double mass = pairwise_sum(dens) * grid.cell_volume();
    if (std::abs(mass - 1.0) > options.normalization_tol)
      throw AxiomViolation(Axiom::normalization, "integral of j0 is " + std::to_string(mass) +
                                                      " at t=" + std::to_string(t));
  }
}

}  // namespace bohm
