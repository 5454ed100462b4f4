#pragma once

#include "bohm/geometry.hpp"
#include "bohm/grid.hpp"
#include "bohm/types.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

namespace bohm {

// One evaluation of the space-time current j = (j0, J).
struct CurrentSample {
  double j0 = 0.0;
  Vec J;
};

// j0 together with its first derivatives, used by the log-density diagnostic
// and the node condition integral.
struct DensityJet {
  double j0 = 0.0;
  double dt_j0 = 0.0;
  Vec grad_j0;
};

struct TimeWindow {
  double t_min = 0.0;
  double t_max = 0.0;
  bool contains(double t) const { return t >= t_min && t <= t_max; }
};

// Evaluator of a current vector field. Implementations are immutable after
// construction; every method must be safe to call concurrently.
class CurrentProvider {
 public:
  virtual ~CurrentProvider() = default;

  virtual int dim() const = 0;
  virtual CurrentSample current(double t, const Vec& q) const = 0;
  virtual TimeWindow window() const = 0;
  // sup_q j0(0, q); normalizes the node threshold.
  virtual double density_scale() const = 0;
  virtual const ConfigSpace& config_space() const = 0;

  // Default uses centered differences of current(); analytic providers override.
  virtual DensityJet density_jet(double t, const Vec& q) const;
  // Smallest half-width of the box a grid-backed provider lives on.
  virtual std::optional<double> domain_half_width() const { return std::nullopt; }
};

using ProviderPtr = std::shared_ptr<const CurrentProvider>;

struct NodePolicy {
  double epsilon_node = 1e-9;

  double threshold(const CurrentProvider& p) const { return epsilon_node * p.density_scale(); }
  bool is_node(const CurrentProvider& p, double j0) const { return !(j0 >= threshold(p)); }
};

// dQ/dt = J / j0. Throws NodeEncountered below the node threshold and
// OutOfDomain outside the time window or on a singular subspace.
Vec velocity(const CurrentProvider& provider, const NodePolicy& policy, double t, const Vec& q);

// j̄(t, q) = (j0(-t, q), -J(-t, q)).
ProviderPtr time_reverse(ProviderPtr provider);

// Centered-difference estimate of d_t j0 + div J at every node of `region`.
std::vector<double> divergence_residual(const CurrentProvider& provider, double t,
                                        const GridSpec& region, double h, double dt);

// Provider defined by a callable; handy for closed-form fields.
class FunctionProvider final : public CurrentProvider {
 public:
  using Fn = std::function<CurrentSample(double, const Vec&)>;

  FunctionProvider(int dim, Fn fn, TimeWindow window, double density_scale,
                   ConfigSpace space);
  FunctionProvider(int dim, Fn fn, TimeWindow window, double density_scale)
      : FunctionProvider(dim, std::move(fn), window, density_scale, ConfigSpace::free(dim)) {}

  int dim() const override { return dim_; }
  CurrentSample current(double t, const Vec& q) const override { return fn_(t, q); }
  TimeWindow window() const override { return window_; }
  double density_scale() const override { return scale_; }
  const ConfigSpace& config_space() const override { return space_; }

 private:
  int dim_;
  Fn fn_;
  TimeWindow window_;
  double scale_;
  ConfigSpace space_;
};

// sup of j0(t, .) over the nodes of grid.
double max_density(const CurrentProvider& provider, const GridSpec& grid, double t);

// Rectangle-rule integral of j0(t, .) over the nodes of grid.
double total_mass(const CurrentProvider& provider, const GridSpec& grid, double t);

struct AxiomCheckOptions {
  int n_times = 5;
  std::uint64_t seed = 0x5eedULL;
  double normalization_tol = 1e-6;
};

// Checks finiteness, positivity and normalization on the
// nodes of grid at a few seeded times. Throws AxiomViolation naming the axiom.
void validate_axioms(const CurrentProvider& provider, const GridSpec& grid,
                     const AxiomCheckOptions& options = {});

}  // namespace bohm
