#pragma once

#include "bohm/current.hpp"
#include "bohm/propagate.hpp"
#include "bohm/scenario.hpp"

#include <memory>
#include <optional>

namespace bohm {

struct ProviderOptions {
  bool validate = true;
  AxiomCheckOptions axioms;
  // Overrides the scenario's (or run's) singular-tube radius.
  std::optional<double> delta;
};

// Exact current of a closed-form scenario.
class ScenarioProvider final : public CurrentProvider {
 public:
  explicit ScenarioProvider(ScenarioPtr scenario, std::optional<double> delta = std::nullopt);

  int dim() const override { return scenario_->dim(); }
  CurrentSample current(double t, const Vec& q) const override;
  TimeWindow window() const override { return scenario_->horizon(); }
  double density_scale() const override { return scale_; }
  const ConfigSpace& config_space() const override { return space_; }
  DensityJet density_jet(double t, const Vec& q) const override;

  const Scenario& scenario() const { return *scenario_; }

 private:
  ScenarioPtr scenario_;
  CurrentLaw law_;
  ConfigSpace space_;
  double scale_ = 1.0;
};

// Current of a stored PDE run. psi and its gradient are interpolated with
// periodic cubic B-splines in space and cubic Hermite in time, using the exact
// time derivative -(i/hbar) H psi at each slice; j is then formed pointwise,
// so j0 >= 0 and the Dirac light-cone bound hold exactly.
class GridProvider final : public CurrentProvider {
 public:
  GridProvider(const PdeRun& run, ConfigSpace space);
  ~GridProvider() override;

  int dim() const override;
  CurrentSample current(double t, const Vec& q) const override;
  TimeWindow window() const override;
  double density_scale() const override;
  const ConfigSpace& config_space() const override;
  DensityJet density_jet(double t, const Vec& q) const override;
  std::optional<double> domain_half_width() const override;

  const GridSpec& grid() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Current law implied by a Hamiltonian (the vector potential is handled by GridProvider).
CurrentLaw law_for(const HamiltonianSpec& ham, int dim);

// Axiom validation runs at construction unless disabled.
ProviderPtr build_provider(ScenarioPtr scenario, const ProviderOptions& options = {});
ProviderPtr build_provider(const PdeRun& run, ConfigSpace space, const ProviderOptions& options = {});

// Samples a scenario at time t on its recommended grid (or the given one).
SpinorField sample_scenario(const Scenario& s, double t, const std::optional<GridSpec>& grid = std::nullopt);

}  // namespace bohm
