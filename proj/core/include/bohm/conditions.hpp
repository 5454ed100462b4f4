#pragma once

#include "bohm/ensemble.hpp"

#include <vector>

namespace bohm {

struct QuadratureSpec {
  double h = 0.05;    // target spatial cell width
  double dt = 0.05;   // target time cell width
  double epsilon_node = 1e-9;
};

struct ConditionReport {
  double I_node = 0.0;
  double node_excluded_mass = 0.0;  // integral of j0 over the excluded node cells
  double I_escape = 0.0;
  std::vector<double> I_singular;   // one per singular subspace
  double delta = 0.0;               // tube radius used for I_singular
  double ED_bound = 0.0;            // integral of |J| over [0, T] x ball(R)
  double R = 0.0;
  double T = 0.0;
  double h = 0.0;   // spatial cell width actually used
  double dt = 0.0;  // time cell width actually used
  int quadrature_order = 2;  // midpoint rule in space and time
};

// Space-time integrals over [0, T] x ball(R) by the midpoint rule on a uniform
// grid; time and space derivatives of j0 by centred differences. Cells with
// j0 below epsilon_node times the density scale are left out of I_node.
// Throws WindowExceeded when [0, T] is not inside the provider window.
ConditionReport condition_integrals(const CurrentProvider& provider, const ConfigSpace& space, double R, double T,
                                    const QuadratureSpec& quad = {});

// Half the smallest distance from the effective support of j0(0, .)
// (j0 >= 1e-3 of the density scale on grid nodes) to any singular subspace,
// capped at 1. Falls back to the cap when the support touches the set.
double default_delta(const CurrentProvider& provider, const ConfigSpace& space, const GridSpec& grid);

struct ExpectedDistance {
  double mean_D = 0.0;
  double standard_error = 0.0;
  double bound = 0.0;
  // (bound - mean_D) / standard_error; +inf when the standard error vanishes and mean_D <= bound.
  double margin_in_sigmas = 0.0;
  bool holds(double sigmas = 3.0) const { return mean_D <= bound + sigmas * standard_error; }
};

// Ensemble mean of D (cemetery points contribute their partial D) against ED_bound.
ExpectedDistance expected_distance_check(const Ensemble& pushed, const ConditionReport& report);

}  // namespace bohm
