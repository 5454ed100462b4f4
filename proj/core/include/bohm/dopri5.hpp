#pragma once

#include "bohm/types.hpp"

#include <functional>

namespace bohm {

// ODE state: configuration plus, for the s-parameterized system, time.
inline constexpr int kMaxState = kMaxDim + 1;
using State = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxState, 1>;

using Rhs = std::function<State(double, const State&)>;

// Continuous extension of one accepted Dormand-Prince step (4th order).
struct DenseSegment {
  double t0 = 0.0;
  double h = 0.0;
  State r1, r2, r3, r4, r5;

  double t1() const { return t0 + h; }
  State eval(double t) const;
  // dy/dt of the interpolant.
  State derivative(double t) const;
};

struct StepAttempt {
  bool finite = false;  // every stage evaluated to finite values
  double t = 0.0;
  double h = 0.0;
  State y0, y1;
  State k1, k7;  // slopes at both ends (FSAL)
  double error = 0.0;  // scaled RMS error; accept when <= 1
  DenseSegment dense() const;

 private:
  friend StepAttempt dopri5_step(const Rhs&, double, const State&, const State&, double, double, double);
  State k3, k4, k5, k6;
};

// One Dormand-Prince 5(4) attempt from (t, y) with slope k1 = f(t, y).
// Exceptions thrown by f mark the attempt as non-finite instead of propagating.
StepAttempt dopri5_step(const Rhs& f, double t, const State& y, const State& k1, double h, double rel_tol,
                        double abs_tol);

// Step-size update from a scaled error (I controller with safety 0.9).
double dopri5_next_step(double h, double error);

// Starting step following Hairer, Norsett and Wanner.
double dopri5_initial_step(const Rhs& f, double t, const State& y, const State& k1, double direction,
                           double rel_tol, double abs_tol, double max_step);

}  // namespace bohm
