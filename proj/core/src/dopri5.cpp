#include "bohm/dopri5.hpp"

#include <algorithm>
#include <cmath>

namespace bohm {

namespace {

constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                 d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                 d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

bool all_finite(const State& s) { return s.allFinite(); }

double scaled_norm(const State& e, const State& y0, const State& y1, double rtol, double atol) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < e.size(); ++i) {
    const double sc = atol + rtol * std::max(std::abs(y0(i)), std::abs(y1(i)));
    acc += (e(i) / sc) * (e(i) / sc);
  }
  return std::sqrt(acc / static_cast<double>(e.size()));
}

}  // namespace

State DenseSegment::eval(double t) const {
  const double th = (t - t0) / h;
  const double th1 = 1.0 - th;
  return r1 + th * (r2 + th1 * (r3 + th * (r4 + th1 * r5)));
}

State DenseSegment::derivative(double t) const {
  const double th = (t - t0) / h;
  const double th1 = 1.0 - th;
  // d/dth of th (r2 + th1 (r3 + th (r4 + th1 r5)))
  const State inner = r4 + th1 * r5;              // q(th)
  const State mid = r3 + th * inner;              // p(th)
  const State dmid = inner + th * (-r5);          // p'
  const State g = r2 + th1 * mid;                 // g(th)
  const State dg = -mid + th1 * dmid;             // g'
  return (g + th * dg) / h;
}

DenseSegment StepAttempt::dense() const {
  DenseSegment d;
  d.t0 = t;
  d.h = h;
  const State ydiff = y1 - y0;
  const State bspl = h * k1 - ydiff;
  d.r1 = y0;
  d.r2 = ydiff;
  d.r3 = bspl;
  d.r4 = ydiff - h * k7 - bspl;
  d.r5 = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
  return d;
}

StepAttempt dopri5_step(const Rhs& f, double t, const State& y, const State& k1, double h, double rel_tol,
                        double abs_tol) {
  StepAttempt s;
  s.t = t;
  s.h = h;
  s.y0 = y;
  s.k1 = k1;
  try {
    const State k2 = f(t + c2 * h, y + h * (a21 * k1));
    if (!all_finite(k2)) return s;
    s.k3 = f(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
    if (!all_finite(s.k3)) return s;
    s.k4 = f(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * s.k3));
    if (!all_finite(s.k4)) return s;
    s.k5 = f(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * s.k3 + a54 * s.k4));
    if (!all_finite(s.k5)) return s;
    s.k6 = f(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * s.k3 + a64 * s.k4 + a65 * s.k5));
    if (!all_finite(s.k6)) return s;
    s.y1 = y + h * (a71 * k1 + a73 * s.k3 + a74 * s.k4 + a75 * s.k5 + a76 * s.k6);
    s.k7 = f(t + h, s.y1);
    if (!all_finite(s.k7) || !all_finite(s.y1)) return s;
  } catch (const Error&) {
    return s;
  }
  const State err = h * (e1 * k1 + e3 * s.k3 + e4 * s.k4 + e5 * s.k5 + e6 * s.k6 + e7 * s.k7);
  s.error = scaled_norm(err, y, s.y1, rel_tol, abs_tol);
  s.finite = std::isfinite(s.error);
  return s;
}

double dopri5_next_step(double h, double error) {
  if (error == 0.0) return h * 5.0;
  const double factor = 0.9 * std::pow(error, -0.2);
  return h * std::clamp(factor, 0.2, 5.0);
}

double dopri5_initial_step(const Rhs& f, double t, const State& y, const State& k1, double direction,
                           double rel_tol, double abs_tol, double max_step) {
  State sc(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) sc(i) = abs_tol + rel_tol * std::abs(y(i));
  const double n = static_cast<double>(y.size());
  const double d0 = std::sqrt((y.array() / sc.array()).square().sum() / n);
  const double dd1 = std::sqrt((k1.array() / sc.array()).square().sum() / n);
  double h0 = (d0 < 1e-5 || dd1 < 1e-5) ? 1e-6 : 0.01 * d0 / dd1;
  h0 = std::min(h0, max_step);
  try {
    const State k2 = f(t + direction * h0, y + direction * h0 * k1);
    const double d2 = std::sqrt(((k2 - k1).array() / sc.array()).square().sum() / n) / h0;
    const double m = std::max(dd1, d2);
    const double h1 = m <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / m, 0.2);
    return std::min({100.0 * h0, h1, max_step});
  } catch (const Error&) {
    return h0 * 1e-3;
  }
}

}  // namespace bohm
