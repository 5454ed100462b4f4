#pragma once

#include "bohm/current.hpp"
#include "bohm/dopri5.hpp"

#include <limits>
#include <optional>
#include <string_view>
#include <vector>

namespace bohm {

struct IntegratorConfig {
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  double max_step = std::numeric_limits<double>::infinity();
  // Unset: infinite for closed-form providers, 95% of the smallest grid half-width otherwise.
  std::optional<double> escape_radius;
  NodePolicy node_policy;
  double singular_margin = 1e-6;
  long max_steps = 100000;
  // Sub-samples per accepted step used for event detection and diagnostics.
  int substeps = 4;
  // Relative time resolution of event bisection.
  double event_tol = 1e-10;
  // Keep the continuous extension of every accepted step.
  bool keep_dense = false;

  void validate(const CurrentProvider& provider) const;
  double resolved_escape_radius(const CurrentProvider& provider) const;
};

enum class TrajectoryStatus { completed, node_hit, singular_hit, escaped, step_limit };
std::string_view to_string(TrajectoryStatus s) noexcept;

enum class EventKind { node, singular, escape };
std::string_view to_string(EventKind k) noexcept;

struct TrajectoryEvent {
  EventKind kind = EventKind::node;
  double t = 0.0;
  int subspace = -1;  // singular events only
};

struct DiagnosticRecord {
  double L = 0.0;                      // variation of log j0
  double D = 0.0;                      // variation of |Q|
  std::vector<double> V_per_subspace;  // variation of log dist inside the tube
};

struct TrajectorySample {
  double t = 0.0;
  Vec q;
  double j0 = 0.0;
};

struct Trajectory {
  Vec q0;
  std::vector<TrajectorySample> samples;
  TrajectoryStatus status = TrajectoryStatus::completed;
  std::optional<double> tau_estimate;
  // Every event triggered inside the terminating step, earliest first.
  std::vector<TrajectoryEvent> events;
  DiagnosticRecord diagnostics;
  std::vector<DenseSegment> dense;  // only with keep_dense
  long steps = 0;
  long rejected = 0;

  const Vec& final_point() const { return samples.back().q; }
  double final_time() const { return samples.back().t; }
  // Position at time t from the stored continuous extension.
  Vec at(double t) const;
};

// Guidance ODE dQ/dt = J/j0 from (t0, q0) to T with events and diagnostics.
// Throws BadStart or ProviderWindow.
Trajectory integrate(const CurrentProvider& provider, const ConfigSpace& space, const Vec& q0, double T,
                     const IntegratorConfig& cfg = {}, double t0 = 0.0);

// Recomputations of the diagnostics from a finished trajectory's samples:
// midpoint quadrature of the chain-rule rates between consecutive samples.
double diag_log_density_variation(const Trajectory& traj, const CurrentProvider& provider);
double diag_path_variation(const Trajectory& traj);
double diag_singular_variation(const Trajectory& traj, const ConfigSpace& space, int subspace);

// Integral curve of the space-time current, d gamma / ds = j(gamma).
struct SCurve {
  std::vector<double> s;
  std::vector<double> t;
  std::vector<Vec> q;
  std::vector<double> step_sizes;  // accepted steps in s
  std::vector<DenseSegment> dense;
  bool reached_limit = false;      // stopped because t hit t_max

  // Gamma at the parameter where gamma^0 = t (bisection on the dense output).
  Vec at_time(double t) const;
};

SCurve integrate_s_parameterized(const CurrentProvider& provider, const Vec& q0, double s_max,
                                 const IntegratorConfig& cfg = {}, double t0 = 0.0,
                                 std::optional<double> t_max = std::nullopt);

// Forward to T under j, then back under the time-reversed current; |Q' - q0|.
double reverse_roundtrip(ProviderPtr provider, const Vec& q0, double T, const IntegratorConfig& cfg = {});

}  // namespace bohm
