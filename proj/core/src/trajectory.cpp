#include "bohm/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace bohm {

namespace {

constexpr double kTiny = 1e-300;

// Everything the event functions and the diagnostics need at one space-time point.
struct Probe {
  double t = 0.0;
  Vec q;
  bool ok = false;
  double j0 = 0.0;
  Vec v;
  double dlog_j0 = 0.0;
  double r = 0.0;
  double dr = 0.0;
  std::vector<double> dist;
  std::vector<double> ddist;      // rate of dist along the flow
  std::vector<double> log_dist;   // log min(dist, delta)
  std::vector<double> dlog_dist;  // its rate along the flow
};

// Total variation of g over the sub-sample points, refining interior extrema
// by bisection on the sign of the rate.
template <class P, class Eval, class G, class R>
double variation(const std::vector<P>& pts, Eval&& eval, G&& g, R&& rate) {
  double tv = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double ga = g(pts[i]), gb = g(pts[i + 1]);
    const double ra = rate(pts[i]), rb = rate(pts[i + 1]);
    if (ra * rb < 0.0) {
      double lo = pts[i].t, hi = pts[i + 1].t;
      for (int it = 0; it < 60 && hi - lo > 1e-14 * std::max(1.0, std::abs(hi)); ++it) {
        const double mid = 0.5 * (lo + hi);
        ((rate(eval(mid)) * ra > 0.0) ? lo : hi) = mid;
      }
      const double gx = g(eval(0.5 * (lo + hi)));
      tv += std::abs(gx - ga) + std::abs(gb - gx);
    } else {
      tv += std::abs(gb - ga);
    }
  }
  return tv;
}

class Walker {
 public:
  Walker(const CurrentProvider& p, const ConfigSpace& space, const IntegratorConfig& cfg)
      : p_(p), space_(space), cfg_(cfg), threshold_(cfg.node_policy.threshold(p)),
        radius_(cfg.resolved_escape_radius(p)) {}

  Probe probe(double t, const Vec& q) const {
    Probe pr;
    pr.t = t;
    pr.q = q;
    pr.r = q.norm();
    const int n = static_cast<int>(space_.singular.size());
    pr.dist.assign(n, 0.0);
    pr.ddist.assign(n, 0.0);
    pr.log_dist.assign(n, 0.0);
    pr.dlog_dist.assign(n, 0.0);
    try {
      const CurrentSample s = p_.current(t, q);
      pr.j0 = s.j0;
      if (s.j0 > 0.0 && std::isfinite(s.j0) && s.J.allFinite()) {
        pr.v = s.J / s.j0;
        const DensityJet jet = p_.density_jet(t, q);
        pr.dlog_j0 = (jet.dt_j0 + pr.v.dot(jet.grad_j0)) / s.j0;
        pr.ok = std::isfinite(pr.dlog_j0);
      }
    } catch (const Error&) {
      pr.ok = false;
    }
    if (!pr.ok) {
      pr.j0 = 0.0;
      pr.v = Vec::Zero(q.size());
      pr.dlog_j0 = 0.0;
    }
    pr.dr = pr.r > 0.0 ? pr.v.dot(q) / pr.r : 0.0;
    if (n > 0) {
      for (const SingularDistance& sd : singular_distance(space_, q)) {
        pr.dist[sd.index] = sd.dist;
        pr.log_dist[sd.index] = std::log(std::max(std::min(sd.dist, space_.delta), kTiny));
        if (sd.has_direction()) pr.ddist[sd.index] = -sd.direction.dot(pr.v);
        if (sd.dist < space_.delta && sd.has_direction()) pr.dlog_dist[sd.index] = pr.ddist[sd.index] / sd.dist;
      }
    }
    return pr;
  }

  double log_j0(const Probe& pr) const { return std::log(std::max(pr.j0, kTiny)); }

  // Event functions; the trajectory terminates when one becomes <= 0.
  int n_events() const { return 2 + static_cast<int>(space_.singular.size()); }
  double event_value(const Probe& pr, int e) const {
    if (e == 0) return pr.ok ? pr.j0 - threshold_ : -threshold_;
    if (e == 1) return radius_ - pr.r;
    return pr.dist[e - 2] - cfg_.singular_margin;
  }
  double event_rate(const Probe& pr, int e) const {
    if (e == 0) return pr.j0 * pr.dlog_j0;
    if (e == 1) return -pr.dr;
    return pr.ddist[e - 2];
  }
  static TrajectoryEvent event_of(int e, double t) {
    if (e == 0) return {EventKind::node, t, -1};
    if (e == 1) return {EventKind::escape, t, -1};
    return {EventKind::singular, t, e - 2};
  }

  std::vector<Probe> probes(const DenseSegment& seg, const Probe& first, double a, double b) const {
    std::vector<Probe> pts{first};
    const int S = cfg_.substeps;
    for (int i = 1; i <= S; ++i) {
      const double t = i == S ? b : a + (b - a) * i / S;
      pts.push_back(probe(t, seg.eval(t)));
    }
    return pts;
  }

  void accumulate(const DenseSegment& seg, const std::vector<Probe>& pts, DiagnosticRecord& rec) const {
    auto eval = [&](double t) { return probe(t, seg.eval(t)); };
    rec.L += variation(pts, eval, [&](const Probe& p) { return log_j0(p); },
                       [](const Probe& p) { return p.dlog_j0; });
    rec.D += variation(pts, eval, [](const Probe& p) { return p.r; }, [](const Probe& p) { return p.dr; });
    for (std::size_t l = 0; l < rec.V_per_subspace.size(); ++l)
      rec.V_per_subspace[l] += variation(pts, eval, [l](const Probe& p) { return p.log_dist[l]; },
                                         [l](const Probe& p) { return p.dlog_dist[l]; });
  }

  // Time at which event e fires inside [pts[i-1], pts[i]], if it does. Besides a
  // sign change at the end point, an interior minimum (the rate turns from
  // negative to positive) is located and tested, so a function that dips below
  // zero and recovers between sub-samples is not missed.
  std::optional<double> crossing(const DenseSegment& seg, const std::vector<Probe>& pts, std::size_t i,
                                 int e) const {
    const Probe& a = pts[i - 1];
    const Probe& b = pts[i];
    if (event_value(b, e) <= 0.0) return bisect_event(seg, e, a.t, b.t);
    if (!(event_rate(a, e) < 0.0 && event_rate(b, e) > 0.0)) return std::nullopt;
    double lo = a.t, hi = b.t;
    for (int it = 0; it < 100 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++it) {
      const double mid = 0.5 * (lo + hi);
      const Probe pm = probe(mid, seg.eval(mid));
      if (event_value(pm, e) <= 0.0) return bisect_event(seg, e, a.t, mid);
      (event_rate(pm, e) < 0.0 ? lo : hi) = mid;
    }
    return std::nullopt;
  }

  double bisect_event(const DenseSegment& seg, int e, double lo, double hi) const {
    while (hi - lo > cfg_.event_tol * std::max(1.0, std::abs(hi))) {
      const double mid = 0.5 * (lo + hi);
      if (event_value(probe(mid, seg.eval(mid)), e) > 0.0)
        lo = mid;
      else
        hi = mid;
    }
    return hi;
  }

  double threshold() const { return threshold_; }
  double radius() const { return radius_; }

 private:
  const CurrentProvider& p_;
  const ConfigSpace& space_;
  const IntegratorConfig& cfg_;
  double threshold_;
  double radius_;
};

TrajectoryStatus status_of(EventKind k) {
  switch (k) {
    case EventKind::node: return TrajectoryStatus::node_hit;
    case EventKind::singular: return TrajectoryStatus::singular_hit;
    case EventKind::escape: return TrajectoryStatus::escaped;
  }
  return TrajectoryStatus::node_hit;
}

const DenseSegment& segment_at(const std::vector<DenseSegment>& dense, double t) {
  require(!dense.empty(), Errc::invalid_argument, "no continuous extension stored (enable keep_dense)");
  auto it = std::lower_bound(dense.begin(), dense.end(), t,
                             [](const DenseSegment& s, double x) { return s.t1() < x; });
  if (it == dense.end()) --it;
  return *it;
}

}  // namespace

std::string_view to_string(TrajectoryStatus s) noexcept {
  switch (s) {
    case TrajectoryStatus::completed: return "Completed";
    case TrajectoryStatus::node_hit: return "NodeHit";
    case TrajectoryStatus::singular_hit: return "SingularHit";
    case TrajectoryStatus::escaped: return "Escaped";
    case TrajectoryStatus::step_limit: return "StepLimit";
  }
  return "Unknown";
}

std::string_view to_string(EventKind k) noexcept {
  switch (k) {
    case EventKind::node: return "node";
    case EventKind::singular: return "singular";
    case EventKind::escape: return "escape";
  }
  return "unknown";
}

double IntegratorConfig::resolved_escape_radius(const CurrentProvider& provider) const {
  if (escape_radius) return *escape_radius;
  if (auto hw = provider.domain_half_width()) return 0.95 * *hw;
  return std::numeric_limits<double>::infinity();
}

void IntegratorConfig::validate(const CurrentProvider& provider) const {
  require(rel_tol > 0.0 && abs_tol > 0.0, Errc::invalid_argument, "tolerances must be positive");
  require(max_step > 0.0, Errc::invalid_argument, "max_step must be positive");
  require(max_steps > 0 && substeps >= 1, Errc::invalid_argument, "max_steps and substeps must be positive");
  require(event_tol > 0.0, Errc::invalid_argument, "event_tol must be positive");
  require(node_policy.epsilon_node > 0.0, Errc::invalid_argument, "epsilon_node must be positive");
  if (!provider.config_space().singular.empty())
    require(singular_margin > 0.0, Errc::invalid_argument, "singular_margin must be positive");
  const double R = resolved_escape_radius(provider);
  require(R > 0.0, Errc::invalid_argument, "escape_radius must be positive");
  if (auto hw = provider.domain_half_width())
    require(R < *hw, Errc::invalid_argument,
            "escape_radius " + std::to_string(R) + " must be below the grid half-width " + std::to_string(*hw));
}

Vec Trajectory::at(double t) const {
  require(t >= samples.front().t && t <= samples.back().t, Errc::out_of_domain, "time outside the trajectory");
  return segment_at(dense, t).eval(t);
}

Trajectory integrate(const CurrentProvider& provider, const ConfigSpace& space, const Vec& q0, double T,
                     const IntegratorConfig& cfg, double t0) {
  require(q0.size() == provider.dim(), Errc::dimension_mismatch, "start point dimension");
  require(space.dim == provider.dim(), Errc::dimension_mismatch, "configuration space dimension");
  require(T >= t0, Errc::invalid_argument, "integration runs forward in time");
  cfg.validate(provider);
  const TimeWindow w = provider.window();
  require(w.contains(t0) && w.contains(T), Errc::provider_window,
          "[" + std::to_string(t0) + ", " + std::to_string(T) + "] exceeds the provider window [" +
              std::to_string(w.t_min) + ", " + std::to_string(w.t_max) + "]");

  const Walker walker(provider, space, cfg);
  Probe last = walker.probe(t0, q0);
  for (int e = 0; e < walker.n_events(); ++e)
    require(walker.event_value(last, e) > 0.0, Errc::bad_start,
            std::string("start point triggers the ") + std::string(to_string(Walker::event_of(e, t0).kind)) +
                " event");

  Trajectory traj;
  traj.q0 = q0;
  traj.samples.push_back({t0, q0, last.j0});
  traj.diagnostics.V_per_subspace.assign(space.singular.size(), 0.0);
  if (T == t0) return traj;

  const Rhs f = [&provider](double t, const State& y) -> State {
    const CurrentSample s = provider.current(t, y);
    if (!(s.j0 > 0.0)) throw Error(Errc::node_encountered, "j0 vanished inside a step");
    return s.J / s.j0;
  };

  double t = t0;
  State y = q0;
  State k1 = f(t, y);
  double h = dopri5_initial_step(f, t, y, k1, 1.0, cfg.rel_tol, cfg.abs_tol, std::min(cfg.max_step, T - t0));

  while (true) {
    if (traj.steps >= cfg.max_steps) {
      traj.status = TrajectoryStatus::step_limit;
      traj.tau_estimate = t;
      break;
    }
    h = std::min({h, cfg.max_step, T - t});
    if (last.j0 < 1e3 * walker.threshold() && last.dlog_j0 != 0.0) h = std::min(h, 0.1 / std::abs(last.dlog_j0));
    if (h <= 1e-14 * std::max(1.0, std::abs(t))) {
      traj.status = TrajectoryStatus::step_limit;
      traj.tau_estimate = t;
      break;
    }

    const StepAttempt step = dopri5_step(f, t, y, k1, h, cfg.rel_tol, cfg.abs_tol);
    if (!step.finite || step.error > 1.0) {
      ++traj.rejected;
      h = step.finite ? std::min(dopri5_next_step(h, step.error), h) : 0.25 * h;
      continue;
    }
    ++traj.steps;
    const DenseSegment seg = step.dense();
    double t1 = t + h;
    if (T - t1 <= 1e-14 * std::max(1.0, std::abs(T))) t1 = T;
    std::vector<Probe> pts = walker.probes(seg, last, t, t1);

    // First sub-interval in which any event function becomes non-positive.
    std::size_t hit = 0;
    for (std::size_t i = 1; i < pts.size() && hit == 0; ++i)
      for (int e = 0; e < walker.n_events() && hit == 0; ++e)
        if (walker.crossing(seg, pts, i, e)) hit = i;

    if (hit == 0) {
      walker.accumulate(seg, pts, traj.diagnostics);
      if (cfg.keep_dense) traj.dense.push_back(seg);
      t = t1;
      y = step.y1;
      k1 = step.k7;
      last = pts.back();
      traj.samples.push_back({t, y, last.j0});
      if (t >= T) break;
      h = dopri5_next_step(h, step.error);
      continue;
    }

    // Bracket every event triggered within the rest of this step.
    for (int e = 0; e < walker.n_events(); ++e) {
      for (std::size_t i = hit; i < pts.size(); ++i) {
        if (auto te = walker.crossing(seg, pts, i, e)) {
          traj.events.push_back(Walker::event_of(e, *te));
          break;
        }
      }
    }
    std::sort(traj.events.begin(), traj.events.end(),
              [](const TrajectoryEvent& a, const TrajectoryEvent& b) { return a.t < b.t; });
    const double tau = traj.events.front().t;
    traj.status = status_of(traj.events.front().kind);
    traj.tau_estimate = tau;
    const std::vector<Probe> partial = walker.probes(seg, last, t, tau);
    walker.accumulate(seg, partial, traj.diagnostics);
    if (cfg.keep_dense) traj.dense.push_back(seg);
    if (tau > t) traj.samples.push_back({tau, partial.back().q, partial.back().j0});
    break;
  }
  return traj;
}

double diag_log_density_variation(const Trajectory& traj, const CurrentProvider& provider) {
  require(traj.samples.size() >= 2, Errc::invalid_argument, "need at least two samples");
  IntegratorConfig cfg;
  cfg.escape_radius = std::numeric_limits<double>::infinity();
  const Walker walker(provider, provider.config_space(), cfg);
  double L = 0.0;
  if (!traj.dense.empty()) {
    for (const DenseSegment& seg : traj.dense) {
      const double b = std::min(seg.t1(), traj.final_time());
      const auto pts = walker.probes(seg, walker.probe(seg.t0, seg.eval(seg.t0)), seg.t0, b);
      auto eval = [&](double t) { return walker.probe(t, seg.eval(t)); };
      L += variation(pts, eval, [&](const Probe& p) { return walker.log_j0(p); },
                     [](const Probe& p) { return p.dlog_j0; });
    }
    return L;
  }
  for (std::size_t i = 0; i + 1 < traj.samples.size(); ++i) {
    const auto& a = traj.samples[i];
    const auto& b = traj.samples[i + 1];
    const Probe mid = walker.probe(0.5 * (a.t + b.t), 0.5 * (a.q + b.q));
    L += std::abs(mid.dlog_j0) * (b.t - a.t);
  }
  return L;
}

namespace {

struct Scalar {
  double t, g, rate;
};

template <class F>
double dense_variation(const Trajectory& traj, int substeps, F&& at) {
  double tv = 0.0;
  for (const DenseSegment& seg : traj.dense) {
    const double b = std::min(seg.t1(), traj.final_time());
    std::vector<Scalar> pts;
    for (int i = 0; i <= substeps; ++i) {
      const double t = seg.t0 + (b - seg.t0) * i / substeps;
      pts.push_back(at(seg, t));
    }
    tv += variation(pts, [&](double t) { return at(seg, t); }, [](const Scalar& s) { return s.g; },
                    [](const Scalar& s) { return s.rate; });
  }
  return tv;
}

}  // namespace

double diag_path_variation(const Trajectory& traj) {
  require(traj.samples.size() >= 2, Errc::invalid_argument, "need at least two samples");
  if (!traj.dense.empty()) {
    return dense_variation(traj, 4, [](const DenseSegment& seg, double t) {
      const Vec q = seg.eval(t);
      const Vec v = seg.derivative(t);
      const double r = q.norm();
      return Scalar{t, r, r > 0.0 ? v.dot(q) / r : 0.0};
    });
  }
  double D = 0.0;
  for (std::size_t i = 0; i + 1 < traj.samples.size(); ++i)
    D += std::abs(traj.samples[i + 1].q.norm() - traj.samples[i].q.norm());
  return D;
}

double diag_singular_variation(const Trajectory& traj, const ConfigSpace& space, int subspace) {
  require(traj.samples.size() >= 2, Errc::invalid_argument, "need at least two samples");
  require(subspace >= 0 && subspace < static_cast<int>(space.singular.size()), Errc::invalid_argument,
          "no such singular subspace");
  const SingularSubspace& sub = space.singular[subspace];
  auto g = [&](const Vec& q) { return std::log(std::max(std::min(distance_to(sub, q), space.delta), kTiny)); };
  if (!traj.dense.empty()) {
    ConfigSpace only{space.dim, {sub}, space.delta};
    return dense_variation(traj, 4, [&](const DenseSegment& seg, double t) {
      const Vec q = seg.eval(t);
      const SingularDistance sd = singular_distance(only, q).front();
      double rate = 0.0;
      if (sd.dist < space.delta && sd.has_direction()) rate = -sd.direction.dot(Vec(seg.derivative(t))) / sd.dist;
      return Scalar{t, g(q), rate};
    });
  }
  double V = 0.0;
  for (std::size_t i = 0; i + 1 < traj.samples.size(); ++i)
    V += std::abs(g(traj.samples[i + 1].q) - g(traj.samples[i].q));
  return V;
}

Vec SCurve::at_time(double time) const {
  require(!dense.empty(), Errc::invalid_argument, "empty curve");
  require(time >= t.front() && time <= t.back(), Errc::out_of_domain, "time outside the curve");
  auto it = std::lower_bound(dense.begin(), dense.end(), time,
                             [](const DenseSegment& s, double x) { return s.eval(s.t1())(0) < x; });
  if (it == dense.end()) --it;
  double lo = it->t0, hi = it->t1();
  for (int i = 0; i < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++i) {
    const double mid = 0.5 * (lo + hi);
    (it->eval(mid)(0) < time ? lo : hi) = mid;
  }
  const State y = it->eval(0.5 * (lo + hi));
  return y.tail(y.size() - 1);
}

SCurve integrate_s_parameterized(const CurrentProvider& provider, const Vec& q0, double s_max,
                                 const IntegratorConfig& cfg, double t0, std::optional<double> t_max) {
  const int d = provider.dim();
  require(q0.size() == d, Errc::dimension_mismatch, "start point dimension");
  require(s_max > 0.0, Errc::invalid_argument, "s_max must be positive");
  const TimeWindow w = provider.window();
  require(w.contains(t0), Errc::provider_window, "start time outside the provider window");
  const double limit = std::min(t_max.value_or(w.t_max), w.t_max);
  const CurrentSample s0 = provider.current(t0, q0);
  require(!cfg.node_policy.is_node(provider, s0.j0), Errc::bad_start, "(t0, q0) is a node");

  const Rhs f = [&provider, w](double, const State& y) -> State {
    const double t = std::clamp(y(0), w.t_min, w.t_max);
    const CurrentSample s = provider.current(t, y.tail(y.size() - 1));
    State out(y.size());
    out(0) = s.j0;
    out.tail(y.size() - 1) = s.J;
    return out;
  };

  State y(d + 1);
  y(0) = t0;
  y.tail(d) = q0;
  SCurve curve;
  curve.s.push_back(0.0);
  curve.t.push_back(t0);
  curve.q.push_back(q0);

  double s = 0.0;
  State k1 = f(s, y);
  double h = dopri5_initial_step(f, s, y, k1, 1.0, cfg.rel_tol, cfg.abs_tol, std::min(cfg.max_step, s_max));
  long steps = 0;
  while (s < s_max && steps < cfg.max_steps) {
    h = std::min({h, cfg.max_step, s_max - s});
    const StepAttempt step = dopri5_step(f, s, y, k1, h, cfg.rel_tol, cfg.abs_tol);
    if (!step.finite || step.error > 1.0) {
      h = step.finite ? std::min(dopri5_next_step(h, step.error), h) : 0.25 * h;
      require(h > 1e-14 * std::max(1.0, s), Errc::node_encountered, "s-step collapsed");
      continue;
    }
    ++steps;
    const DenseSegment seg = step.dense();
    double s1 = s + h;
    State y1 = step.y1;
    if (y1(0) >= limit) {
      double lo = s, hi = s1;
      for (int i = 0; i < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++i) {
        const double mid = 0.5 * (lo + hi);
        (seg.eval(mid)(0) < limit ? lo : hi) = mid;
      }
      s1 = hi;
      y1 = seg.eval(s1);
      y1(0) = limit;
      curve.reached_limit = true;
    }
    curve.dense.push_back(seg);
    curve.step_sizes.push_back(s1 - s);
    curve.s.push_back(s1);
    curve.t.push_back(y1(0));
    curve.q.push_back(y1.tail(d));
    if (curve.reached_limit) break;
    s = s1;
    y = y1;
    k1 = step.k7;
    h = dopri5_next_step(h, step.error);
  }
  return curve;
}

double reverse_roundtrip(ProviderPtr provider, const Vec& q0, double T, const IntegratorConfig& cfg) {
  const ConfigSpace& space = provider->config_space();
  const Trajectory fwd = integrate(*provider, space, q0, T, cfg);
  require(fwd.status == TrajectoryStatus::completed, Errc::invalid_argument,
          "forward trajectory ended with " + std::string(to_string(fwd.status)));
  const ProviderPtr rev = time_reverse(provider);
  const Trajectory back = integrate(*rev, space, fwd.final_point(), 0.0, cfg, -T);
  require(back.status == TrajectoryStatus::completed, Errc::invalid_argument,
          "reversed trajectory ended with " + std::string(to_string(back.status)));
  return (back.final_point() - q0).norm();
}

}  // namespace bohm
