#include "doctest.h"
#include "oracles.hpp"

#include <bohm/bohm.hpp>

#include <cmath>

using namespace bohm;

namespace {

// Uniform flow j = (rho, rho v) with rho = 1 in any dimension.
ProviderPtr drift(const Vec& v, double t_max = 100.0) {
  return std::make_shared<FunctionProvider>(
      static_cast<int>(v.size()), [v](double, const Vec&) { return CurrentSample{1.0, v}; },
      TimeWindow{-t_max, t_max}, 1.0);
}

ConfigSpace point_at_origin(double delta) {
  return ConfigSpace{2, {SingularSubspace{make_vec({0, 0}), {make_vec({1, 0}), make_vec({0, 1})}}}, delta};
}

}  // namespace

TEST_CASE("dopri5 step") {
  const Rhs f = [](double, const State& y) -> State { return y; };
  State y(1);
  y << 1.0;

  SUBCASE("fifth-order local error") {
    std::vector<double> err;
    for (double h : {0.2, 0.1, 0.05}) {
      const StepAttempt s = dopri5_step(f, 0.0, y, f(0.0, y), h, 1e-6, 1e-6);
      err.push_back(std::abs(s.y1(0) - std::exp(h)));
    }
    CHECK(std::log2(err[0] / err[1]) > 5.5);
    CHECK(std::log2(err[1] / err[2]) > 5.5);
  }

  SUBCASE("dense output interpolates both ends") {
    const StepAttempt s = dopri5_step(f, 0.0, y, f(0.0, y), 0.3, 1e-6, 1e-6);
    const DenseSegment d = s.dense();
    CHECK(d.eval(0.0)(0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(d.eval(0.3)(0) == doctest::Approx(s.y1(0)).epsilon(1e-15));
    for (double t : {0.05, 0.15, 0.27}) {
      CHECK(std::abs(d.eval(t)(0) - std::exp(t)) < 1e-6);
      CHECK(std::abs(d.derivative(t)(0) - std::exp(t)) < 1e-5);
    }
  }

  SUBCASE("throwing right-hand side") {
    const Rhs bad = [](double t, const State& y) -> State {
      if (t > 0.05) throw Error(Errc::node_encountered, "test");
      return y;
    };
    const StepAttempt s = dopri5_step(bad, 0.0, y, y, 0.1, 1e-6, 1e-6);
    CHECK_FALSE(s.finite);
  }

  SUBCASE("controller") {
    CHECK(dopri5_next_step(1.0, 0.0) == doctest::Approx(5.0));
    CHECK(dopri5_next_step(1.0, 1e10) == doctest::Approx(0.2));
    CHECK(dopri5_next_step(1.0, 1.0) == doctest::Approx(0.9));
  }
}

TEST_CASE("integrate") {
  SUBCASE("stationary real state stays put") {
    auto sc = make_hydrogenic();
    auto p = build_provider(sc);
    const Trajectory tr = integrate(*p, sc->config_space(), make_vec({1.3}), 5.0);
    CHECK(tr.status == TrajectoryStatus::completed);
    CHECK(tr.final_point()(0) == 1.3);
    CHECK(tr.diagnostics.L == 0.0);
    CHECK(tr.diagnostics.D == 0.0);
  }

  SUBCASE("spreading gaussian") {
    auto sc = make_free_gaussian();
    auto p = build_provider(sc);
    IntegratorConfig cfg;
    cfg.keep_dense = true;
    for (double q0 : {-2.5, -0.3, 0.8, 3.0}) {
      const Trajectory tr = integrate(*p, sc->config_space(), make_vec({q0}), 1.0, cfg);
      REQUIRE(tr.status == TrajectoryStatus::completed);
      CHECK(tr.samples.front().t == 0.0);
      CHECK(tr.final_time() == 1.0);
      for (std::size_t i = 1; i < tr.samples.size(); ++i) CHECK(tr.samples[i].t > tr.samples[i - 1].t);
      for (double t = 0.0; t <= 1.0; t += 0.05)
        CHECK(tr.at(t)(0) == doctest::Approx(oracle::free_gaussian_Q(q0, t)).epsilon(1e-4));
    }
  }

  SUBCASE("node collision") {
    auto sc = make_oscillator_superposition();
    auto p = build_provider(sc);
    IntegratorConfig cfg;
    cfg.rel_tol = 1e-14;
    cfg.abs_tol = 1e-16;
    const Trajectory tr = integrate(*p, sc->config_space(), make_vec({oracle::oscillator_collision_start()}), 2.0, cfg);
    CHECK(tr.status == TrajectoryStatus::node_hit);
    REQUIRE(tr.tau_estimate);
    CHECK(std::abs(*tr.tau_estimate - oracle::pi / 2) < 1e-3);
    REQUIRE_FALSE(tr.events.empty());
    CHECK(tr.events.front().kind == EventKind::node);
  }

  SUBCASE("L grows as the node threshold tightens") {
    auto sc = make_oscillator_superposition();
    auto p = build_provider(sc);
    IntegratorConfig cfg;
    cfg.rel_tol = 1e-14;
    cfg.abs_tol = 1e-16;
    double last = 0.0;
    for (double eps : {1e-3, 1e-5, 1e-7, 1e-9}) {
      cfg.node_policy.epsilon_node = eps;
      const Trajectory tr =
          integrate(*p, sc->config_space(), make_vec({oracle::oscillator_collision_start()}), 2.0, cfg);
      CAPTURE(eps);
      CHECK(tr.status == TrajectoryStatus::node_hit);
      CHECK(tr.diagnostics.L > last + 0.9 * std::log(100.0));
      last = tr.diagnostics.L;
    }
  }

  SUBCASE("escape event") {
    auto p = drift(make_vec({1.0}));
    IntegratorConfig cfg;
    cfg.escape_radius = 2.0;
    const Trajectory tr = integrate(*p, ConfigSpace::free(1), make_vec({0.5}), 10.0, cfg);
    CHECK(tr.status == TrajectoryStatus::escaped);
    CHECK(*tr.tau_estimate == doctest::Approx(1.5).epsilon(1e-9));
  }

  SUBCASE("compound events are all reported") {
    // Escape radius and singular margin crossed in the same step.
    auto p = drift(make_vec({1.0, 0.0}));
    ConfigSpace space{2, {SingularSubspace{make_vec({2.0, 0.0}), {make_vec({1.0, 0.0})}}}, 1.0};
    IntegratorConfig cfg;
    cfg.escape_radius = 2.0 - 1e-3;
    cfg.singular_margin = 1e-3;
    const Trajectory tr = integrate(*p, space, make_vec({0.0, 0.0}), 10.0, cfg);
    CHECK(tr.status != TrajectoryStatus::completed);
    CHECK(tr.events.size() == 2);
  }

  SUBCASE("bad starts and windows") {
    auto sc = make_hydrogenic();
    auto p = build_provider(sc);
    try {
      integrate(*p, sc->config_space(), make_vec({1e-8}), 1.0);
      FAIL("expected bad start");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::bad_start);
    }
    try {
      integrate(*p, sc->config_space(), make_vec({1.0}), 100.0);
      FAIL("expected window error");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::provider_window);
    }
  }

  SUBCASE("determinism") {
    auto sc = make_coincidence();
    auto p = build_provider(sc);
    const Trajectory a = integrate(*p, sc->config_space(), make_vec({-3.0, 4.2}), 2.0);
    const Trajectory b = integrate(*p, sc->config_space(), make_vec({-3.0, 4.2}), 2.0);
    REQUIRE(a.samples.size() == b.samples.size());
    for (std::size_t i = 0; i < a.samples.size(); ++i) {
      CHECK(a.samples[i].t == b.samples[i].t);
      CHECK(a.samples[i].q == b.samples[i].q);
    }
    CHECK(a.diagnostics.L == b.diagnostics.L);
  }

  SUBCASE("completed paths stay above the node threshold") {
    auto sc = make_oscillator_superposition();
    auto p = build_provider(sc);
    for (double q0 : {-2.0, -0.5, 0.1, 1.0, 2.2}) {
      const Trajectory tr = integrate(*p, sc->config_space(), make_vec({q0}), 3.0);
      if (tr.status != TrajectoryStatus::completed) continue;
      for (const auto& s : tr.samples) CHECK(s.j0 >= IntegratorConfig{}.node_policy.threshold(*p));
    }
  }
}

TEST_CASE("dirac trajectories respect the light cone") {
  auto sc = make_dirac_packet(1.0, 2.0, 1.0);
  auto p = build_provider(sc);
  for (double q0 : {-2.0, -0.7, 0.0, 0.4, 1.9}) {
    const Trajectory tr = integrate(*p, sc->config_space(), make_vec({q0}), 2.0);
    for (std::size_t i = 1; i < tr.samples.size(); ++i) {
      const double dq = std::abs(tr.samples[i].q(0) - tr.samples[i - 1].q(0));
      CHECK(dq <= (tr.samples[i].t - tr.samples[i - 1].t) * (1.0 + 1e-9));
    }
  }
}

TEST_CASE("diagnostics") {
  SUBCASE("density decay at the centre") {
    auto p = build_provider(make_free_gaussian());
    IntegratorConfig cfg;
    cfg.keep_dense = true;
    const Trajectory tr = integrate(*p, ConfigSpace::free(1), make_vec({0.0}), 2.0, cfg);
    const double expect =
        std::log(oracle::free_gaussian_center_density(0.0) / oracle::free_gaussian_center_density(2.0));
    CHECK(tr.diagnostics.L == doctest::Approx(expect).epsilon(1e-8));
    CHECK(diag_log_density_variation(tr, *p) == doctest::Approx(expect).epsilon(1e-8));
    // Without the continuous extension only a midpoint rule over the accepted steps is available.
    const Trajectory coarse = integrate(*p, ConfigSpace::free(1), make_vec({0.0}), 2.0);
    CHECK(diag_log_density_variation(coarse, *p) == doctest::Approx(expect).epsilon(0.1));
    CHECK(tr.diagnostics.D == 0.0);
  }

  SUBCASE("monotone outward path telescopes") {
    auto p = build_provider(make_free_gaussian());
    const Trajectory tr = integrate(*p, ConfigSpace::free(1), make_vec({1.2}), 2.0);
    const double expect = tr.final_point()(0) - 1.2;
    CHECK(tr.diagnostics.D == doctest::Approx(expect).epsilon(1e-10));
    CHECK(diag_path_variation(tr) == doctest::Approx(expect).epsilon(1e-10));
  }

  SUBCASE("additive over concatenated intervals") {
    auto sc = make_oscillator_coherent();
    auto p = build_provider(sc);
    const Trajectory whole = integrate(*p, sc->config_space(), make_vec({0.4}), 4.0);
    const Trajectory first = integrate(*p, sc->config_space(), make_vec({0.4}), 2.0);
    const Trajectory second = integrate(*p, sc->config_space(), first.final_point(), 4.0, {}, 2.0);
    CHECK(first.diagnostics.L + second.diagnostics.L == doctest::Approx(whole.diagnostics.L).epsilon(1e-6));
    CHECK(first.diagnostics.D + second.diagnostics.D == doctest::Approx(whole.diagnostics.D).epsilon(1e-6));
  }

  SUBCASE("straight fly-by of a point") {
    // dist = sqrt(x^2 + a^2) falls from delta to a and rises back: V = 2 log(delta / a).
    const double a = 0.05, delta = 1.0;
    auto p = drift(make_vec({1.0, 0.0}));
    const ConfigSpace space = point_at_origin(delta);
    IntegratorConfig cfg;
    cfg.keep_dense = true;
    const Trajectory tr = integrate(*p, space, make_vec({-3.0, a}), 6.0, cfg);
    REQUIRE(tr.status == TrajectoryStatus::completed);
    CHECK(tr.diagnostics.V_per_subspace.at(0) == doctest::Approx(2.0 * std::log(delta / a)).epsilon(1e-8));
    CHECK(diag_singular_variation(tr, space, 0) == doctest::Approx(2.0 * std::log(delta / a)).epsilon(1e-3));

    const Trajectory far = integrate(*p, space, make_vec({-3.0, 2.0}), 6.0);
    CHECK(far.diagnostics.V_per_subspace.at(0) == 0.0);
  }

  SUBCASE("head-on approach grows like log(delta / margin)") {
    auto p = drift(make_vec({1.0, 0.0}));
    const ConfigSpace space = point_at_origin(1.0);
    for (double m : {1e-2, 1e-4, 1e-6}) {
      IntegratorConfig cfg;
      cfg.singular_margin = m;
      const Trajectory tr = integrate(*p, space, make_vec({-2.0, 0.0}), 5.0, cfg);
      CHECK(tr.status == TrajectoryStatus::singular_hit);
      // Event times resolve to 1e-10 relative, i.e. a relative error of ~1e-10 / m in dist.
      CHECK(tr.diagnostics.V_per_subspace.at(0) == doctest::Approx(std::log(1.0 / m)).epsilon(1e-4));
      CHECK(*tr.tau_estimate == doctest::Approx(2.0 - m).epsilon(1e-9));
    }
  }
}

TEST_CASE("s-parameterized integral curves") {
  SUBCASE("agree with the time parameterization") {
    auto sc = make_free_gaussian();
    auto p = build_provider(sc);
    IntegratorConfig cfg;
    cfg.keep_dense = true;
    const Vec q0 = make_vec({0.7});
    const Trajectory tr = integrate(*p, sc->config_space(), q0, 1.0, cfg);
    const SCurve c = integrate_s_parameterized(*p, q0, 100.0, cfg, 0.0, 1.0);
    CHECK(c.reached_limit);
    for (std::size_t i = 1; i < c.t.size(); ++i) CHECK(c.t[i] > c.t[i - 1]);
    for (int i = 1; i <= 20; ++i) {
      const double t = i / 20.0;
      CHECK(std::abs(c.at_time(t)(0) - tr.at(t)(0)) < 1e-6);
    }
  }

  SUBCASE("regular in s near a node") {
    auto sc = make_oscillator_superposition();
    auto p = build_provider(sc);
    const Vec q0 = make_vec({oracle::oscillator_collision_start()});
    IntegratorConfig cfg;
    const Trajectory tr = integrate(*p, sc->config_space(), q0, 1.6, cfg);
    double min_t_step = 1.0;
    for (std::size_t i = 1; i < tr.samples.size(); ++i)
      min_t_step = std::min(min_t_step, tr.samples[i].t - tr.samples[i - 1].t);

    IntegratorConfig scfg;
    scfg.max_step = 0.05;
    const SCurve c = integrate_s_parameterized(*p, q0, 40.0, scfg, 0.0, 1.6);
    const double min_s_step = *std::min_element(c.step_sizes.begin(), c.step_sizes.end() - 1);
    CHECK(min_s_step >= 0.1 * scfg.max_step);
    CHECK(min_t_step < 1e-3);
  }

  SUBCASE("node start") {
    auto p = build_provider(make_oscillator_superposition());
    CHECK_THROWS_AS(integrate_s_parameterized(*p, make_vec({oracle::oscillator_node()}), 1.0, {}, oracle::pi / 2), Error);
  }
}

TEST_CASE("time reversal round trip") {
  SUBCASE("analytic gaussian") {
    auto p = build_provider(make_free_gaussian({.dim = 1, .sigma = 1.0, .center = {}, .momentum = {0.6}}));
    CHECK(reverse_roundtrip(p, make_vec({0.9}), 1.5) <= 1e-6);
  }

  SUBCASE("zero velocity") {
    auto p = build_provider(make_hydrogenic());
    CHECK(reverse_roundtrip(p, make_vec({0.9}), 1.5) == 0.0);
  }

  SUBCASE("tolerance ladder") {
    auto p = build_provider(make_oscillator_coherent());
    double last = 1.0;
    for (double rt : {1e-5, 1e-6, 1e-7, 1e-8}) {
      IntegratorConfig cfg;
      cfg.rel_tol = rt;
      cfg.abs_tol = rt * 1e-2;
      const double dev = reverse_roundtrip(p, make_vec({0.3}), 3.0, cfg);
      CAPTURE(rt);
      CHECK(dev < last);
      last = dev;
    }
  }
}
