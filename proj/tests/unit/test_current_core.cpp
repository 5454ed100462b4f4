#include "doctest.h"
#include "oracles.hpp"

#include <bohm/bohm.hpp>

#include <cmath>
#include <random>

using namespace bohm;

namespace {

ProviderPtr constant_provider(int dim, double j0, const Vec& J, double t_max = 1.0) {
  return std::make_shared<FunctionProvider>(
      dim, [j0, J](double, const Vec&) { return CurrentSample{j0, J}; }, TimeWindow{-t_max, t_max}, j0);
}

SpinorField plane_wave_field(double k, int points = 64) {
  const double L = 2.0 * oracle::pi * 4.0 / k;
  const GridSpec g = GridSpec::uniform(1, points, 0.5 * L);
  return SpinorField::sample(g, 1, [k](const Vec& q, Complex* out) { out[0] = std::polar(1.0, k * q(0)); });
}

}  // namespace

TEST_CASE("grid spec layout") {
  const GridSpec g = GridSpec::uniform(2, 8, 2.0);
  CHECK(g.size() == 64);
  CHECK(g.spacing(0) == doctest::Approx(0.5));
  CHECK(g.cell_volume() == doctest::Approx(0.25));
  CHECK(g.stride(0) == 8);
  CHECK(g.stride(1) == 1);
  const Vec n = g.node(9);
  CHECK(n(0) == doctest::Approx(-1.5));
  CHECK(n(1) == doctest::Approx(-1.5));
  CHECK(g.unflatten(9) == std::vector<int>{1, 1});

  CHECK_THROWS_AS(GridSpec::uniform(1, 2, 1.0), Error);
}

TEST_CASE("singular distance") {
  SUBCASE("coincidence line in the plane") {
    const double r = 1.0 / std::sqrt(2.0);
    ConfigSpace space{2, {SingularSubspace{make_vec({0.0, 0.0}), {make_vec({r, -r})}}}, 1.0};
    const auto d = singular_distance(space, make_vec({0.0, 1.0}), true);
    REQUIRE(d.size() == 1);
    CHECK(d[0].dist == doctest::Approx(r));
    CHECK(d[0].direction(0) == doctest::Approx(r));
    CHECK(d[0].direction(1) == doctest::Approx(-r));

    const auto on = singular_distance(space, make_vec({0.3, 0.3}));
    CHECK(on[0].dist == 0.0);
    CHECK_FALSE(on[0].has_direction());
    CHECK_THROWS_AS(singular_distance(space, make_vec({0.3, 0.3}), true), Error);
  }

  SUBCASE("line in three dimensions") {
    ConfigSpace space{3, {SingularSubspace{make_vec({0, 0, 0}), {make_vec({1, 0, 0}), make_vec({0, 1, 0})}}}, 1.0};
    const auto d = singular_distance(space, make_vec({3, 4, 7}), true);
    CHECK(d[0].dist == doctest::Approx(5.0));
    CHECK(d[0].direction(0) == doctest::Approx(-0.6));
    CHECK(d[0].direction(1) == doctest::Approx(-0.8));
    CHECK(d[0].direction(2) == doctest::Approx(0.0));
  }

  SUBCASE("direction is minus the gradient of the distance") {
    const double r = 1.0 / std::sqrt(2.0);
    ConfigSpace space{2, {SingularSubspace{make_vec({0.5, -0.2}), {make_vec({r, r})}}}, 1.0};
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int i = 0; i < 20; ++i) {
      const Vec q = make_vec({u(rng), u(rng)});
      const auto d = singular_distance(space, q, true);
      const double h = 1e-6;
      Vec grad(2);
      for (int a = 0; a < 2; ++a) {
        Vec p = q, m = q;
        p(a) += h;
        m(a) -= h;
        grad(a) = (distance_to(space.singular[0], p) - distance_to(space.singular[0], m)) / (2 * h);
      }
      CHECK(d[0].direction.dot(grad) == doctest::Approx(-1.0).epsilon(1e-6));
    }
  }

  SUBCASE("non-orthonormal normals are rejected") {
    SingularSubspace s{make_vec({0, 0}), {make_vec({1, 0}), make_vec({1, 1})}};
    CHECK_THROWS_AS(s.validate(2), Error);
  }
}

TEST_CASE("schrodinger current of a plane wave") {
  const SpinorField psi = plane_wave_field(2.0);
  const auto grad = spectral_gradient(psi);
  const CurrentField j = schrodinger_current(psi, grad, {}, {1.0}, {0.0});
  for (std::size_t p = 0; p < psi.points(); ++p) {
    CHECK(j.j0[p] == doctest::Approx(1.0));
    CHECK(j.J.at(p, 0) == doctest::Approx(2.0).epsilon(1e-12));
  }

  SUBCASE("minimal coupling cancels the phase gradient") {
    const VectorField A = VectorField::uniform(psi.grid, make_vec({1.0}));
    const CurrentField c = schrodinger_current(psi, grad, A, {1.0}, {2.0});
    for (std::size_t p = 0; p < psi.points(); ++p) CHECK(std::abs(c.J.at(p, 0)) < 1e-12);
  }

  SUBCASE("mass divides the current") {
    const CurrentField c = schrodinger_current(psi, grad, {}, {4.0}, {0.0});
    CHECK(c.J.at(3, 0) == doctest::Approx(0.5));
  }

  SUBCASE("shape mismatch") {
    auto bad = grad;
    bad.push_back(grad[0]);
    CHECK_THROWS_AS(schrodinger_current(psi, bad, {}, {1.0}, {0.0}), Error);
  }
}

TEST_CASE("real gaussian carries no current") {
  const GridSpec g = GridSpec::uniform(1, 128, 10.0);
  const SpinorField psi =
      SpinorField::sample(g, 1, [](const Vec& q, Complex* out) { out[0] = std::exp(-0.5 * q(0) * q(0)); });
  const CurrentField j = schrodinger_current(psi, spectral_gradient(psi), {}, {1.0}, {0.0});
  for (std::size_t p = 0; p < psi.points(); ++p) {
    CHECK(std::abs(j.J.at(p, 0)) < 1e-15);
    CHECK(j.j0[p] == doctest::Approx(std::exp(-g.node(p)(0) * g.node(p)(0))));
  }
}

TEST_CASE("dirac current") {
  const GridSpec g = GridSpec::uniform(1, 8, 1.0);
  const std::vector<CMatrix> alpha{pauli(0)};
  auto constant = [&](Complex a, Complex b) {
    return SpinorField::sample(g, 2, [=](const Vec&, Complex* out) {
      out[0] = a;
      out[1] = b;
    });
  };

  const CurrentField basis = dirac_current(constant(1.0, 0.0), alpha, 1.0);
  CHECK(basis.j0[0] == doctest::Approx(1.0));
  CHECK(basis.J.at(0, 0) == doctest::Approx(0.0));

  const double r = 1.0 / std::sqrt(2.0);
  const CurrentField eigen = dirac_current(constant(r, r), alpha, 3.0);
  CHECK(eigen.j0[0] == doctest::Approx(1.0));
  CHECK(eigen.J.at(0, 0) == doctest::Approx(3.0));

  const CurrentField zero = dirac_current(constant(0.0, 0.0), alpha, 1.0);
  CHECK(zero.j0[0] == 0.0);
  CHECK(zero.J.at(0, 0) == 0.0);

  SUBCASE("light-cone bound on random spinors") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> n;
    const SpinorField psi = SpinorField::sample(GridSpec::uniform(1, 256, 5.0), 2, [&](const Vec&, Complex* out) {
      out[0] = {n(rng), n(rng)};
      out[1] = {n(rng), n(rng)};
    });
    const CurrentField j = dirac_current(psi, alpha, 2.0);
    for (std::size_t p = 0; p < psi.points(); ++p)
      CHECK(std::abs(j.J.at(p, 0)) <= 2.0 * j.j0[p] * (1.0 + 1e-12));
  }
}

TEST_CASE("velocity") {
  SUBCASE("plane wave moves at k") {
    auto p = build_provider(make_plane_wave(1.0));
    for (double q : {-3.0, 0.0, 2.5}) CHECK(velocity(*p, {}, 0.3, make_vec({q}))(0) == doctest::Approx(1.0));
  }

  SUBCASE("real wavefunction is at rest") {
    auto p = build_provider(make_hydrogenic(1.0));
    CHECK(velocity(*p, {}, 0.0, make_vec({0.7}))(0) == 0.0);
  }

  SUBCASE("dirac eigen-spinor moves at c") {
    auto p = constant_provider(1, 1.0, make_vec({1.0}));
    CHECK(velocity(*p, {}, 0.0, make_vec({0.0}))(0) == doctest::Approx(1.0));
  }

  SUBCASE("homogeneous of degree zero") {
    auto a = constant_provider(2, 0.3, make_vec({0.1, -0.2}));
    auto b = constant_provider(2, 0.3 * 17.0, make_vec({0.1 * 17.0, -0.2 * 17.0}));
    const Vec va = velocity(*a, {}, 0.0, make_vec({0, 0}));
    const Vec vb = velocity(*b, {}, 0.0, make_vec({0, 0}));
    CHECK((va - vb).norm() < 1e-15);
  }

  SUBCASE("node and window errors") {
    auto p = std::make_shared<FunctionProvider>(
        1, [](double, const Vec& q) { return CurrentSample{q(0) * q(0), make_vec({0.0})}; }, TimeWindow{0, 1}, 1.0);
    try {
      velocity(*p, {}, 0.5, make_vec({1e-6}));
      FAIL("expected a node");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::node_encountered);
    }
    try {
      velocity(*p, {}, 2.0, make_vec({1.0}));
      FAIL("expected out of window");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::out_of_domain);
    }
  }
}

TEST_CASE("time reversal") {
  auto p = build_provider(make_free_gaussian({.dim = 1, .sigma = 1.0, .center = {}, .momentum = {0.8}}));
  auto r = time_reverse(p);
  CHECK(r->window().t_min == doctest::Approx(-p->window().t_max));
  for (double t : {0.0, 0.25, 0.9})
    for (double q : {-1.0, 0.4}) {
      const auto a = p->current(t, make_vec({q}));
      const auto b = r->current(-t, make_vec({q}));
      CHECK(b.j0 == a.j0);
      CHECK(b.J(0) == -a.J(0));
      CHECK(velocity(*r, {}, -t, make_vec({q}))(0) == doctest::Approx(-velocity(*p, {}, t, make_vec({q}))(0)));
    }

  auto rr = time_reverse(r);
  const auto a = p->current(0.6, make_vec({0.2}));
  const auto b = rr->current(0.6, make_vec({0.2}));
  CHECK(a.j0 == b.j0);
  CHECK(a.J(0) == b.J(0));

  auto plane = build_provider(make_plane_wave(2.0));
  auto back = time_reverse(plane);
  const auto fwd = plane->current(0.0, make_vec({0.1}));
  CHECK(back->current(0.0, make_vec({0.1})).J(0) == doctest::Approx(-fwd.J(0)));
  CHECK(fwd.J(0) == doctest::Approx(2.0 * fwd.j0));
}

TEST_CASE("divergence residual") {
  SUBCASE("static field") {
    auto p = constant_provider(1, 0.5, make_vec({0.0}));
    const auto r = divergence_residual(*p, 0.0, GridSpec::uniform(1, 16, 1.0), 0.01, 0.01);
    for (double v : r) CHECK(v == 0.0);
  }

  SUBCASE("free gaussian converges") {
    auto p = build_provider(make_free_gaussian({.dim = 1, .sigma = 1.0, .center = {}, .momentum = {0.5}}));
    const GridSpec region = GridSpec::uniform(1, 32, 3.0);
    auto worst = [&](double h) {
      double m = 0.0;
      for (double v : divergence_residual(*p, 0.5, region, h, h)) m = std::max(m, std::abs(v));
      return m;
    };
    const double a = worst(0.1), b = worst(0.05), c = worst(0.025);
    CHECK(std::log2(a / b) >= 1.5);
    CHECK(std::log2(b / c) >= 1.5);
  }
}

TEST_CASE("axiom validation") {
  const GridSpec g = GridSpec::uniform(1, 256, 10.0);

  SUBCASE("free gaussian passes") {
    auto sc = make_free_gaussian();
    CHECK_NOTHROW(validate_axioms(*build_provider(sc), sc->recommended_grid()));
  }

  SUBCASE("current without density is rejected as positivity") {
    FunctionProvider bad(1, [](double, const Vec&) { return CurrentSample{0.0, make_vec({1.0})}; }, {0, 1}, 1.0);
    try {
      validate_axioms(bad, g);
      FAIL("expected violation");
    } catch (const AxiomViolation& e) {
      CHECK(e.axiom() == Axiom::positivity);
    }
  }

  SUBCASE("wrong mass is rejected as normalization") {
    FunctionProvider bad(
        1, [](double, const Vec& q) { return CurrentSample{2.0 * std::exp(-q(0) * q(0)) / std::sqrt(oracle::pi), make_vec({0.0})}; },
        {0, 1}, 1.0);
    try {
      validate_axioms(bad, g);
      FAIL("expected violation");
    } catch (const AxiomViolation& e) {
      CHECK(e.axiom() == Axiom::normalization);
    }
  }

  SUBCASE("non-finite values are rejected as smoothness") {
    FunctionProvider bad(1, [](double, const Vec&) { return CurrentSample{NAN, make_vec({0.0})}; }, {0, 1}, 1.0);
    CHECK_THROWS_AS(validate_axioms(bad, g), AxiomViolation);
  }

  SUBCASE("reversal keeps unit mass") {
    auto sc = make_free_gaussian();
    CHECK_NOTHROW(validate_axioms(*time_reverse(build_provider(sc)), sc->recommended_grid()));
  }
}

TEST_CASE("mass and density scale") {
  auto p = build_provider(make_free_gaussian());
  const GridSpec g = GridSpec::uniform(1, 512, 12.0);
  CHECK(total_mass(*p, g, 0.7) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(max_density(*p, g, 1.0) == doctest::Approx(oracle::free_gaussian_center_density(1.0)).epsilon(1e-10));
  CHECK(p->density_scale() == doctest::Approx(oracle::free_gaussian_center_density(0.0)).epsilon(1e-10));
}
