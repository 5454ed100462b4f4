#include "bohm/scenario.hpp"

#include <cmath>
#include <numbers>

namespace bohm {

namespace {

constexpr Complex I{0.0, 1.0};
constexpr double kPi = std::numbers::pi;

int pow2_at_least(double n) {
  int p = 16;
  while (p < n) p *= 2;
  return p;
}

// Free 1D Gaussian packet, exact solution of i hbar psi_t = -hbar^2/(2m) psi_xx.
struct Gauss1D {
  double sigma = 1.0, x0 = 0.0, k0 = 0.0, mass = 1.0, hbar = 1.0;

  double v() const { return hbar * k0 / mass; }
  double omega() const { return hbar * k0 * k0 / (2.0 * mass); }
  Complex a(double t) const { return 1.0 + I * hbar * t / (2.0 * mass * sigma * sigma); }
  Complex da() const { return I * hbar / (2.0 * mass * sigma * sigma); }

  Complex value(double t, double x) const {
    const double u = x - x0 - v() * t;
    const Complex at = a(t);
    return std::pow(2.0 * kPi * sigma * sigma, -0.25) / std::sqrt(at) *
           std::exp(-u * u / (4.0 * sigma * sigma * at) + I * k0 * (x - x0) - I * omega() * t);
  }
  // d/dx log psi
  Complex dlog_dx(double t, double x) const {
    const double u = x - x0 - v() * t;
    return -u / (2.0 * sigma * sigma * a(t)) + I * k0;
  }
  Complex dlog_dt(double t, double x) const {
    const double u = x - x0 - v() * t;
    const Complex at = a(t);
    const double s2 = sigma * sigma;
    return -0.5 * da() / at + u * v() / (2.0 * s2 * at) + u * u * da() / (4.0 * s2 * at * at) -
           I * omega();
  }
  double width(double t) const { return sigma * std::abs(a(t)); }
  double trajectory(double q0, double t) const { return x0 + v() * t + (q0 - x0) * std::abs(a(t)); }
};

Spinor scalar(Complex z) {
  Spinor s(1);
  s(0) = z;
  return s;
}

void check_dim(const Vec& q, int dim) {
  require(q.size() == dim, Errc::dimension_mismatch,
          "point has " + std::to_string(q.size()) + " coordinates, scenario expects " + std::to_string(dim));
}

class FreeGaussian final : public Scenario {
 public:
  explicit FreeGaussian(FreeGaussianParams p) : p_(std::move(p)) {
    require(p_.dim >= 1 && p_.dim <= 2, Errc::invalid_argument, "free Gaussian supports d = 1 or 2");
    require(p_.sigma > 0 && p_.mass > 0 && p_.hbar > 0, Errc::invalid_argument, "sigma, mass, hbar must be positive");
    p_.center.resize(p_.dim, 0.0);
    p_.momentum.resize(p_.dim, 0.0);
    for (int a = 0; a < p_.dim; ++a)
      axes_.push_back(Gauss1D{p_.sigma, p_.center[a], p_.momentum[a] / p_.hbar, p_.mass, p_.hbar});
  }

  std::string name() const override { return p_.dim == 1 ? "free_gaussian" : "free_gaussian_2d"; }
  int dim() const override { return p_.dim; }

  Spinor psi(double t, const Vec& q) const override {
    check_dim(q, p_.dim);
    Complex z = 1.0;
    for (int a = 0; a < p_.dim; ++a) z *= axes_[a].value(t, q(a));
    return scalar(z);
  }
  Spinor dpsi_dq(double t, const Vec& q, int axis) const override {
    return psi(t, q) * axes_[axis].dlog_dx(t, q(axis));
  }
  Spinor dpsi_dt(double t, const Vec& q) const override {
    Complex d = 0.0;
    for (int a = 0; a < p_.dim; ++a) d += axes_[a].dlog_dt(t, q(a));
    return psi(t, q) * d;
  }
  CurrentLaw law() const override { return CurrentLaw::schrodinger(p_.dim, p_.mass, p_.hbar); }

  GridSpec recommended_grid() const override {
    const double T = horizon().t_max;
    double extent = 0.0;
    for (const auto& g : axes_) extent = std::max(extent, std::abs(g.x0) + std::abs(g.v()) * T + 12.0 * g.width(T));
    extent = std::ceil(extent);
    // Resolve both sigma and the largest local wavenumber at the horizon.
    double kmax = 0.0;
    for (const auto& g : axes_) {
      const double tau = std::imag(g.a(T));
      kmax = std::max(kmax, std::abs(g.k0) + extent * tau / (2.0 * p_.sigma * p_.sigma * std::norm(g.a(T))));
    }
    const double h = std::min(p_.sigma / 4.0, kPi / (2.0 * kmax + 1e-300));
    return GridSpec::uniform(p_.dim, pow2_at_least(2.0 * extent / h), extent);
  }
  TimeWindow horizon() const override { return {-5.0, 5.0}; }

  std::optional<Vec> trajectory(const Vec& q0, double t) const override {
    check_dim(q0, p_.dim);
    Vec q(p_.dim);
    for (int a = 0; a < p_.dim; ++a) q(a) = axes_[a].trajectory(q0(a), t);
    return q;
  }

 private:
  FreeGaussianParams p_;
  std::vector<Gauss1D> axes_;
};

class OscillatorSuperposition final : public Scenario {
 public:
  explicit OscillatorSuperposition(double omega) : w_(omega) {
    require(omega > 0, Errc::invalid_argument, "omega must be positive");
  }
  std::string name() const override { return "oscillator_superposition"; }
  int dim() const override { return 1; }

  Spinor psi(double t, const Vec& q) const override {
    check_dim(q, 1);
    const auto [p0, p2] = phis(q(0));
    return scalar((p0 * e(0.5, t) + p2 * e(2.5, t)) / std::numbers::sqrt2);
  }
  Spinor dpsi_dq(double t, const Vec& q, int) const override {
    const double x = q(0);
    const double g = norm_ * std::exp(-0.5 * w_ * x * x);
    const double d0 = -w_ * x * g;
    const double d2 = g * w_ * x * (5.0 - 2.0 * w_ * x * x) / std::numbers::sqrt2;
    return scalar((d0 * e(0.5, t) + d2 * e(2.5, t)) / std::numbers::sqrt2);
  }
  Spinor dpsi_dt(double t, const Vec& q) const override {
    const auto [p0, p2] = phis(q(0));
    return scalar(-I * w_ * (0.5 * p0 * e(0.5, t) + 2.5 * p2 * e(2.5, t)) / std::numbers::sqrt2);
  }
  double potential(const Vec& q) const override { return 0.5 * w_ * w_ * q.squaredNorm(); }

  GridSpec recommended_grid() const override {
    return GridSpec::uniform(1, 512, std::ceil(10.0 / std::sqrt(w_)));
  }
  TimeWindow horizon() const override { return {-100.0, 100.0}; }

 private:
  std::pair<double, double> phis(double x) const {
    const double xi2 = w_ * x * x;
    const double g = norm_ * std::exp(-0.5 * xi2);
    return {g, g * (2.0 * xi2 - 1.0) / std::numbers::sqrt2};
  }
  Complex e(double n, double t) const { return std::exp(-I * n * w_ * t); }

  double w_;
  double norm_ = std::pow(w_ / kPi, 0.25);
};

class OscillatorCoherent final : public Scenario {
 public:
  OscillatorCoherent(double omega, double d) : w_(omega), d_(d) {
    require(omega > 0, Errc::invalid_argument, "omega must be positive");
  }
  std::string name() const override { return "oscillator_coherent"; }
  int dim() const override { return 1; }

  Spinor psi(double t, const Vec& q) const override {
    check_dim(q, 1);
    const double x = q(0), xc = xc_(t), pc = pc_(t);
    return scalar(std::pow(w_ / kPi, 0.25) *
                  std::exp(-0.5 * w_ * (x - xc) * (x - xc) + I * pc * x - 0.5 * I * pc * xc - 0.5 * I * w_ * t));
  }
  Spinor dpsi_dq(double t, const Vec& q, int) const override {
    return psi(t, q) * (-w_ * (q(0) - xc_(t)) + I * pc_(t));
  }
  Spinor dpsi_dt(double t, const Vec& q) const override {
    const double x = q(0), xc = xc_(t), pc = pc_(t);
    const double dpc = -w_ * w_ * xc;
    const Complex d = w_ * (x - xc) * pc + I * dpc * x - 0.5 * I * (dpc * xc + pc * pc) - 0.5 * I * w_;
    return psi(t, q) * d;
  }
  double potential(const Vec& q) const override { return 0.5 * w_ * w_ * q.squaredNorm(); }

  GridSpec recommended_grid() const override {
    return GridSpec::uniform(1, 256, std::ceil(std::abs(d_) + 10.0 / std::sqrt(w_)));
  }
  TimeWindow horizon() const override { return {-100.0, 100.0}; }
  std::optional<Vec> trajectory(const Vec& q0, double t) const override {
    check_dim(q0, 1);
    return make_vec({q0(0) + xc_(t) - d_});
  }

 private:
  double xc_(double t) const { return d_ * std::cos(w_ * t); }
  double pc_(double t) const { return -w_ * d_ * std::sin(w_ * t); }
  double w_, d_;
};

class Hydrogenic final : public Scenario {
 public:
  explicit Hydrogenic(double lambda) : l_(lambda) {
    require(lambda > 0, Errc::invalid_argument, "lambda must be positive");
    SingularSubspace origin{make_vec({0.0}), {make_vec({1.0})}};
    space_ = ConfigSpace{1, {origin}, 1.0};
  }
  std::string name() const override { return "hydrogenic"; }
  int dim() const override { return 1; }

  Spinor psi(double t, const Vec& q) const override {
    check_dim(q, 1);
    return scalar(std::sqrt(l_) * std::exp(-l_ * std::abs(q(0))) * std::exp(0.5 * I * l_ * l_ * t));
  }
  Spinor dpsi_dq(double t, const Vec& q, int) const override {
    const double x = q(0);
    const double sign = x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0);
    return psi(t, q) * (-l_ * sign);
  }
  Spinor dpsi_dt(double t, const Vec& q) const override { return psi(t, q) * (0.5 * I * l_ * l_); }
  HamiltonianSpec hamiltonian(const GridSpec&) const override {
    throw Error(Errc::unsupported_field, "hydrogenic point interaction has no grid Hamiltonian");
  }

  // The cusp needs a fine grid for the rectangle rule to reach 1e-6.
  GridSpec recommended_grid() const override { return GridSpec::uniform(1, 32768, std::ceil(24.0 / l_)); }
  TimeWindow horizon() const override { return {-50.0, 50.0}; }
  ConfigSpace config_space() const override { return space_; }
  bool stationary() const override { return true; }
  std::optional<Vec> trajectory(const Vec& q0, double) const override { return q0; }

 private:
  double l_;
  ConfigSpace space_;
};

class PlaneWave final : public Scenario {
 public:
  PlaneWave(double k, int wavelengths) : k_(k) {
    require(k != 0 && wavelengths >= 1, Errc::invalid_argument, "plane wave needs k != 0 and whole wavelengths");
    half_ = kPi * wavelengths / std::abs(k);
  }
  std::string name() const override { return "plane_wave"; }
  int dim() const override { return 1; }

  Spinor psi(double t, const Vec& q) const override {
    check_dim(q, 1);
    return scalar(std::exp(I * (k_ * q(0) - 0.5 * k_ * k_ * t)) / std::sqrt(2.0 * half_));
  }
  Spinor dpsi_dq(double t, const Vec& q, int) const override { return psi(t, q) * (I * k_); }
  Spinor dpsi_dt(double t, const Vec& q) const override { return psi(t, q) * (-0.5 * I * k_ * k_); }

  GridSpec recommended_grid() const override { return GridSpec::uniform(1, 256, half_); }
  TimeWindow horizon() const override { return {-10.0, 10.0}; }
  std::optional<Vec> trajectory(const Vec& q0, double t) const override {
    check_dim(q0, 1);
    return make_vec({q0(0) + k_ * t});
  }

 private:
  double k_;
  double half_;
};

class DiracPacket final : public Scenario {
 public:
  DiracPacket(double sigma, double k0, double c) : s_(sigma), k0_(k0), c_(c) {
    require(sigma > 0 && c > 0, Errc::invalid_argument, "sigma and c must be positive");
  }
  std::string name() const override { return "dirac_packet"; }
  int dim() const override { return 1; }
  int components() const override { return 2; }

  Spinor psi(double t, const Vec& q) const override {
    check_dim(q, 1);
    const Complex f = profile(q(0) - c_ * t) / std::numbers::sqrt2;
    Spinor s(2);
    s << f, f;
    return s;
  }
  Spinor dpsi_dq(double t, const Vec& q, int) const override {
    const double u = q(0) - c_ * t;
    return psi(t, q) * (-u / (2.0 * s_ * s_) + I * k0_);
  }
  Spinor dpsi_dt(double t, const Vec& q) const override { return -c_ * dpsi_dq(t, q, 0); }
  CurrentLaw law() const override { return CurrentLaw::dirac_1d(c_); }
  HamiltonianSpec hamiltonian(const GridSpec& grid) const override {
    HamiltonianSpec h;
    h.kind = HamiltonianKind::dirac1d;
    h.k = 2;
    h.dirac_mass = 0.0;
    h.c = c_;
    h.validate(grid);
    return h;
  }

  GridSpec recommended_grid() const override { return GridSpec::uniform(1, 1024, 30.0 * s_); }
  TimeWindow horizon() const override { return {-5.0, 5.0}; }
  std::optional<Vec> trajectory(const Vec& q0, double t) const override {
    check_dim(q0, 1);
    return make_vec({q0(0) + c_ * t});
  }

 private:
  Complex profile(double u) const {
    return std::pow(2.0 * kPi * s_ * s_, -0.25) * std::exp(-u * u / (4.0 * s_ * s_) + I * k0_ * u);
  }
  double s_, k0_, c_;
};

class Coincidence final : public Scenario {
 public:
  Coincidence(double separation, double momentum, double sigma)
      : a_{sigma, -0.5 * separation, momentum}, b_{sigma, 0.5 * separation, -momentum} {
    require(sigma > 0, Errc::invalid_argument, "sigma must be positive");
    const double dx = separation, dk = 2.0 * momentum;
    const double overlap2 = std::exp(-dx * dx / (4.0 * sigma * sigma) - sigma * sigma * dk * dk);
    require(overlap2 < 1.0, Errc::invalid_argument, "identical packets cannot be antisymmetrized");
    norm_ = 1.0 / std::sqrt(2.0 * (1.0 - overlap2));
    const double r = 1.0 / std::numbers::sqrt2;
    space_ = ConfigSpace{2, {SingularSubspace{make_vec({0.0, 0.0}), {make_vec({r, -r})}}}, 1.0};
  }
  std::string name() const override { return "coincidence"; }
  int dim() const override { return 2; }

  Spinor psi(double t, const Vec& q) const override {
    check_dim(q, 2);
    return scalar(norm_ * (a_.value(t, q(0)) * b_.value(t, q(1)) - b_.value(t, q(0)) * a_.value(t, q(1))));
  }
  Spinor dpsi_dq(double t, const Vec& q, int axis) const override {
    check_dim(q, 2);
    const double x = q(0), y = q(1);
    const Complex ax = a_.value(t, x), ay = a_.value(t, y), bx = b_.value(t, x), by = b_.value(t, y);
    if (axis == 0)
      return scalar(norm_ * (ax * a_.dlog_dx(t, x) * by - bx * b_.dlog_dx(t, x) * ay));
    return scalar(norm_ * (ax * by * b_.dlog_dx(t, y) - bx * ay * a_.dlog_dx(t, y)));
  }
  Spinor dpsi_dt(double t, const Vec& q) const override {
    check_dim(q, 2);
    const double x = q(0), y = q(1);
    const Complex p = a_.value(t, x) * b_.value(t, y), m = b_.value(t, x) * a_.value(t, y);
    return scalar(norm_ * (p * (a_.dlog_dt(t, x) + b_.dlog_dt(t, y)) - m * (b_.dlog_dt(t, x) + a_.dlog_dt(t, y))));
  }

  GridSpec recommended_grid() const override { return GridSpec::uniform(2, 256, 16.0); }
  TimeWindow horizon() const override { return {-3.0, 3.0}; }
  ConfigSpace config_space() const override { return space_; }

 private:
  Gauss1D a_, b_;
  double norm_ = 1.0;
  ConfigSpace space_;
};

}  // namespace

CurrentLaw CurrentLaw::schrodinger(int dim, double mass, double hbar) {
  CurrentLaw law;
  law.kind = Kind::schrodinger;
  law.masses.assign(dim, mass);
  law.hbar = hbar;
  return law;
}

CurrentLaw CurrentLaw::dirac_1d(double c) {
  CurrentLaw law;
  law.kind = Kind::dirac;
  law.alphas = {pauli(0)};
  law.c = c;
  return law;
}

CurrentSample CurrentLaw::evaluate(const Spinor& psi, const std::vector<Spinor>& grad) const {
  CurrentSample s;
  s.j0 = psi.squaredNorm();
  if (kind == Kind::schrodinger) {
    const int d = static_cast<int>(masses.size());
    s.J.resize(d);
    for (int a = 0; a < d; ++a) s.J(a) = hbar / masses[a] * psi.dot(grad[a]).imag();
  } else {
    const int d = static_cast<int>(alphas.size());
    s.J.resize(d);
    for (int a = 0; a < d; ++a) s.J(a) = c * psi.dot(alphas[a] * psi).real();
  }
  return s;
}

HamiltonianSpec Scenario::hamiltonian(const GridSpec& grid) const {
  HamiltonianSpec h;
  h.kind = HamiltonianKind::schrodinger;
  h.k = components();
  const CurrentLaw l = law();
  h.masses = l.masses;
  h.hbar = l.hbar;
  h.charges_over_c_hbar.assign(dim(), 0.0);
  const bool has_potential = potential(Vec::Zero(dim())) != 0.0 || potential(Vec::Ones(dim())) != 0.0;
  if (has_potential)
    h.potential = MatrixField::scalar(grid, h.k, [this](const Vec& q) { return potential(q); });
  h.validate(grid);
  return h;
}

ScenarioPtr make_free_gaussian(FreeGaussianParams params) {
  return std::make_shared<FreeGaussian>(std::move(params));
}
ScenarioPtr make_oscillator_superposition(double omega) {
  return std::make_shared<OscillatorSuperposition>(omega);
}
ScenarioPtr make_oscillator_coherent(double omega, double displacement) {
  return std::make_shared<OscillatorCoherent>(omega, displacement);
}
ScenarioPtr make_hydrogenic(double lambda) { return std::make_shared<Hydrogenic>(lambda); }
ScenarioPtr make_plane_wave(double k, int wavelengths) { return std::make_shared<PlaneWave>(k, wavelengths); }
ScenarioPtr make_dirac_packet(double sigma, double k0, double c) {
  return std::make_shared<DiracPacket>(sigma, k0, c);
}
ScenarioPtr make_coincidence(double separation, double momentum, double sigma) {
  return std::make_shared<Coincidence>(separation, momentum, sigma);
}

std::vector<std::string> scenario_names() {
  return {"free_gaussian", "free_gaussian_2d", "oscillator_superposition", "oscillator_coherent",
          "hydrogenic",    "plane_wave",       "dirac_packet",             "coincidence"};
}

ScenarioPtr make_scenario(std::string_view name) {
  if (name == "free_gaussian") return make_free_gaussian();
  if (name == "free_gaussian_2d") {
    FreeGaussianParams p;
    p.dim = 2;
    return make_free_gaussian(p);
  }
  if (name == "oscillator_superposition") return make_oscillator_superposition();
  if (name == "oscillator_coherent") return make_oscillator_coherent();
  if (name == "hydrogenic") return make_hydrogenic();
  if (name == "plane_wave") return make_plane_wave();
  if (name == "dirac_packet") return make_dirac_packet();
  if (name == "coincidence") return make_coincidence();
  throw Error(Errc::invalid_argument, "unknown scenario '" + std::string(name) + "'");
}

Spinor scenario_eval(const Scenario& s, double t, const Vec& q) {
  const TimeWindow w = s.horizon();
  require(w.contains(t), Errc::out_of_domain,
          "t=" + std::to_string(t) + " outside the horizon of " + s.name());
  return s.psi(t, q);
}

std::vector<double> oscillator_superposition_nodes(double omega, double t, double tol) {
  // psi = 0  <=>  2 xi^2 - 1 = -sqrt(2) exp(2 i omega t), xi = sqrt(omega) q.
  const Complex rhs = -std::numbers::sqrt2 * std::exp(2.0 * I * omega * t);
  if (std::abs(rhs.imag()) > tol) return {};
  const double xi2 = 0.5 * (1.0 + rhs.real());
  if (xi2 < 0) return {};
  const double x = std::sqrt(xi2 / omega);
  return {-x, x};
}

}  // namespace bohm
