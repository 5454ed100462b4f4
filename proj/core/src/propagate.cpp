#include "bohm/propagate.hpp"

#include "bohm/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>

namespace bohm {

MatrixField::MatrixField(GridSpec g, int components) : grid(std::move(g)), k(components) {
  data.assign(grid.size() * static_cast<std::size_t>(k * k), Complex{});
}

MatrixField MatrixField::scalar(const GridSpec& g, int components,
                                const std::function<double(const Vec&)>& v) {
  MatrixField f(g, components);
  for (std::size_t p = 0; p < g.size(); ++p) {
    const double val = v(g.node(p));
    for (int i = 0; i < components; ++i) f.at(p)(i, i) = val;
  }
  return f;
}

void HamiltonianSpec::validate(const GridSpec& grid) const {
  require(k >= 1, Errc::invalid_argument, "spinor component count");
  require(hbar > 0.0 && c > 0.0, Errc::invalid_argument, "hbar and c must be positive");
  if (!potential.empty()) {
    require(potential.grid == grid && potential.k == k, Errc::dimension_mismatch, "potential shape");
    for (std::size_t p = 0; p < grid.size(); ++p) {
      const auto v = potential.at(p);
      require((v - v.adjoint()).cwiseAbs().maxCoeff() <= 1e-12, Errc::invalid_argument,
              "potential must be Hermitian at every node");
    }
  }
  if (kind == HamiltonianKind::dirac1d) {
    require(grid.dim == 1, Errc::unsupported_field, "Dirac stepper is one-dimensional");
    require(k == 2, Errc::invalid_argument, "1D Dirac spinors have two components");
    return;
  }
  require(static_cast<int>(masses.size()) == grid.dim, Errc::dimension_mismatch, "one mass per axis");
  for (double m : masses) require(m > 0.0, Errc::invalid_argument, "masses must be positive");
  if (!vector_potential.empty()) {
    require(vector_potential.grid == grid && vector_potential.components == grid.dim,
            Errc::dimension_mismatch, "vector potential shape");
    require(static_cast<int>(charges_over_c_hbar.size()) == grid.dim, Errc::dimension_mismatch,
            "one coupling per axis");
  }
  if (!magnetic_field.empty()) {
    require(kind == HamiltonianKind::pauli && k == 2, Errc::invalid_argument,
            "spin coupling needs the two-component Pauli equation");
    require(magnetic_field.grid == grid && magnetic_field.components == 3, Errc::dimension_mismatch,
            "magnetic field shape");
  }
}

namespace {

std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

// 1D transforms along one axis of a k-component grid field (guru interface).
class AxisFft {
 public:
  AxisFft(const GridSpec& grid, int k, int axis) : n_(grid.size() * static_cast<std::size_t>(k)) {
    fftw_iodim dim{grid.points[axis], static_cast<int>(grid.stride(axis)) * k,
                   static_cast<int>(grid.stride(axis)) * k};
    std::vector<fftw_iodim> loops;
    for (int a = 0; a < grid.dim; ++a) {
      if (a == axis) continue;
      const int s = static_cast<int>(grid.stride(a)) * k;
      loops.push_back({grid.points[a], s, s});
    }
    loops.push_back({k, 1, 1});
    std::vector<fftw_complex> scratch(n_);
    std::lock_guard lock(plan_mutex());
    fwd_ = fftw_plan_guru_dft(1, &dim, static_cast<int>(loops.size()), loops.data(), scratch.data(),
                              scratch.data(), FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    bwd_ = fftw_plan_guru_dft(1, &dim, static_cast<int>(loops.size()), loops.data(), scratch.data(),
                              scratch.data(), FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    scale_ = 1.0 / grid.points[axis];
  }
  ~AxisFft() {
    std::lock_guard lock(plan_mutex());
    if (fwd_) fftw_destroy_plan(fwd_);
    if (bwd_) fftw_destroy_plan(bwd_);
  }
  AxisFft(const AxisFft&) = delete;
  AxisFft& operator=(const AxisFft&) = delete;

  void forward(Complex* d) const {
    fftw_execute_dft(fwd_, reinterpret_cast<fftw_complex*>(d), reinterpret_cast<fftw_complex*>(d));
  }
  void backward(Complex* d) const {
    fftw_execute_dft(bwd_, reinterpret_cast<fftw_complex*>(d), reinterpret_cast<fftw_complex*>(d));
    for (std::size_t i = 0; i < n_; ++i) d[i] *= scale_;
  }

 private:
  std::size_t n_;
  fftw_plan fwd_ = nullptr;
  fftw_plan bwd_ = nullptr;
  double scale_ = 1.0;
};

int axis_index(const GridSpec& g, std::size_t p, int axis) {
  return static_cast<int>((p / g.stride(axis)) % static_cast<std::size_t>(g.points[axis]));
}

// Local Hermitian part of the Hamiltonian at node p (potential plus -B.sigma).
Eigen::MatrixXcd local_matrix(const HamiltonianSpec& ham, std::size_t p) {
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(ham.k, ham.k);
  if (!ham.potential.empty()) h = ham.potential.at(p);
  if (!ham.magnetic_field.empty())
    for (int s = 0; s < 3; ++s) h -= ham.magnetic_field.at(p, s) * pauli(s);
  return h;
}

// exp(-i V tau / hbar) per node; scalar fast path when k == 1.
class PotentialPropagator {
 public:
  PotentialPropagator(const GridSpec& grid, const HamiltonianSpec& ham, double tau) : k_(ham.k) {
    active_ = !ham.potential.empty() || !ham.magnetic_field.empty();
    if (!active_) return;
    const std::size_t kk = static_cast<std::size_t>(k_ * k_);
    u_.resize(grid.size() * kk);
    for (std::size_t p = 0; p < grid.size(); ++p) {
      Complex* dst = u_.data() + p * kk;
      if (k_ == 1) {
        const double v = std::real(ham.potential.at(p)(0, 0));
        dst[0] = std::polar(1.0, -v * tau / ham.hbar);
        continue;
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(local_matrix(ham, p));
      Eigen::VectorXcd phases(k_);
      for (int i = 0; i < k_; ++i) phases(i) = std::polar(1.0, -es.eigenvalues()(i) * tau / ham.hbar);
      const Eigen::MatrixXcd u = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
      for (int r = 0; r < k_; ++r)
        for (int c = 0; c < k_; ++c) dst[r * k_ + c] = u(r, c);
    }
  }

  void apply(SpinorField& psi) const {
    if (!active_) return;
    const std::size_t kk = static_cast<std::size_t>(k_ * k_);
    if (k_ == 1) {
      for (std::size_t p = 0; p < psi.points(); ++p) psi.data[p] *= u_[p];
      return;
    }
    std::vector<Complex> tmp(static_cast<std::size_t>(k_));
    for (std::size_t p = 0; p < psi.points(); ++p) {
      const Complex* u = u_.data() + p * kk;
      for (int r = 0; r < k_; ++r) {
        Complex s{};
        for (int c = 0; c < k_; ++c) s += u[r * k_ + c] * psi.at(p, c);
        tmp[r] = s;
      }
      for (int r = 0; r < k_; ++r) psi.at(p, r) = tmp[r];
    }
  }

 private:
  int k_;
  bool active_ = false;
  std::vector<Complex> u_;
};

SpinorField spectral_derivative(const SpinorField& psi, int axis) {
  const GridSpec& g = psi.grid;
  AxisFft fft(g, psi.k, axis);
  SpinorField d = psi;
  fft.forward(d.data.data());
  const auto kw = wavenumbers(g, axis);
  const int n = g.points[axis];
  for (std::size_t p = 0; p < g.size(); ++p) {
    const int j = axis_index(g, p, axis);
    const Complex f = (n % 2 == 0 && j == n / 2) ? Complex{} : Complex(0.0, kw[j]);
    for (int c = 0; c < psi.k; ++c) d.at(p, c) *= f;
  }
  fft.backward(d.data.data());
  return d;
}

}  // namespace

struct SchrodingerStepper::Impl {
  GridSpec grid;
  HamiltonianSpec ham;
  double dt = 0.0;
  std::unique_ptr<PotentialPropagator> half_potential;
  // Uniform A: one diagonal phase on the full Fourier grid.
  std::unique_ptr<Fft> fft;
  std::vector<Complex> kinetic_phase;
  // Varying A: per-axis substeps in mixed representation.
  std::vector<std::unique_ptr<AxisFft>> axis_fft;
  std::vector<std::vector<Complex>> axis_phase_half;
  std::vector<std::vector<Complex>> axis_phase_full;

  void axis_step(SpinorField& psi, int a, const std::vector<Complex>& phase) const {
    axis_fft[a]->forward(psi.data.data());
    for (std::size_t p = 0; p < grid.size(); ++p)
      for (int c = 0; c < ham.k; ++c) psi.at(p, c) *= phase[p];
    axis_fft[a]->backward(psi.data.data());
  }
};

SchrodingerStepper::SchrodingerStepper(const GridSpec& grid, HamiltonianSpec ham, double dt,
                                       KineticTreatment treatment)
    : impl_(std::make_unique<Impl>()) {
  require(ham.kind != HamiltonianKind::dirac1d, Errc::invalid_argument,
          "use DiracStepper for Dirac Hamiltonians");
  for (int a = 0; a < grid.dim; ++a)
    require(grid.periodic[a], Errc::unsupported_field, "split-step needs a periodic grid");
  ham.validate(grid);
  auto& m = *impl_;
  m.grid = grid;
  m.ham = std::move(ham);
  m.dt = dt;
  m.half_potential = std::make_unique<PotentialPropagator>(grid, m.ham, 0.5 * dt);

  const bool uniform_a = m.ham.vector_potential.empty() || m.ham.vector_potential.is_uniform();
  const double hbar = m.ham.hbar;
  auto coupled = [&](int a, double kval, std::size_t p) {
    if (m.ham.vector_potential.empty()) return kval;
    return kval - m.ham.charges_over_c_hbar[a] * m.ham.vector_potential.at(p, a);
  };

  if (uniform_a) {
    m.fft = std::make_unique<Fft>(grid, m.ham.k);
    std::vector<std::vector<double>> kw;
    for (int a = 0; a < grid.dim; ++a) kw.push_back(wavenumbers(grid, a));
    m.kinetic_phase.resize(grid.size());
    for (std::size_t p = 0; p < grid.size(); ++p) {
      double e = 0.0;
      for (int a = 0; a < grid.dim; ++a) {
        const double kk = coupled(a, kw[a][axis_index(grid, p, a)], 0);
        e += hbar * hbar / (2.0 * m.ham.masses[a]) * kk * kk;
      }
      m.kinetic_phase[p] = std::polar(1.0, -e * dt / hbar);
    }
    return;
  }

  if (treatment == KineticTreatment::exact)
    throw Error(Errc::unsupported_field, "exact kinetic step requires a spatially uniform A");

  // A_a must be constant along axis a for the axis-a substep to be diagonal.
  const auto& A = m.ham.vector_potential;
  for (int a = 0; a < grid.dim; ++a) {
    for (std::size_t p = 0; p < grid.size(); ++p) {
      if (axis_index(grid, p, a) == 0) continue;
      const std::size_t base = p - static_cast<std::size_t>(axis_index(grid, p, a)) * grid.stride(a);
      if (std::abs(A.at(p, a) - A.at(base, a)) > 1e-14 * (1.0 + std::abs(A.at(base, a))))
        throw Error(Errc::unsupported_field,
                    "A component " + std::to_string(a) + " varies along its own axis");
    }
  }
  for (int a = 0; a < grid.dim; ++a) {
    m.axis_fft.push_back(std::make_unique<AxisFft>(grid, m.ham.k, a));
    const auto kw = wavenumbers(grid, a);
    std::vector<Complex> half(grid.size()), full(grid.size());
    for (std::size_t p = 0; p < grid.size(); ++p) {
      const double kk = coupled(a, kw[axis_index(grid, p, a)], p);
      const double e = hbar * hbar / (2.0 * m.ham.masses[a]) * kk * kk;
      half[p] = std::polar(1.0, -e * 0.5 * dt / hbar);
      full[p] = std::polar(1.0, -e * dt / hbar);
    }
    m.axis_phase_half.push_back(std::move(half));
    m.axis_phase_full.push_back(std::move(full));
  }
}

SchrodingerStepper::~SchrodingerStepper() = default;
SchrodingerStepper::SchrodingerStepper(SchrodingerStepper&&) noexcept = default;
SchrodingerStepper& SchrodingerStepper::operator=(SchrodingerStepper&&) noexcept = default;

double SchrodingerStepper::dt() const { return impl_->dt; }

void SchrodingerStepper::advance(SpinorField& psi, int steps) {
  auto& m = *impl_;
  require(psi.grid == m.grid && psi.k == m.ham.k, Errc::dimension_mismatch, "field does not match stepper");
  for (int s = 0; s < steps; ++s) {
    m.half_potential->apply(psi);
    if (m.fft) {
      m.fft->forward(psi.data.data());
      for (std::size_t p = 0; p < m.grid.size(); ++p)
        for (int c = 0; c < m.ham.k; ++c) psi.at(p, c) *= m.kinetic_phase[p];
      m.fft->backward(psi.data.data());
    } else {
      const int d = m.grid.dim;
      for (int a = 0; a < d - 1; ++a) m.axis_step(psi, a, m.axis_phase_half[a]);
      m.axis_step(psi, d - 1, m.axis_phase_full[d - 1]);
      for (int a = d - 2; a >= 0; --a) m.axis_step(psi, a, m.axis_phase_half[a]);
    }
    m.half_potential->apply(psi);
  }
}

Eigen::Matrix2cd dirac_mode_propagator(double k, double tau, double mass, double c, double hbar) {
  const double px = c * hbar * k;
  const double mz = mass * c * c;
  const double e = std::hypot(px, mz);
  Eigen::Matrix2cd u = Eigen::Matrix2cd::Identity();
  if (e == 0.0) return u;
  const double phase = e * tau / hbar;
  const double cs = std::cos(phase);
  const Complex is = Complex(0.0, std::sin(phase) / e);
  u(0, 0) = cs - is * mz;
  u(1, 1) = cs + is * mz;
  u(0, 1) = -is * px;
  u(1, 0) = -is * px;
  return u;
}

struct DiracStepper::Impl {
  GridSpec grid;
  HamiltonianSpec ham;
  double dt = 0.0;
  std::unique_ptr<PotentialPropagator> half_potential;
  std::unique_ptr<Fft> fft;
  std::vector<Eigen::Matrix2cd> modes;
};

DiracStepper::DiracStepper(const GridSpec& grid, HamiltonianSpec ham, double dt)
    : impl_(std::make_unique<Impl>()) {
  require(ham.kind == HamiltonianKind::dirac1d, Errc::invalid_argument, "Hamiltonian is not dirac1d");
  require(grid.dim == 1, Errc::unsupported_field, "Dirac stepper is one-dimensional");
  require(grid.periodic[0], Errc::unsupported_field, "Dirac stepper needs a periodic grid");
  ham.validate(grid);
  auto& m = *impl_;
  m.grid = grid;
  m.ham = std::move(ham);
  m.dt = dt;
  m.half_potential = std::make_unique<PotentialPropagator>(grid, m.ham, 0.5 * dt);
  m.fft = std::make_unique<Fft>(grid, 2);
  for (double k : wavenumbers(grid, 0))
    m.modes.push_back(dirac_mode_propagator(k, dt, m.ham.dirac_mass, m.ham.c, m.ham.hbar));
}

DiracStepper::~DiracStepper() = default;
DiracStepper::DiracStepper(DiracStepper&&) noexcept = default;
DiracStepper& DiracStepper::operator=(DiracStepper&&) noexcept = default;

double DiracStepper::dt() const { return impl_->dt; }

void DiracStepper::advance(SpinorField& psi, int steps) {
  auto& m = *impl_;
  require(psi.grid == m.grid && psi.k == 2, Errc::dimension_mismatch, "field does not match stepper");
  for (int s = 0; s < steps; ++s) {
    m.half_potential->apply(psi);
    m.fft->forward(psi.data.data());
    for (std::size_t p = 0; p < m.grid.size(); ++p) {
      const Complex a = psi.at(p, 0), b = psi.at(p, 1);
      const auto& u = m.modes[p];
      psi.at(p, 0) = u(0, 0) * a + u(0, 1) * b;
      psi.at(p, 1) = u(1, 0) * a + u(1, 1) * b;
    }
    m.fft->backward(psi.data.data());
    m.half_potential->apply(psi);
  }
}

SpinorField split_step_schrodinger(const SpinorField& psi, const HamiltonianSpec& ham, double dt,
                                   KineticTreatment treatment) {
  SchrodingerStepper stepper(psi.grid, ham, dt, treatment);
  SpinorField out = psi;
  stepper.advance(out);
  return out;
}

SpinorField dirac_step_1d(const SpinorField& psi, const HamiltonianSpec& ham, double dt) {
  DiracStepper stepper(psi.grid, ham, dt);
  SpinorField out = psi;
  stepper.advance(out);
  return out;
}

SpinorField apply_hamiltonian(const SpinorField& psi, const HamiltonianSpec& ham) {
  const GridSpec& g = psi.grid;
  ham.validate(g);
  SpinorField out(g, psi.k);
  auto add_local = [&] {
    if (ham.potential.empty() && ham.magnetic_field.empty()) return;
    Eigen::VectorXcd v(psi.k);
    for (std::size_t p = 0; p < g.size(); ++p) {
      for (int c = 0; c < psi.k; ++c) v(c) = psi.at(p, c);
      const Eigen::VectorXcd hv = local_matrix(ham, p) * v;
      for (int c = 0; c < psi.k; ++c) out.at(p, c) += hv(c);
    }
  };

  if (ham.kind == HamiltonianKind::dirac1d) {
    const SpinorField dx = spectral_derivative(psi, 0);
    const Complex mic = Complex(0.0, -ham.c * ham.hbar);
    const double mc2 = ham.dirac_mass * ham.c * ham.c;
    for (std::size_t p = 0; p < g.size(); ++p) {
      out.at(p, 0) = mic * dx.at(p, 1) + mc2 * psi.at(p, 0);
      out.at(p, 1) = mic * dx.at(p, 0) - mc2 * psi.at(p, 1);
    }
    add_local();
    return out;
  }

  const Complex I(0.0, 1.0);
  for (int a = 0; a < g.dim; ++a) {
    // D_a = d_a - i c_a A_a, kinetic term -hbar^2/(2 m_a) D_a D_a.
    auto covariant = [&](const SpinorField& f) {
      SpinorField d = spectral_derivative(f, a);
      if (!ham.vector_potential.empty()) {
        const double ca = ham.charges_over_c_hbar[a];
        for (std::size_t p = 0; p < g.size(); ++p)
          for (int c = 0; c < f.k; ++c) d.at(p, c) -= I * ca * ham.vector_potential.at(p, a) * f.at(p, c);
      }
      return d;
    };
    const SpinorField dd = covariant(covariant(psi));
    const double coef = -ham.hbar * ham.hbar / (2.0 * ham.masses[a]);
    for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] += coef * dd.data[i];
  }
  add_local();
  return out;
}

PdeRun run_pde(const SpinorField& psi0, const HamiltonianSpec& ham, double dt, int steps) {
  require(steps >= 0 && dt > 0.0, Errc::invalid_argument, "run length and step");
  PdeRun run{ham, dt, {}};
  run.slices.reserve(static_cast<std::size_t>(steps) + 1);
  run.slices.push_back(psi0);
  SpinorField psi = psi0;
  if (ham.kind == HamiltonianKind::dirac1d) {
    DiracStepper stepper(psi0.grid, ham, dt);
    for (int s = 0; s < steps; ++s) {
      stepper.advance(psi);
      run.slices.push_back(psi);
    }
  } else {
    SchrodingerStepper stepper(psi0.grid, ham, dt);
    for (int s = 0; s < steps; ++s) {
      stepper.advance(psi);
      run.slices.push_back(psi);
    }
  }
  return run;
}

}  // namespace bohm
