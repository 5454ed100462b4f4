#include "bohm/providers.hpp"

#include "bohm/fft.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace bohm {

namespace {

constexpr Complex I{0.0, 1.0};
constexpr int kMaxPacked = kMaxComponents * (1 + kMaxDim);
using Packed = Eigen::Matrix<Complex, Eigen::Dynamic, 1, 0, kMaxPacked, 1>;

// Replaces samples by periodic cubic B-spline coefficients, m interleaved components.
void bspline_prefilter(const GridSpec& grid, int m, std::vector<Complex>& data) {
  Fft fft(grid, m);
  fft.forward(data.data());
  std::vector<std::vector<double>> factor(grid.dim);
  for (int a = 0; a < grid.dim; ++a) {
    const int n = grid.points[a];
    factor[a].resize(n);
    for (int j = 0; j < n; ++j)
      factor[a][j] = 6.0 / (4.0 + 2.0 * std::cos(2.0 * std::numbers::pi * j / n));
  }
  for (std::size_t p = 0; p < grid.size(); ++p) {
    const auto idx = grid.unflatten(p);
    double f = 1.0;
    for (int a = 0; a < grid.dim; ++a) f *= factor[a][idx[a]];
    for (int c = 0; c < m; ++c) data[p * m + c] *= f;
  }
  fft.backward(data.data());
}

struct Stencil {
  std::array<std::array<double, 4>, kMaxDim> w{};
  std::array<std::array<std::size_t, 4>, kMaxDim> offset{};
};

}  // namespace

CurrentLaw law_for(const HamiltonianSpec& ham, int dim) {
  if (ham.kind == HamiltonianKind::dirac1d) return CurrentLaw::dirac_1d(ham.c);
  CurrentLaw law = CurrentLaw::schrodinger(dim, 1.0, ham.hbar);
  law.masses = ham.masses;
  return law;
}

ScenarioProvider::ScenarioProvider(ScenarioPtr scenario, std::optional<double> delta)
    : scenario_(std::move(scenario)), law_(scenario_->law()), space_(scenario_->config_space()) {
  if (delta) space_.delta = *delta;
  space_.validate();
  const GridSpec g = scenario_->recommended_grid();
  double best = 0.0;
  for (std::size_t p = 0; p < g.size(); ++p) best = std::max(best, scenario_->psi(0.0, g.node(p)).squaredNorm());
  require(best > 0.0, Errc::degenerate_density, scenario_->name() + " has vanishing density at t=0");
  scale_ = best;
}

CurrentSample ScenarioProvider::current(double t, const Vec& q) const {
  if (scenario_->stationary()) t = 0.0;
  const Spinor psi = scenario_->psi(t, q);
  std::vector<Spinor> grad;
  if (law_.kind == CurrentLaw::Kind::schrodinger)
    for (int a = 0; a < dim(); ++a) grad.push_back(scenario_->dpsi_dq(t, q, a));
  return law_.evaluate(psi, grad);
}

DensityJet ScenarioProvider::density_jet(double t, const Vec& q) const {
  if (scenario_->stationary()) t = 0.0;
  const Spinor psi = scenario_->psi(t, q);
  DensityJet jet;
  jet.j0 = psi.squaredNorm();
  jet.dt_j0 = scenario_->stationary() ? 0.0 : 2.0 * psi.dot(scenario_->dpsi_dt(t, q)).real();
  jet.grad_j0.resize(dim());
  for (int a = 0; a < dim(); ++a) jet.grad_j0(a) = 2.0 * psi.dot(scenario_->dpsi_dq(t, q, a)).real();
  return jet;
}

struct GridProvider::Impl {
  GridSpec grid;
  int d = 1, k = 1, m = 1;
  double dt = 0.0;
  CurrentLaw law;
  std::vector<double> charges;
  std::vector<std::vector<Complex>> value, rate;  // spline coefficients per slice
  std::vector<Complex> vector_potential;          // d components, empty when A = 0
  ConfigSpace space;
  double scale = 0.0;

  std::size_t slices() const { return value.size(); }
  double t_end() const { return dt * static_cast<double>(slices() - 1); }

  Stencil stencil(const Vec& q) const {
    require(q.size() == d, Errc::dimension_mismatch, "point dimension differs from the grid");
    Stencil s;
    for (int a = 0; a < d; ++a) {
      const int n = grid.points[a];
      const double u = (q(a) + grid.extent[a]) / grid.spacing(a);
      if (!grid.periodic[a])
        require(u >= 0.0 && u < n, Errc::out_of_domain, "point outside the grid box");
      const double fl = std::floor(u);
      const double r = u - fl;
      const long i = static_cast<long>(fl);
      const double r2 = r * r, r3 = r2 * r;
      s.w[a] = {(1.0 - r) * (1.0 - r) * (1.0 - r) / 6.0, (3.0 * r3 - 6.0 * r2 + 4.0) / 6.0,
                (-3.0 * r3 + 3.0 * r2 + 3.0 * r + 1.0) / 6.0, r3 / 6.0};
      for (int j = 0; j < 4; ++j) {
        long idx = (i - 1 + j) % n;
        if (idx < 0) idx += n;
        s.offset[a][j] = static_cast<std::size_t>(idx) * grid.stride(a);
      }
    }
    return s;
  }

  // Tensor-product spline sum of `comps` interleaved components from several arrays at once.
  template <std::size_t NArr>
  void accumulate(const Stencil& s, const std::array<const std::vector<Complex>*, NArr>& arrays,
                  const std::array<double, NArr>& coef, int comps, Packed& out) const {
    out.setZero(comps);
    std::array<int, kMaxDim> j{};
    while (true) {
      double w = 1.0;
      std::size_t p = 0;
      for (int a = 0; a < d; ++a) {
        w *= s.w[a][j[a]];
        p += s.offset[a][j[a]];
      }
      for (std::size_t n = 0; n < NArr; ++n) {
        if (coef[n] == 0.0) continue;
        const Complex* src = arrays[n]->data() + p * static_cast<std::size_t>(comps);
        const double wc = w * coef[n];
        for (int c = 0; c < comps; ++c) out(c) += wc * src[c];
      }
      int a = d - 1;
      while (a >= 0 && ++j[a] == 4) j[a--] = 0;
      if (a < 0) break;
    }
  }

  // Interpolated packed state and its time derivative.
  void evaluate(double t, const Vec& q, Packed& f, Packed* fdot) const {
    require(t >= 0.0 && t <= t_end(), Errc::provider_window,
            "t=" + std::to_string(t) + " outside the stored run [0, " + std::to_string(t_end()) + "]");
    const std::size_t n = std::min(static_cast<std::size_t>(t / dt), slices() - 2);
    const double th = t / dt - static_cast<double>(n);
    const double th2 = th * th, th3 = th2 * th;
    const Stencil s = stencil(q);
    const std::array<const std::vector<Complex>*, 4> arr{&value[n], &rate[n], &value[n + 1], &rate[n + 1]};
    accumulate<4>(s, arr, {2 * th3 - 3 * th2 + 1, dt * (th3 - 2 * th2 + th), -2 * th3 + 3 * th2, dt * (th3 - th2)},
                  m, f);
    if (fdot)
      accumulate<4>(s, arr,
                    {(6 * th2 - 6 * th) / dt, 3 * th2 - 4 * th + 1, (-6 * th2 + 6 * th) / dt, 3 * th2 - 2 * th},
                    m, *fdot);
  }

  CurrentSample current(double t, const Vec& q) const {
    Packed f;
    evaluate(t, q, f, nullptr);
    Spinor psi = f.head(k);
    std::vector<Spinor> grad;
    for (int a = 0; a < d; ++a) grad.push_back(f.segment(k * (1 + a), k));
    CurrentSample s = law.evaluate(psi, grad);
    if (!vector_potential.empty() && law.kind == CurrentLaw::Kind::schrodinger) {
      Packed A;
      accumulate<1>(stencil(q), {&vector_potential}, {1.0}, d, A);
      for (int a = 0; a < d; ++a)
        s.J(a) -= law.hbar / law.masses[a] * charges[a] * A(a).real() * s.j0;
    }
    return s;
  }
};

GridProvider::GridProvider(const PdeRun& run, ConfigSpace space) : impl_(std::make_unique<Impl>()) {
  require(run.slices.size() >= 2, Errc::invalid_argument, "a PDE run needs at least two slices");
  Impl& im = *impl_;
  im.grid = run.slices.front().grid;
  im.d = im.grid.dim;
  im.k = run.slices.front().k;
  im.m = im.k * (1 + im.d);
  im.dt = run.dt;
  im.law = law_for(run.ham, im.d);
  im.charges = run.ham.charges_over_c_hbar;
  require(space.dim == im.d, Errc::dimension_mismatch, "configuration space dimension differs from the grid");
  space.validate();
  im.space = std::move(space);
  run.ham.validate(im.grid);

  const std::size_t N = im.grid.size();
  const double inv_hbar = 1.0 / run.ham.hbar;
  auto pack = [&](const SpinorField& psi) {
    const auto grad = spectral_gradient(psi);
    std::vector<Complex> out(N * im.m);
    for (std::size_t p = 0; p < N; ++p) {
      Complex* dst = out.data() + p * im.m;
      for (int c = 0; c < im.k; ++c) dst[c] = psi.at(p, c);
      for (int a = 0; a < im.d; ++a)
        for (int c = 0; c < im.k; ++c) dst[im.k * (1 + a) + c] = grad[a].at(p, c);
    }
    bspline_prefilter(im.grid, im.m, out);
    return out;
  };
  for (const SpinorField& psi : run.slices) {
    require(psi.grid == im.grid && psi.k == im.k, Errc::dimension_mismatch, "slices must share one grid");
    SpinorField dpsi = apply_hamiltonian(psi, run.ham);
    for (auto& z : dpsi.data) z *= -I * inv_hbar;
    im.value.push_back(pack(psi));
    im.rate.push_back(pack(dpsi));
  }
  if (!run.ham.vector_potential.empty()) {
    im.vector_potential.resize(N * im.d);
    for (std::size_t p = 0; p < N; ++p)
      for (int a = 0; a < im.d; ++a) im.vector_potential[p * im.d + a] = run.ham.vector_potential.at(p, a);
    bspline_prefilter(im.grid, im.d, im.vector_potential);
  }
  double best = 0.0;
  const SpinorField& psi0 = run.slices.front();
  for (std::size_t p = 0; p < N; ++p) {
    double rho = 0.0;
    for (int c = 0; c < im.k; ++c) rho += std::norm(psi0.at(p, c));
    best = std::max(best, rho);
  }
  require(best > 0.0, Errc::degenerate_density, "initial field vanishes");
  im.scale = best;
}

GridProvider::~GridProvider() = default;

int GridProvider::dim() const { return impl_->d; }
CurrentSample GridProvider::current(double t, const Vec& q) const { return impl_->current(t, q); }
TimeWindow GridProvider::window() const { return {0.0, impl_->t_end()}; }
double GridProvider::density_scale() const { return impl_->scale; }
const ConfigSpace& GridProvider::config_space() const { return impl_->space; }
const GridSpec& GridProvider::grid() const { return impl_->grid; }
std::optional<double> GridProvider::domain_half_width() const {
  return *std::min_element(impl_->grid.extent.begin(), impl_->grid.extent.end());
}

DensityJet GridProvider::density_jet(double t, const Vec& q) const {
  const Impl& im = *impl_;
  Packed f, fdot;
  im.evaluate(t, q, f, &fdot);
  DensityJet jet;
  jet.j0 = f.head(im.k).squaredNorm();
  jet.dt_j0 = 2.0 * f.head(im.k).dot(fdot.head(im.k)).real();
  jet.grad_j0.resize(im.d);
  for (int a = 0; a < im.d; ++a) jet.grad_j0(a) = 2.0 * f.head(im.k).dot(f.segment(im.k * (1 + a), im.k)).real();
  return jet;
}

ProviderPtr build_provider(ScenarioPtr scenario, const ProviderOptions& options) {
  auto provider = std::make_shared<ScenarioProvider>(scenario, options.delta);
  if (options.validate) validate_axioms(*provider, scenario->recommended_grid(), options.axioms);
  return provider;
}

ProviderPtr build_provider(const PdeRun& run, ConfigSpace space, const ProviderOptions& options) {
  if (options.delta) space.delta = *options.delta;
  auto provider = std::make_shared<GridProvider>(run, std::move(space));
  if (options.validate) validate_axioms(*provider, provider->grid(), options.axioms);
  return provider;
}

SpinorField sample_scenario(const Scenario& s, double t, const std::optional<GridSpec>& grid) {
  const GridSpec g = grid ? *grid : s.recommended_grid();
  return SpinorField::sample(g, s.components(), [&](const Vec& q, Complex* out) {
    const Spinor v = s.psi(t, q);
    for (int c = 0; c < s.components(); ++c) out[c] = v(c);
  });
}

}  // namespace bohm
