#include "bohm/field.hpp"

#include "bohm/fft.hpp"
#include "bohm/numerics.hpp"

#include <cmath>

namespace bohm {

SpinorField::SpinorField(GridSpec g, int components) : grid(std::move(g)), k(components) {
  grid.validate();
  require(k >= 1, Errc::invalid_argument, "spinor needs at least one component");
  data.assign(grid.size() * static_cast<std::size_t>(k), Complex{});
}

SpinorField SpinorField::sample(const GridSpec& g, int components,
                                const std::function<void(const Vec&, Complex*)>& fn) {
  SpinorField f(g, components);
  for (std::size_t i = 0; i < f.points(); ++i) fn(g.node(i), &f.at(i, 0));
  return f;
}

double SpinorField::norm_squared() const {
  std::vector<double> v(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) v[i] = std::norm(data[i]);
  return pairwise_sum(v) * grid.cell_volume();
}

VectorField VectorField::uniform(const GridSpec& g, const Vec& value) {
  VectorField f(g, static_cast<int>(value.size()));
  for (std::size_t i = 0; i < g.size(); ++i)
    for (int c = 0; c < f.components; ++c) f.at(i, c) = value(c);
  return f;
}

bool VectorField::is_uniform() const {
  for (std::size_t i = 1; i < grid.size(); ++i)
    for (int c = 0; c < components; ++c)
      if (at(i, c) != at(0, c)) return false;
  return true;
}

std::vector<SpinorField> spectral_gradient(const SpinorField& psi) {
  const GridSpec& g = psi.grid;
  for (int a = 0; a < g.dim; ++a)
    require(g.periodic[a], Errc::unsupported_field, "spectral gradient needs a periodic grid");
  Fft fft(g, psi.k);
  SpinorField hat = psi;
  fft.forward(hat.data.data());

  std::vector<SpinorField> out;
  for (int a = 0; a < g.dim; ++a) {
    const auto kw = wavenumbers(g, a);
    const int n = g.points[a];
    SpinorField d = hat;
    for (std::size_t p = 0; p < g.size(); ++p) {
      const int j = static_cast<int>((p / g.stride(a)) % static_cast<std::size_t>(n));
      // Nyquist mode has no sign; dropping it keeps derivatives of real data real.
      const Complex factor = (n % 2 == 0 && j == n / 2) ? Complex{} : Complex(0.0, kw[j]);
      for (int c = 0; c < psi.k; ++c) d.at(p, c) *= factor;
    }
    fft.backward(d.data.data());
    out.push_back(std::move(d));
  }
  return out;
}

CurrentField schrodinger_current(const SpinorField& psi, const std::vector<SpinorField>& grad_psi,
                                 const VectorField& A, const std::vector<double>& masses,
                                 const std::vector<double>& charges_over_c_hbar, double hbar) {
  const GridSpec& g = psi.grid;
  const int d = g.dim;
  require(static_cast<int>(grad_psi.size()) == d, Errc::dimension_mismatch, "gradient has wrong arity");
  for (const auto& gp : grad_psi)
    require(gp.grid == g && gp.k == psi.k, Errc::dimension_mismatch, "gradient field shape");
  require(static_cast<int>(masses.size()) == d, Errc::dimension_mismatch, "one mass per axis");
  for (double m : masses) require(m > 0.0, Errc::invalid_argument, "masses must be positive");
  require(A.empty() || (A.grid == g && A.components == d), Errc::dimension_mismatch,
          "vector potential shape");
  require(A.empty() || static_cast<int>(charges_over_c_hbar.size()) == d, Errc::dimension_mismatch,
          "one coupling per axis");

  CurrentField out{g, std::vector<double>(g.size()), VectorField(g, d)};
  for (std::size_t p = 0; p < g.size(); ++p) {
    double rho = 0.0;
    for (int c = 0; c < psi.k; ++c) rho += std::norm(psi.at(p, c));
    out.j0[p] = rho;
    for (int a = 0; a < d; ++a) {
      // Im psi^* d psi - c A |psi|^2
      double im = 0.0;
      for (int c = 0; c < psi.k; ++c) im += std::imag(std::conj(psi.at(p, c)) * grad_psi[a].at(p, c));
      if (!A.empty()) im -= charges_over_c_hbar[a] * A.at(p, a) * rho;
      out.J.at(p, a) = hbar / masses[a] * im;
    }
  }
  return out;
}

CurrentField dirac_current(const SpinorField& psi, const std::vector<CMatrix>& alphas, double c) {
  const GridSpec& g = psi.grid;
  require(static_cast<int>(alphas.size()) == g.dim, Errc::dimension_mismatch, "one alpha per axis");
  for (const auto& al : alphas)
    require(al.rows() == psi.k && al.cols() == psi.k, Errc::dimension_mismatch, "alpha matrix size");

  CurrentField out{g, std::vector<double>(g.size()), VectorField(g, g.dim)};
  Eigen::VectorXcd v(psi.k);
  for (std::size_t p = 0; p < g.size(); ++p) {
    for (int i = 0; i < psi.k; ++i) v(i) = psi.at(p, i);
    out.j0[p] = v.squaredNorm();
    for (int a = 0; a < g.dim; ++a) out.J.at(p, a) = c * std::real(v.dot(alphas[a] * v));
  }
  return out;
}

CMatrix pauli(int which) {
  CMatrix m = CMatrix::Zero(2, 2);
  const Complex I(0.0, 1.0);
  switch (which) {
    case 0: m(0, 1) = 1.0; m(1, 0) = 1.0; break;
    case 1: m(0, 1) = -I; m(1, 0) = I; break;
    case 2: m(0, 0) = 1.0; m(1, 1) = -1.0; break;
    default: throw Error(Errc::invalid_argument, "pauli index must be 0, 1 or 2");
  }
  return m;
}

}  // namespace bohm
