#pragma once

#include "bohm/grid.hpp"
#include "bohm/types.hpp"

#include <functional>
#include <vector>

namespace bohm {

// k-component complex field sampled on the nodes of a grid.
// Storage is point-major with components interleaved: data[point * k + c].
struct SpinorField {
  GridSpec grid;
  int k = 1;
  std::vector<Complex> data;

  SpinorField() = default;
  SpinorField(GridSpec g, int components);

  static SpinorField sample(const GridSpec& g, int components,
                            const std::function<void(const Vec&, Complex*)>& fn);

  std::size_t points() const { return grid.size(); }
  Complex& at(std::size_t point, int c) { return data[point * static_cast<std::size_t>(k) + c]; }
  const Complex& at(std::size_t point, int c) const {
    return data[point * static_cast<std::size_t>(k) + c];
  }

  // sum_i |psi_i|^2 * cell volume
  double norm_squared() const;
};

// Real d-vector per grid node, point-major.
struct VectorField {
  GridSpec grid;
  int components = 0;
  std::vector<double> data;

  VectorField() = default;
  VectorField(GridSpec g, int comps) : grid(std::move(g)), components(comps),
      data(grid.size() * static_cast<std::size_t>(comps), 0.0) {}

  static VectorField uniform(const GridSpec& g, const Vec& value);

  bool empty() const { return data.empty(); }
  double at(std::size_t point, int c) const { return data[point * static_cast<std::size_t>(components) + c]; }
  double& at(std::size_t point, int c) { return data[point * static_cast<std::size_t>(components) + c]; }
  // True when every node carries the same vector (bitwise).
  bool is_uniform() const;
};

// Current sampled on grid nodes.
struct CurrentField {
  GridSpec grid;
  std::vector<double> j0;
  VectorField J;
};

// Spectral partial derivatives d psi / d q_a for every axis (periodic grid).
std::vector<SpinorField> spectral_gradient(const SpinorField& psi);

// Schrodinger current j = (|psi|^2, (hbar/m_a) Im psi^*(d_a - i c_a A_a) psi), where
// c_a = e_a / (c hbar) and the inner product contracts the k components.
// An empty A means zero vector potential.
CurrentField schrodinger_current(const SpinorField& psi, const std::vector<SpinorField>& grad_psi,
                                 const VectorField& A, const std::vector<double>& masses,
                                 const std::vector<double>& charges_over_c_hbar, double hbar = 1.0);

// Dirac current j = (|psi|^2, c psi^* alpha_a psi) with one Hermitian k x k matrix per axis.
CurrentField dirac_current(const SpinorField& psi, const std::vector<CMatrix>& alphas, double c = 1.0);

// Pauli matrices sigma_x, sigma_y, sigma_z.
CMatrix pauli(int which);

}  // namespace bohm
