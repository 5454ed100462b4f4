#pragma once

#include "bohm/field.hpp"

#include <functional>
#include <memory>
#include <vector>

namespace bohm {

// Hermitian k x k matrix per grid node, row-major per node.
struct MatrixField {
  GridSpec grid;
  int k = 1;
  std::vector<Complex> data;

  MatrixField() = default;
  MatrixField(GridSpec g, int components);

  static MatrixField scalar(const GridSpec& g, int components, const std::function<double(const Vec&)>& v);

  bool empty() const { return data.empty(); }
  Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> at(std::size_t p) const {
    return {data.data() + p * static_cast<std::size_t>(k * k), k, k};
  }
  Eigen::Map<Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> at(std::size_t p) {
    return {data.data() + p * static_cast<std::size_t>(k * k), k, k};
  }
};

enum class HamiltonianKind { schrodinger, pauli, dirac1d };

struct HamiltonianSpec {
  HamiltonianKind kind = HamiltonianKind::schrodinger;
  int k = 1;
  MatrixField potential;                    // empty: V = 0
  VectorField vector_potential;             // empty: A = 0
  std::vector<double> masses;               // one per axis (Schrodinger/Pauli)
  std::vector<double> charges_over_c_hbar;  // e_a / (c hbar), one per axis
  VectorField magnetic_field;               // Pauli only: 3 components, enters as -B . sigma
  double dirac_mass = 0.0;
  double c = 1.0;
  double hbar = 1.0;

  void validate(const GridSpec& grid) const;
};

// How a spatially varying vector potential is treated in the kinetic step.
enum class KineticTreatment {
  // Per-axis mixed-representation substeps; requires A_a independent of q_a.
  split_axes,
  // Single diagonal Fourier step; only valid for uniform A.
  exact,
};

// Strang splitting: half potential, full kinetic (Fourier), half potential.
class SchrodingerStepper {
 public:
  SchrodingerStepper(const GridSpec& grid, HamiltonianSpec ham, double dt,
                     KineticTreatment treatment = KineticTreatment::split_axes);
  ~SchrodingerStepper();
  SchrodingerStepper(SchrodingerStepper&&) noexcept;
  SchrodingerStepper& operator=(SchrodingerStepper&&) noexcept;

  void advance(SpinorField& psi, int steps = 1);
  double dt() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Free Dirac part applied exactly per Fourier mode, potential by Strang splitting.
class DiracStepper {
 public:
  DiracStepper(const GridSpec& grid, HamiltonianSpec ham, double dt);
  ~DiracStepper();
  DiracStepper(DiracStepper&&) noexcept;
  DiracStepper& operator=(DiracStepper&&) noexcept;

  void advance(SpinorField& psi, int steps = 1);
  double dt() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

SpinorField split_step_schrodinger(const SpinorField& psi, const HamiltonianSpec& ham, double dt,
                                   KineticTreatment treatment = KineticTreatment::split_axes);
SpinorField dirac_step_1d(const SpinorField& psi, const HamiltonianSpec& ham, double dt);

// H psi with the unsplit Hamiltonian, derivatives taken spectrally.
SpinorField apply_hamiltonian(const SpinorField& psi, const HamiltonianSpec& ham);

// Free Dirac 2x2 propagator exp(-i H_k tau / hbar) for one wavenumber,
// H_k = c hbar k sigma_x + m c^2 sigma_z.
Eigen::Matrix2cd dirac_mode_propagator(double k, double tau, double mass, double c, double hbar);

// Stored time slices of a propagated field, one per step.
struct PdeRun {
  HamiltonianSpec ham;
  double dt = 0.0;
  std::vector<SpinorField> slices;  // slices[n] at t = n * dt

  double t_end() const { return dt * static_cast<double>(slices.size() - 1); }
};

PdeRun run_pde(const SpinorField& psi0, const HamiltonianSpec& ham, double dt, int steps);

}  // namespace bohm
