#pragma once

#include "bohm/current.hpp"
#include "bohm/propagate.hpp"

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace bohm {

inline constexpr int kMaxComponents = 4;
using Spinor = Eigen::Matrix<Complex, Eigen::Dynamic, 1, 0, kMaxComponents, 1>;

// How a wavefunction is turned into a current.
struct CurrentLaw {
  enum class Kind { schrodinger, dirac } kind = Kind::schrodinger;
  std::vector<double> masses;  // Schrodinger: one per axis
  double hbar = 1.0;
  std::vector<CMatrix> alphas;  // Dirac: one per axis
  double c = 1.0;

  static CurrentLaw schrodinger(int dim, double mass = 1.0, double hbar = 1.0);
  static CurrentLaw dirac_1d(double c = 1.0);

  // (j0, J) from psi and its spatial gradient (one spinor per axis).
  CurrentSample evaluate(const Spinor& psi, const std::vector<Spinor>& grad) const;
};

// Closed-form wavefunction with its exact derivatives, used as an oracle.
class Scenario {
 public:
  virtual ~Scenario() = default;

  virtual std::string name() const = 0;
  virtual int dim() const = 0;
  virtual int components() const { return 1; }

  virtual Spinor psi(double t, const Vec& q) const = 0;
  virtual Spinor dpsi_dq(double t, const Vec& q, int axis) const = 0;
  virtual Spinor dpsi_dt(double t, const Vec& q) const = 0;

  virtual CurrentLaw law() const { return CurrentLaw::schrodinger(dim()); }
  // Scalar potential multiplying the identity (residual checks, PDE setup).
  virtual double potential(const Vec&) const { return 0.0; }
  // Hamiltonian on a grid for the spectral steppers.
  virtual HamiltonianSpec hamiltonian(const GridSpec& grid) const;

  virtual GridSpec recommended_grid() const = 0;
  virtual TimeWindow horizon() const = 0;
  virtual ConfigSpace config_space() const { return ConfigSpace::free(dim()); }
  // Stationary states have a time-independent current.
  virtual bool stationary() const { return false; }
  // Exact Bohmian trajectory, when known in closed form.
  virtual std::optional<Vec> trajectory(const Vec& /*q0*/, double /*t*/) const { return std::nullopt; }
};

using ScenarioPtr = std::shared_ptr<const Scenario>;

struct FreeGaussianParams {
  int dim = 1;
  double sigma = 1.0;
  std::vector<double> center;    // default: origin
  std::vector<double> momentum;  // default: zero
  double mass = 1.0;
  double hbar = 1.0;
};

ScenarioPtr make_free_gaussian(FreeGaussianParams params = {});
// (phi_0 + phi_2) / sqrt 2 of the harmonic oscillator; nodes at omega t = pi/2 mod pi.
ScenarioPtr make_oscillator_superposition(double omega = 1.0);
// Displaced oscillator ground state, rigidly oscillating.
ScenarioPtr make_oscillator_coherent(double omega = 1.0, double displacement = 1.0);
// sqrt(lambda) exp(-lambda |q|): bound state of an attractive point interaction at 0.
ScenarioPtr make_hydrogenic(double lambda = 1.0);
// exp(i (k q - omega t)) normalized on a periodic box of whole wavelengths.
ScenarioPtr make_plane_wave(double k = 1.0, int wavelengths = 8);
// Massless 1D Dirac packet f(q - c t) (1, 1) / sqrt 2.
ScenarioPtr make_dirac_packet(double sigma = 1.0, double k0 = 2.0, double c = 1.0);
// Two particles on a line, antisymmetrized colliding Gaussians; vanishes on q1 = q2.
ScenarioPtr make_coincidence(double separation = 4.0, double momentum = 1.0, double sigma = 1.0);

std::vector<std::string> scenario_names();
ScenarioPtr make_scenario(std::string_view name);

// Closed-form value; throws OutOfDomain outside the scenario horizon.
Spinor scenario_eval(const Scenario& s, double t, const Vec& q);

// Real node positions of the oscillator superposition at time t (empty when none).
std::vector<double> oscillator_superposition_nodes(double omega, double t, double tol = 1e-12);

}  // namespace bohm
