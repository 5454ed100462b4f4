#pragma once

#include "bohm/ensemble.hpp"

#include <vector>

namespace bohm {

// Cumulative distribution of the axis-0 marginal of j0(t, .), by Gauss-Legendre
// quadrature over the cells of grid (the remaining axes are summed on nodes).
class MarginalCdf {
 public:
  MarginalCdf(const CurrentProvider& provider, const GridSpec& grid, double t);

  double density(double x) const;
  double operator()(double x) const;
  double total() const { return cumulative_.back(); }
  // Smallest x with F(x) = p * total (bisection).
  double quantile(double p) const;

 private:
  const CurrentProvider& provider_;
  GridSpec grid_;
  double t_;
  std::vector<double> cumulative_;  // at the cell edges of axis 0
};

struct HistogramBin {
  double lo = 0.0, hi = 0.0;  // outer bins are unbounded
  double expected = 0.0;      // mu_T mass
  double observed = 0.0;      // surviving count / n
};

struct ComparisonResult {
  double l1_distance = 0.0;
  double ks_distance = 0.0;
  std::vector<HistogramBin> bins;
  std::size_t n_effective = 0;
  std::size_t n_total = 0;
  double cemetery_fraction = 0.0;
  // Bins where the empirical mass exceeds mu_T by more than 3 binomial standard errors.
  int dominance_violations = 0;
  // Expected L1 of an exact i.i.d. sample of the same size.
  double noise_floor = 0.0;
};

// Histograms the survivors of a pushed ensemble into equal-mass bins of mu_T
// (axis-0 marginal) and compares. Masses are fractions of the full ensemble,
// so the cemetery shows up as a deficit. Throws TooFewSurvivors below 100.
ComparisonResult equivariance_test(const Ensemble& ens_T, const CurrentProvider& provider, double T, int bins,
                                   const GridSpec& grid);

struct Box {
  Vec lo, hi;
};

struct TransportResult {
  double mu0 = 0.0;  // mu_0(B)
  double mut = 0.0;  // mu_t(phi_t(B))
  double discrepancy = 0.0;
  int mesh = 0;
};

// Transports the boundary of each box (mesh points per edge, corners included)
// and integrates j0(t, .) over the convex hull of the image with a quadrature
// whose resolution follows the mesh. In 1D only the interval end points move. Throws BoxTooLarge when the transported boundary
// self-intersects.
std::vector<TransportResult> transport_check(const CurrentProvider& provider, const ConfigSpace& space,
                                             const std::vector<Box>& boxes, double t,
                                             const IntegratorConfig& cfg = {}, int mesh = 16);

}  // namespace bohm
