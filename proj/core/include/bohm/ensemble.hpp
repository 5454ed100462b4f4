#pragma once

#include "bohm/trajectory.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace bohm {

// Independent stream for item `index` of a run seeded with `seed`; batch order
// and worker count never change what an item draws.
std::mt19937_64 stream_for(std::uint64_t seed, std::uint64_t index);

struct Ensemble {
  std::uint64_t seed = 0;
  double t = 0.0;
  std::vector<Vec> points;  // initial configurations, each weighted 1/n

  // Filled by pushforward; index-aligned with points.
  std::vector<Vec> terminal;
  std::vector<TrajectoryStatus> status;
  std::vector<std::optional<double>> tau;
  std::vector<DiagnosticRecord> diagnostics;
  std::vector<std::string> errors;  // empty string when the point integrated normally

  std::size_t size() const { return points.size(); }
  bool pushed() const { return !terminal.empty(); }
  bool survived(std::size_t i) const { return errors[i].empty() && status[i] == TrajectoryStatus::completed; }
  std::size_t survivors() const;
  double cemetery_fraction() const;
  double fraction(TrajectoryStatus s) const;
};

// n i.i.d. draws from j0(t, .): inverse CDF over the cells of `grid`
// (cell-centre density times volume), then uniform within the cell.
Ensemble sample_initial(const CurrentProvider& provider, const GridSpec& grid, std::size_t n, std::uint64_t seed,
                        double t = 0.0);

// Stratified variant: the i-th draw uses the quantile (i + u_i)/n. Not i.i.d.;
// used to separate dynamics error from sampling noise.
Ensemble sample_stratified(const CurrentProvider& provider, const GridSpec& grid, std::size_t n,
                           std::uint64_t seed, double t = 0.0);

// Integrates every point of an ensemble from its time to T. Per-point failures
// are recorded in `errors` and never abort the batch.
Ensemble pushforward(const Ensemble& ensemble, const CurrentProvider& provider, const ConfigSpace& space, double T,
                     const IntegratorConfig& cfg = {}, unsigned workers = 0);

}  // namespace bohm
