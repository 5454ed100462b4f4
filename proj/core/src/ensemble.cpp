#include "bohm/ensemble.hpp"

#include "bohm/numerics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

namespace bohm {

namespace {

struct CellCdf {
  std::vector<double> cumulative;  // normalized, cumulative.back() == 1
};

CellCdf cell_cdf(const CurrentProvider& provider, const GridSpec& grid, double t) {
  require(grid.dim == provider.dim(), Errc::dimension_mismatch, "sampling grid dimension");
  std::vector<double> mass(grid.size());
  const double vol = grid.cell_volume();
  for (std::size_t c = 0; c < grid.size(); ++c) {
    const double j0 = provider.current(t, grid.cell_center(c)).j0;
    mass[c] = std::isfinite(j0) && j0 > 0.0 ? j0 * vol : 0.0;
  }
  const double total = pairwise_sum(mass);
  require(total > 0.0 && std::isfinite(total), Errc::degenerate_density, "j0 integrates to zero on the grid");
  CellCdf cdf;
  cdf.cumulative.resize(mass.size());
  double run = 0.0;
  for (std::size_t c = 0; c < mass.size(); ++c) {
    run += mass[c];
    cdf.cumulative[c] = run / total;
  }
  cdf.cumulative.back() = 1.0;
  return cdf;
}

Vec draw(const GridSpec& grid, const CellCdf& cdf, double u, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto it = std::upper_bound(cdf.cumulative.begin(), cdf.cumulative.end(), u);
  if (it == cdf.cumulative.end()) --it;
  const std::size_t cell = static_cast<std::size_t>(it - cdf.cumulative.begin());
  const auto idx = grid.unflatten(cell);
  Vec q(grid.dim);
  for (int a = 0; a < grid.dim; ++a) q(a) = grid.coordinate(a, idx[a]) + unit(rng) * grid.spacing(a);
  return q;
}

}  // namespace

std::mt19937_64 stream_for(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

std::size_t Ensemble::survivors() const {
  std::size_t n = 0;
  for (std::size_t i = 0; i < terminal.size(); ++i) n += survived(i) ? 1 : 0;
  return n;
}

double Ensemble::cemetery_fraction() const {
  if (points.empty()) return 0.0;
  return static_cast<double>(points.size() - survivors()) / static_cast<double>(points.size());
}

double Ensemble::fraction(TrajectoryStatus s) const {
  if (points.empty()) return 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < status.size(); ++i) n += (errors[i].empty() && status[i] == s) ? 1 : 0;
  return static_cast<double>(n) / static_cast<double>(points.size());
}

Ensemble sample_initial(const CurrentProvider& provider, const GridSpec& grid, std::size_t n, std::uint64_t seed,
                        double t) {
  require(n >= 1, Errc::invalid_argument, "ensemble size must be positive");
  const CellCdf cdf = cell_cdf(provider, grid, t);
  Ensemble ens;
  ens.seed = seed;
  ens.t = t;
  ens.points.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto rng = stream_for(seed, i);
    const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    ens.points.push_back(draw(grid, cdf, u, rng));
  }
  return ens;
}

Ensemble sample_stratified(const CurrentProvider& provider, const GridSpec& grid, std::size_t n,
                           std::uint64_t seed, double t) {
  require(n >= 1, Errc::invalid_argument, "ensemble size must be positive");
  const CellCdf cdf = cell_cdf(provider, grid, t);
  Ensemble ens;
  ens.seed = seed;
  ens.t = t;
  for (std::size_t i = 0; i < n; ++i) {
    auto rng = stream_for(seed, i);
    const double u = (static_cast<double>(i) + std::uniform_real_distribution<double>(0.0, 1.0)(rng)) /
                     static_cast<double>(n);
    ens.points.push_back(draw(grid, cdf, u, rng));
  }
  return ens;
}

Ensemble pushforward(const Ensemble& ensemble, const CurrentProvider& provider, const ConfigSpace& space, double T,
                     const IntegratorConfig& cfg, unsigned workers) {
  cfg.validate(provider);
  Ensemble out = ensemble;
  const std::size_t n = ensemble.size();
  out.t = T;
  out.terminal.assign(n, Vec());
  out.status.assign(n, TrajectoryStatus::completed);
  out.tau.assign(n, std::nullopt);
  out.diagnostics.assign(n, DiagnosticRecord{});
  out.errors.assign(n, std::string());

  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        const Trajectory tr = integrate(provider, space, ensemble.points[i], T, cfg, ensemble.t);
        out.terminal[i] = tr.final_point();
        out.status[i] = tr.status;
        out.tau[i] = tr.tau_estimate;
        out.diagnostics[i] = tr.diagnostics;
      } catch (const std::exception& e) {
        out.terminal[i] = ensemble.points[i];
        out.errors[i] = e.what();
      }
    }
  };
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(n, 1)));
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  return out;
}

}  // namespace bohm
