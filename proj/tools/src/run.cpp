#include "bohm/cli/run.hpp"

#include "bohm/bohm.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <limits>
#include <optional>

#ifndef BOHMTRAJ_VERSION
#define BOHMTRAJ_VERSION "unknown"
#endif

namespace bohm::cli {
namespace fs = std::filesystem;
using nlohmann::json;

std::string version() { return BOHMTRAJ_VERSION; }

namespace {

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Nan-safe JSON number: non-finite values become strings.
json jnum(double x) { return std::isfinite(x) ? json(x) : json(num(x)); }

class Csv {
 public:
  Csv(const fs::path& path, const std::vector<std::string>& header) : out_(path) {
    if (!out_) throw Error(Errc::io_error, "cannot write " + path.string());
    row(header);
  }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << '\n';
  }

 private:
  std::ofstream out_;
};

struct Setup {
  ScenarioPtr scenario;  // null for pde.field input
  GridSpec grid;
  ProviderPtr provider;
  ConfigSpace space;
  double light_speed = std::numeric_limits<double>::infinity();  // Dirac only
};

HamiltonianSpec pde_hamiltonian(const RunConfig& cfg, const GridSpec& grid) {
  HamiltonianSpec h;
  if (cfg.pde_kind == "dirac1d") {
    h.kind = HamiltonianKind::dirac1d;
    h.k = 2;
    h.dirac_mass = cfg.pde_mass;
    h.c = cfg.pde_c;
  } else {
    h.masses.assign(static_cast<std::size_t>(grid.dim), cfg.pde_mass);
    if (cfg.pde_omega > 0.0) {
      const double k = 0.5 * cfg.pde_mass * cfg.pde_omega * cfg.pde_omega;
      h.potential = MatrixField::scalar(grid, 1, [k](const Vec& q) { return k * q.squaredNorm(); });
    }
  }
  h.validate(grid);
  return h;
}

struct Initial {
  SpinorField psi;
  HamiltonianSpec ham;
};

Initial initial_field(const RunConfig& cfg, const ScenarioPtr& sc, const GridSpec& grid) {
  if (sc) return {sample_scenario(*sc, 0.0, grid), sc->hamiltonian(grid)};
  SpinorField psi = read_field(cfg.pde_field);
  HamiltonianSpec ham = pde_hamiltonian(cfg, psi.grid);
  return {std::move(psi), std::move(ham)};
}

int pde_steps(const RunConfig& cfg) { return static_cast<int>(std::ceil(cfg.T / cfg.dt - 1e-9)); }

Setup make_setup(const RunConfig& cfg) {
  Setup s;
  ProviderOptions opt;
  opt.delta = cfg.delta;
  if (!cfg.scenario.empty()) {
    s.scenario = make_scenario(cfg.scenario);
    const GridSpec rec = s.scenario->recommended_grid();
    s.grid = GridSpec::uniform(s.scenario->dim(), static_cast<int>(cfg.points), cfg.half_width, rec.periodic[0]);
  }
  if (cfg.provider == "analytic") {
    s.provider = build_provider(s.scenario, opt);
  } else {
    Initial init = initial_field(cfg, s.scenario, s.grid);
    if (!s.scenario) s.grid = init.psi.grid;
    const PdeRun pde = run_pde(init.psi, init.ham, cfg.dt, pde_steps(cfg));
    const ConfigSpace space = s.scenario ? s.scenario->config_space() : ConfigSpace::free(s.grid.dim);
    s.provider = build_provider(pde, space, opt);
  }
  s.space = s.provider->config_space();
  const CurrentLaw law = s.scenario ? s.scenario->law() : CurrentLaw{};
  if (s.scenario && law.kind == CurrentLaw::Kind::dirac) s.light_speed = law.c;
  if (!s.scenario && cfg.pde_kind == "dirac1d") s.light_speed = cfg.pde_c;
  return s;
}

IntegratorConfig integrator(const RunConfig& cfg) {
  IntegratorConfig ic;
  ic.rel_tol = cfg.tol_rel;
  ic.abs_tol = cfg.tol_abs;
  ic.node_policy.epsilon_node = cfg.epsilon_node;
  ic.escape_radius = cfg.escape_radius;
  ic.max_steps = cfg.max_steps;
  return ic;
}

CheckResult check_at_most(std::string name, double value, double limit, std::string detail = {}) {
  return {std::move(name), value <= limit, value, limit, std::move(detail)};
}

struct Context {
  const RunConfig& cfg;
  fs::path dir;
  RunResult& result;
  json summary = json::object();

  fs::path artifact(const std::string& rel) {
    result.artifacts.push_back(rel);
    const fs::path p = dir / rel;
    fs::create_directories(p.parent_path());
    return p;
  }
};

void do_propagate(Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  ScenarioPtr sc;
  GridSpec grid;
  if (!cfg.scenario.empty()) {
    sc = make_scenario(cfg.scenario);
    grid = GridSpec::uniform(sc->dim(), static_cast<int>(cfg.points), cfg.half_width,
                             sc->recommended_grid().periodic[0]);
  }
  Initial init = initial_field(cfg, sc, grid);
  SpinorField psi = std::move(init.psi);
  const int steps = pde_steps(cfg);
  std::optional<SchrodingerStepper> schrodinger;
  std::optional<DiracStepper> dirac;
  if (init.ham.kind == HamiltonianKind::dirac1d)
    dirac.emplace(psi.grid, init.ham, cfg.dt);
  else
    schrodinger.emplace(psi.grid, init.ham, cfg.dt);

  Csv norms(ctx.artifact("norms.csv"), {"step", "t", "norm_squared"});
  const double norm0 = psi.norm_squared();
  double drift = 0.0;
  auto save = [&](int step) {
    char name[40];
    std::snprintf(name, sizeof name, "slices/slice_%06d.bin", step);
    write_field(ctx.artifact(name), psi);
  };
  norms.row({"0", num(0.0), num(norm0)});
  save(0);
  for (int n = 1; n <= steps; ++n) {
    if (dirac)
      dirac->advance(psi);
    else
      schrodinger->advance(psi);
    const double nrm = psi.norm_squared();
    drift = std::max(drift, std::abs(nrm - norm0));
    norms.row({std::to_string(n), num(n * cfg.dt), num(nrm)});
    if (n % cfg.save_every == 0 || n == steps) save(n);
  }
  ctx.summary["steps"] = steps;
  ctx.summary["t_end"] = steps * cfg.dt;
  ctx.summary["norm_squared_initial"] = norm0;
  ctx.summary["max_norm_drift"] = drift;
  if (sc) {
    double err = 0.0;
    const SpinorField exact = sample_scenario(*sc, steps * cfg.dt, psi.grid);
    for (std::size_t i = 0; i < psi.data.size(); ++i) err = std::max(err, std::abs(psi.data[i] - exact.data[i]));
    ctx.summary["max_error_vs_closed_form"] = err;
  }
  ctx.result.checks.push_back(check_at_most("norm_drift", drift, cfg.norm_drift_max));
}

void do_trajectories(Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  const Setup s = make_setup(cfg);
  const IntegratorConfig ic = integrator(cfg);
  const Ensemble e0 = sample_initial(*s.provider, s.grid, static_cast<std::size_t>(cfg.n), cfg.seed);
  const int d = s.provider->dim();
  const std::size_t nsub = s.space.singular.size();

  std::vector<std::string> head{"traj_id", "t"};
  for (int a = 1; a <= d; ++a) head.push_back("q_" + std::to_string(a));
  head.insert(head.end(), {"j0", "status"});
  Csv traj(ctx.artifact("trajectories.csv"), head);

  std::vector<std::string> dhead{"traj_id"};
  for (int a = 1; a <= d; ++a) dhead.push_back("q0_" + std::to_string(a));
  dhead.insert(dhead.end(), {"status", "t_end", "tau", "L", "D"});
  for (std::size_t m = 1; m <= nsub; ++m) dhead.push_back("V_" + std::to_string(m));
  dhead.insert(dhead.end(), {"steps", "rejected", "error"});
  Csv diag(ctx.artifact("diagnostics.csv"), dhead);

  const bool oracle = s.scenario && cfg.provider == "analytic" && s.scenario->trajectory(e0.points[0], cfg.T);
  const bool dirac = std::isfinite(s.light_speed);
  double oracle_err = 0.0, max_speed = 0.0;
  long errors = 0;
  json counts = json::object();
  for (std::size_t i = 0; i < e0.size(); ++i) {
    const std::string id = std::to_string(i);
    std::vector<std::string> row{id};
    for (int a = 0; a < d; ++a) row.push_back(num(e0.points[i](a)));
    try {
      const Trajectory tr = integrate(*s.provider, s.space, e0.points[i], cfg.T, ic);
      const std::string status(to_string(tr.status));
      counts[status] = counts.value(status, 0) + 1;
      for (const TrajectorySample& smp : tr.samples) {
        std::vector<std::string> r{id, num(smp.t)};
        for (int a = 0; a < d; ++a) r.push_back(num(smp.q(a)));
        r.insert(r.end(), {num(smp.j0), status});
        traj.row(r);
        if (dirac) {
          const CurrentSample c = s.provider->current(smp.t, smp.q);
          max_speed = std::max(max_speed, c.J.norm() / c.j0);
        }
      }
      if (oracle && tr.status == TrajectoryStatus::completed)
        oracle_err = std::max(oracle_err, (tr.final_point() - *s.scenario->trajectory(e0.points[i], cfg.T)).norm());
      row.insert(row.end(), {status, num(tr.final_time()), tr.tau_estimate ? num(*tr.tau_estimate) : "",
                             num(tr.diagnostics.L), num(tr.diagnostics.D)});
      for (std::size_t m = 0; m < nsub; ++m)
        row.push_back(m < tr.diagnostics.V_per_subspace.size() ? num(tr.diagnostics.V_per_subspace[m]) : "");
      row.insert(row.end(), {std::to_string(tr.steps), std::to_string(tr.rejected), ""});
    } catch (const Error& err) {
      ++errors;
      counts["error"] = counts.value("error", 0) + 1;
      row.insert(row.end(), {"error", "", "", "", ""});
      for (std::size_t m = 0; m < nsub; ++m) row.push_back("");
      std::string msg = err.what();
      std::replace(msg.begin(), msg.end(), ',', ';');
      row.insert(row.end(), {"", "", msg});
    }
    diag.row(row);
  }
  ctx.summary["trajectories"] = e0.size();
  ctx.summary["status_counts"] = counts;
  ctx.result.checks.push_back(check_at_most("integration_errors", static_cast<double>(errors), 0.0));
  if (oracle) ctx.result.checks.push_back(check_at_most("closed_form_trajectory", oracle_err, cfg.oracle_max));
  if (dirac)
    ctx.result.checks.push_back(
        check_at_most("light_cone", max_speed, s.light_speed * (1.0 + 1e-12), "max |J|/j0 over all samples"));
}

std::vector<Box> verify_boxes(const Setup& s, long count) {
  const MarginalCdf F(*s.provider, s.grid, 0.0);
  std::vector<double> edges;
  for (long b = 0; b <= count; ++b) edges.push_back(F.quantile(0.1 + 0.8 * static_cast<double>(b) / count));
  const int d = s.provider->dim();
  std::vector<Box> boxes;
  for (long b = 0; b < count; ++b) {
    Box box{Vec::Constant(d, edges.front()), Vec::Constant(d, edges.back())};
    box.lo(0) = edges[b];
    box.hi(0) = edges[b + 1];
    boxes.push_back(box);
  }
  return boxes;
}

void do_verify(Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  const Setup s = make_setup(cfg);
  const IntegratorConfig ic = integrator(cfg);
  const Ensemble e0 = sample_initial(*s.provider, s.grid, static_cast<std::size_t>(cfg.n), cfg.seed);
  const Ensemble eT = pushforward(e0, *s.provider, s.space, cfg.T, ic, static_cast<unsigned>(cfg.workers));
  const ComparisonResult r = equivariance_test(eT, *s.provider, cfg.T, static_cast<int>(cfg.bins), s.grid);

  json cmp{{"l1_distance", r.l1_distance},     {"ks_distance", r.ks_distance},
           {"n_effective", r.n_effective},     {"n_total", r.n_total},
           {"cemetery_fraction", r.cemetery_fraction}, {"dominance_violations", r.dominance_violations},
           {"noise_floor", r.noise_floor},     {"bins", json::array()}};
  Csv hist(ctx.artifact("histogram.csv"), {"bin", "lo", "hi", "expected", "observed"});
  for (std::size_t b = 0; b < r.bins.size(); ++b) {
    const HistogramBin& bin = r.bins[b];
    cmp["bins"].push_back({{"lo", jnum(bin.lo)}, {"hi", jnum(bin.hi)}, {"expected", bin.expected},
                           {"observed", bin.observed}});
    hist.row({std::to_string(b), num(bin.lo), num(bin.hi), num(bin.expected), num(bin.observed)});
  }
  std::ofstream(ctx.artifact("comparison.json")) << cmp.dump(2) << '\n';

  const int d = s.provider->dim();
  std::vector<std::string> head{"box"};
  for (int a = 1; a <= d; ++a) head.push_back("lo_" + std::to_string(a));
  for (int a = 1; a <= d; ++a) head.push_back("hi_" + std::to_string(a));
  head.insert(head.end(), {"mu0", "mut", "discrepancy", "mesh", "error"});
  Csv tc(ctx.artifact("transport.csv"), head);
  double worst = 0.0;
  std::string failed_box;
  const std::vector<Box> boxes = verify_boxes(s, cfg.boxes);
  for (std::size_t b = 0; b < boxes.size(); ++b) {
    std::vector<std::string> row{std::to_string(b)};
    for (int a = 0; a < d; ++a) row.push_back(num(boxes[b].lo(a)));
    for (int a = 0; a < d; ++a) row.push_back(num(boxes[b].hi(a)));
    try {
      const TransportResult t = transport_check(*s.provider, s.space, {boxes[b]}, cfg.T, ic, static_cast<int>(cfg.mesh))[0];
      worst = std::max(worst, t.discrepancy);
      row.insert(row.end(), {num(t.mu0), num(t.mut), num(t.discrepancy), std::to_string(t.mesh), ""});
    } catch (const Error& e) {
      worst = std::numeric_limits<double>::infinity();
      if (failed_box.empty()) failed_box = "box " + std::to_string(b) + ": " + e.what();
      std::string msg = e.what();
      std::replace(msg.begin(), msg.end(), ',', ';');
      row.insert(row.end(), {"", "", "", std::to_string(cfg.mesh), msg});
    }
    tc.row(row);
  }

  std::ofstream rep(ctx.artifact("report.txt"));
  char line[160];
  std::snprintf(line, sizeof line, "%-24s %14s\n", "quantity", "value");
  rep << line;
  const std::pair<const char*, double> rows[] = {
      {"l1_distance", r.l1_distance},   {"ks_distance", r.ks_distance},
      {"noise_floor", r.noise_floor},   {"cemetery_fraction", r.cemetery_fraction},
      {"dominance_violations", static_cast<double>(r.dominance_violations)},
      {"n_effective", static_cast<double>(r.n_effective)}, {"transport_max", worst}};
  for (const auto& [k, v] : rows) {
    std::snprintf(line, sizeof line, "%-24s %14.6g\n", k, v);
    rep << line;
  }

  ctx.summary["l1_distance"] = r.l1_distance;
  ctx.summary["noise_floor"] = r.noise_floor;
  ctx.summary["transport_max_discrepancy"] = jnum(worst);
  ctx.result.checks.push_back(check_at_most("equivariance_l1", r.l1_distance, cfg.l1_max,
                                            "iid noise floor " + num(r.noise_floor)));
  ctx.result.checks.push_back(check_at_most("cemetery_fraction", r.cemetery_fraction, cfg.cemetery_max));
  ctx.result.checks.push_back(check_at_most("transport", worst, cfg.transport_max, failed_box));
}

void do_conditions(Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  const Setup s = make_setup(cfg);
  ConfigSpace space = s.space;
  if (!cfg.delta) space.delta = default_delta(*s.provider, space, s.grid);
  const ConditionReport rep =
      condition_integrals(*s.provider, space, cfg.radius, cfg.T, {cfg.h, cfg.quad_dt, cfg.epsilon_node});
  const Ensemble eT = pushforward(sample_initial(*s.provider, s.grid, static_cast<std::size_t>(cfg.n), cfg.seed),
                                  *s.provider, space, cfg.T, integrator(cfg), static_cast<unsigned>(cfg.workers));
  const ExpectedDistance ed = expected_distance_check(eT, rep);

  json singular = json::array();
  for (double v : rep.I_singular) singular.push_back(jnum(v));
  const json out{{"I_node", jnum(rep.I_node)},
                 {"node_excluded_mass", jnum(rep.node_excluded_mass)},
                 {"I_escape", jnum(rep.I_escape)},
                 {"I_singular", singular},
                 {"delta", rep.delta},
                 {"ED_bound", jnum(rep.ED_bound)},
                 {"R", rep.R},
                 {"T", rep.T},
                 {"h", rep.h},
                 {"dt", rep.dt},
                 {"quadrature_order", rep.quadrature_order},
                 {"expected_distance",
                  {{"mean_D", jnum(ed.mean_D)},
                   {"standard_error", jnum(ed.standard_error)},
                   {"bound", jnum(ed.bound)},
                   {"margin_in_sigmas", jnum(ed.margin_in_sigmas)},
                   {"n", eT.size()}}}};
  std::ofstream(ctx.artifact("conditions.json")) << out.dump(2) << '\n';

  std::ofstream txt(ctx.artifact("report.txt"));
  char line[160];
  auto put = [&](const std::string& k, double v) {
    std::snprintf(line, sizeof line, "%-20s %24.17g\n", k.c_str(), v);
    txt << line;
  };
  put("I_node", rep.I_node);
  put("node_excluded_mass", rep.node_excluded_mass);
  put("I_escape", rep.I_escape);
  for (std::size_t m = 0; m < rep.I_singular.size(); ++m) put("I_singular_" + std::to_string(m + 1), rep.I_singular[m]);
  put("delta", rep.delta);
  put("ED_bound", rep.ED_bound);
  put("mean_D", ed.mean_D);
  put("standard_error", ed.standard_error);

  bool finite = std::isfinite(rep.I_node) && std::isfinite(rep.I_escape) && std::isfinite(rep.ED_bound);
  for (double v : rep.I_singular) finite = finite && std::isfinite(v);
  ctx.result.checks.push_back({"integrals_finite", finite, finite ? 1.0 : 0.0, 1.0, ""});
  // Rounding allowance for uniform-speed flows, where D equals the bound exactly.
  const double limit = ed.bound + cfg.sigmas * ed.standard_error + 1e-9 * ed.bound;
  ctx.result.checks.push_back(check_at_most("expected_distance", ed.mean_D, limit, "mean D against ED_bound"));
  ctx.summary["I_node"] = jnum(rep.I_node);
  ctx.summary["I_escape"] = jnum(rep.I_escape);
  ctx.summary["ED_bound"] = jnum(rep.ED_bound);
}

std::string utc_now() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

RunResult run(const RunConfig& cfg) {
  RunResult result;
  result.directory = fs::path(cfg.out) / cfg.command;
  const auto start = std::chrono::steady_clock::now();
  const std::string started = utc_now();
  std::error_code ec;
  fs::remove_all(result.directory, ec);
  fs::create_directories(result.directory);

  Context ctx{cfg, result.directory, result};
  {
    std::ofstream(ctx.artifact("config.ini")) << emit_ini(cfg);
  }
  try {
    if (cfg.command == "propagate")
      do_propagate(ctx);
    else if (cfg.command == "trajectories")
      do_trajectories(ctx);
    else if (cfg.command == "verify")
      do_verify(ctx);
    else if (cfg.command == "conditions")
      do_conditions(ctx);
    else
      throw Error(Errc::invalid_argument, "unknown command '" + cfg.command + "'");
    const bool ok = std::all_of(result.checks.begin(), result.checks.end(), [](const CheckResult& c) { return c.passed; });
    result.exit_code = ok ? exit_ok : exit_check_failed;
  } catch (const std::exception& e) {
    result.error = e.what();
    result.exit_code = exit_runtime_error;
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  json checks = json::array();
  for (const CheckResult& c : result.checks)
    checks.push_back({{"name", c.name}, {"passed", c.passed}, {"value", jnum(c.value)}, {"limit", jnum(c.limit)},
                      {"detail", c.detail}});
  char eigen[32];
  std::snprintf(eigen, sizeof eigen, "%d.%d.%d", EIGEN_WORLD_VERSION, EIGEN_MAJOR_VERSION, EIGEN_MINOR_VERSION);
  const json manifest{{"tool", "bohmtraj"},
                      {"versions", {{"bohmtraj", version()}, {"eigen", eigen}, {"fft", fft_backend_version()},
                                    {"compiler", __VERSION__}}},
                      {"config", to_json(cfg)},
                      {"seed", cfg.seed},
                      {"started_utc", started},
                      {"wall_time_s", wall},
                      {"artifacts", result.artifacts},
                      {"summary", ctx.summary},
                      {"checks", checks},
                      {"exit_code", result.exit_code},
                      {"error", result.error.empty() ? json(nullptr) : json(result.error)}};
  std::ofstream(result.directory / "manifest.json") << manifest.dump(2) << '\n';
  return result;
}

}  // namespace bohm::cli
