#include "bohm/cli/config.hpp"
#include "bohm/cli/run.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <iostream>
#include <map>

namespace {

using bohm::cli::ConfigError;

// Flag name (without dashes) to config key.
const std::vector<std::pair<std::string, std::string>> kFlagKeys{
    {"scenario", "run.scenario"},
    {"pde", "pde.field"},
    {"provider", "run.provider"},
    {"dt", "run.dt"},
    {"T", "run.T"},
    {"n", "run.n"},
    {"seed", "run.seed"},
    {"workers", "run.workers"},
    {"out", "run.out"},
    {"tol-rel", "integrator.tol_rel"},
    {"tol-abs", "integrator.tol_abs"},
    {"epsilon-node", "integrator.epsilon_node"},
    {"escape-radius", "integrator.escape_radius"},
    {"delta", "conditions.delta"},
    {"radius", "conditions.radius"},
    {"bins", "verify.bins"},
    {"mesh", "verify.mesh"},
    {"save-every", "propagate.save_every"},
};

struct Flags {
  std::string config;
  std::string grid;
  std::map<std::string, std::string> values;
  std::vector<std::string> sets;
  bool print_config = false;
};

void add_options(CLI::App& sub, Flags& f) {
  sub.add_option("--config", f.config, "INI config, config JSON or run manifest");
  sub.add_option("--grid", f.grid, "points per axis, optionally points:half_width");
  for (const auto& [flag, key] : kFlagKeys) sub.add_option("--" + flag, f.values[flag], "sets " + key);
  sub.add_option("--set", f.sets, "any key as section.name=value")->allow_extra_args(false);
  sub.add_flag("--print-config", f.print_config, "print the validated config and exit");
}

void set_from_flag(bohm::cli::ParsedConfig& p, const std::string& key, const std::string& value,
                   const std::string& flag) {
  try {
    bohm::cli::set_value(p.config, key, value);
  } catch (const ConfigError& e) {
    throw ConfigError(flag + ": " + e.what());
  }
  p.origins[key] = flag;
}

bohm::cli::ParsedConfig assemble(const std::string& command, const CLI::App& sub, const Flags& f) {
  bohm::cli::ParsedConfig p;
  if (!f.config.empty()) bohm::cli::apply_file(p, f.config);
  p.config.command = command;
  p.origins["command"] = "command line";
  if (!f.grid.empty()) {
    const auto colon = f.grid.find(':');
    set_from_flag(p, "grid.points", f.grid.substr(0, colon), "--grid");
    if (colon != std::string::npos) set_from_flag(p, "grid.half_width", f.grid.substr(colon + 1), "--grid");
  }
  for (const auto& [flag, key] : kFlagKeys)
    if (sub.count("--" + flag) > 0) set_from_flag(p, key, f.values.at(flag), "--" + flag);
  for (const std::string& s : f.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("--set " + s + ": expected section.name=value");
    set_from_flag(p, s.substr(0, eq), s.substr(eq + 1), "--set " + s.substr(0, eq));
  }
  bohm::cli::validate(p);
  return p;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bohmian trajectory runs: propagate, trajectories, verify, conditions", "bohmtraj"};
  app.set_version_flag("--version", bohm::cli::version());
  app.require_subcommand(1);
  Flags flags;
  std::vector<CLI::App*> subs;
  for (const std::string& c : bohm::cli::commands()) {
    CLI::App* sub = app.add_subcommand(c, "run the " + c + " stage");
    add_options(*sub, flags);
    subs.push_back(sub);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : bohm::cli::exit_config_error;
  }

  CLI::App* chosen = nullptr;
  for (CLI::App* s : subs)
    if (s->parsed()) chosen = s;

  bohm::cli::ParsedConfig parsed;
  try {
    parsed = assemble(chosen->get_name(), *chosen, flags);
  } catch (const std::exception& e) {
    std::cerr << "bohmtraj: config error: " << e.what() << '\n';
    return bohm::cli::exit_config_error;
  }
  if (flags.print_config) {
    std::cout << bohm::cli::emit_ini(parsed.config);
    return 0;
  }

  const bohm::cli::RunResult r = bohm::cli::run(parsed.config);
  for (const auto& c : r.checks) {
    std::printf("[%s] %s: %.6g (limit %.6g)%s%s\n", c.passed ? "PASS" : "FAIL", c.name.c_str(), c.value, c.limit,
                c.detail.empty() ? "" : "; ", c.detail.c_str());
    if (!c.passed) std::cerr << "bohmtraj: check failed: " << c.name << '\n';
  }
  if (!r.error.empty()) std::cerr << "bohmtraj: error: " << r.error << '\n';
  std::printf("artifacts in %s\n", r.directory.string().c_str());
  return r.exit_code;
}
