#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace bohm::cli {

// Flat run configuration. Every field has an INI key "section.name"; unset
// optionals are written as "auto".
struct RunConfig {
  std::string command;  // propagate | trajectories | verify | conditions

  // [run]
  std::string scenario;
  std::string provider = "auto";  // analytic | grid
  double T = 1.0;
  double dt = 0.01;               // PDE step (grid provider, propagate)
  long n = 1000;
  std::uint64_t seed = 1;
  long workers = 0;
  std::string out = "bohmtraj_out";

  // [grid]; zero means the scenario's recommended grid
  long points = 0;
  double half_width = 0.0;

  // [pde]: initial data from a field file instead of a named scenario
  std::string pde_field;
  std::string pde_kind = "schrodinger";  // schrodinger | dirac1d
  double pde_mass = 1.0;
  double pde_omega = 0.0;  // harmonic trap, Schrodinger only
  double pde_c = 1.0;

  // [integrator]
  double tol_rel = 1e-8;
  double tol_abs = 1e-10;
  double epsilon_node = 1e-9;
  std::optional<double> escape_radius;
  long max_steps = 100000;

  // [propagate]
  long save_every = 10;
  double norm_drift_max = 1e-10;

  // [trajectories]
  double oracle_max = 1e-6;

  // [verify]
  long bins = 64;
  double l1_max = 0.05;
  double cemetery_max = 0.01;
  long boxes = 4;
  long mesh = 16;
  double transport_max = 1e-3;

  // [conditions]
  std::optional<double> delta;
  double radius = 0.0;  // zero: smallest grid half-width
  double h = 0.0;       // zero: 0.02 in 1D, 0.1 in 2D
  double quad_dt = 0.05;
  double sigmas = 3.0;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

inline const std::vector<std::string>& commands() {
  static const std::vector<std::string> c{"propagate", "trajectories", "verify", "conditions"};
  return c;
}

// Parse or validation failure; the message names the offending line or flag.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Where each key got its value ("run.ini:4", "--scenario").
using Origins = std::map<std::string, std::string>;

struct ParsedConfig {
  RunConfig config;
  Origins origins;
};

// All keys in emission order.
std::vector<std::string> config_keys();

// Sets one key from its text form.
void set_value(RunConfig& cfg, const std::string& key, const std::string& value);
std::string get_value(const RunConfig& cfg, const std::string& key);

// key = value lines under [section] headers; '#' and ';' start comments.
void apply_ini(ParsedConfig& parsed, const std::string& text, const std::string& source);
std::string emit_ini(const RunConfig& cfg);

nlohmann::json to_json(const RunConfig& cfg);
RunConfig from_json(const nlohmann::json& j);

// Reads an INI file, a config JSON, or a run manifest (its "config" member).
void apply_file(ParsedConfig& parsed, const std::string& path);

// Checks consistency and materializes every data-dependent default.
void validate(ParsedConfig& parsed);

}  // namespace bohm::cli
