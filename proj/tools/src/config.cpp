#include "bohm/cli/config.hpp"

#include "bohm/field_io.hpp"
#include "bohm/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <variant>

namespace bohm::cli {
namespace {

using Member = std::variant<std::string RunConfig::*, long RunConfig::*, std::uint64_t RunConfig::*,
                            double RunConfig::*, std::optional<double> RunConfig::*>;

struct Key {
  const char* name;
  Member member;
};

const std::vector<Key>& key_table() {
  static const std::vector<Key> keys{
      {"run.scenario", &RunConfig::scenario},
      {"run.provider", &RunConfig::provider},
      {"run.T", &RunConfig::T},
      {"run.dt", &RunConfig::dt},
      {"run.n", &RunConfig::n},
      {"run.seed", &RunConfig::seed},
      {"run.workers", &RunConfig::workers},
      {"run.out", &RunConfig::out},
      {"grid.points", &RunConfig::points},
      {"grid.half_width", &RunConfig::half_width},
      {"pde.field", &RunConfig::pde_field},
      {"pde.kind", &RunConfig::pde_kind},
      {"pde.mass", &RunConfig::pde_mass},
      {"pde.omega", &RunConfig::pde_omega},
      {"pde.c", &RunConfig::pde_c},
      {"integrator.tol_rel", &RunConfig::tol_rel},
      {"integrator.tol_abs", &RunConfig::tol_abs},
      {"integrator.epsilon_node", &RunConfig::epsilon_node},
      {"integrator.escape_radius", &RunConfig::escape_radius},
      {"integrator.max_steps", &RunConfig::max_steps},
      {"propagate.save_every", &RunConfig::save_every},
      {"propagate.norm_drift_max", &RunConfig::norm_drift_max},
      {"trajectories.oracle_max", &RunConfig::oracle_max},
      {"verify.bins", &RunConfig::bins},
      {"verify.l1_max", &RunConfig::l1_max},
      {"verify.cemetery_max", &RunConfig::cemetery_max},
      {"verify.boxes", &RunConfig::boxes},
      {"verify.mesh", &RunConfig::mesh},
      {"verify.transport_max", &RunConfig::transport_max},
      {"conditions.delta", &RunConfig::delta},
      {"conditions.radius", &RunConfig::radius},
      {"conditions.h", &RunConfig::h},
      {"conditions.dt", &RunConfig::quad_dt},
      {"conditions.sigmas", &RunConfig::sigmas},
  };
  return keys;
}

const Key& find_key(const std::string& name) {
  const auto& keys = key_table();
  auto it = std::find_if(keys.begin(), keys.end(), [&](const Key& k) { return name == k.name; });
  if (it == keys.end()) throw ConfigError("unknown key '" + name + "'");
  return *it;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

template <class T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || text.empty())
    throw ConfigError("key '" + key + "': cannot parse '" + text + "' as a number");
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(value)) throw ConfigError("key '" + key + "': value must be finite");
  }
  return value;
}

bool is_auto(const std::string& v) { return v.empty() || v == "auto"; }

std::string origin_of(const Origins& o, const std::string& key) {
  auto it = o.find(key);
  return it == o.end() ? std::string("default") : it->second;
}

[[noreturn]] void reject(const Origins& o, const std::string& key, const std::string& what) {
  throw ConfigError(origin_of(o, key) + ": " + key + " " + what);
}

}  // namespace

std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const Key& k : key_table()) out.emplace_back(k.name);
  return out;
}

void set_value(RunConfig& cfg, const std::string& key, const std::string& raw) {
  const std::string value = trim(raw);
  std::visit(
      [&](auto member) {
        using M = std::remove_reference_t<decltype(cfg.*member)>;
        if constexpr (std::is_same_v<M, std::string>) {
          cfg.*member = value;
        } else if constexpr (std::is_same_v<M, std::optional<double>>) {
          cfg.*member = is_auto(value) ? std::nullopt : std::optional<double>(parse_number<double>(key, value));
        } else {
          cfg.*member = parse_number<M>(key, value);
        }
      },
      find_key(key).member);
}

std::string get_value(const RunConfig& cfg, const std::string& key) {
  return std::visit(
      [&](auto member) -> std::string {
        const auto& v = cfg.*member;
        using M = std::remove_cvref_t<decltype(v)>;
        if constexpr (std::is_same_v<M, std::string>) {
          return v;
        } else if constexpr (std::is_same_v<M, std::optional<double>>) {
          return v ? format_double(*v) : "auto";
        } else if constexpr (std::is_same_v<M, double>) {
          return format_double(v);
        } else {
          return std::to_string(v);
        }
      },
      find_key(key).member);
}

void apply_ini(ParsedConfig& parsed, const std::string& text, const std::string& source) {
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = source + ":" + std::to_string(lineno);
    const auto comment = line.find_first_of("#;");
    if (comment != std::string::npos) line.erase(comment);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
    const std::string name = trim(line.substr(0, eq));
    if (name.empty()) throw ConfigError(where + ": missing key");
    const std::string value = line.substr(eq + 1);
    if (section.empty() && name == "command") {
      parsed.config.command = trim(value);
      parsed.origins["command"] = where;
      continue;
    }
    if (section.empty()) throw ConfigError(where + ": key '" + name + "' outside any [section]");
    const std::string key = section + "." + name;
    try {
      set_value(parsed.config, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(where + ": " + e.what());
    }
    parsed.origins[key] = where;
  }
}

std::string emit_ini(const RunConfig& cfg) {
  std::string out = "command = " + cfg.command + "\n";
  std::string section;
  for (const Key& k : key_table()) {
    const std::string name = k.name;
    const auto dot = name.find('.');
    if (name.substr(0, dot) != section) {
      section = name.substr(0, dot);
      out += "\n[" + section + "]\n";
    }
    out += name.substr(dot + 1) + " = " + get_value(cfg, name) + "\n";
  }
  return out;
}

nlohmann::json to_json(const RunConfig& cfg) {
  nlohmann::json j;
  j["command"] = cfg.command;
  for (const Key& k : key_table()) {
    const std::string name = k.name;
    const auto dot = name.find('.');
    nlohmann::json& slot = j[name.substr(0, dot)][name.substr(dot + 1)];
    std::visit(
        [&](auto member) {
          const auto& v = cfg.*member;
          using M = std::remove_cvref_t<decltype(v)>;
          if constexpr (std::is_same_v<M, std::optional<double>>) {
            slot = v ? nlohmann::json(*v) : nlohmann::json(nullptr);
          } else {
            slot = v;
          }
        },
        k.member);
  }
  return j;
}

RunConfig from_json(const nlohmann::json& j) {
  RunConfig cfg;
  if (!j.is_object()) throw ConfigError("config JSON must be an object");
  cfg.command = j.value("command", std::string());
  for (auto sec = j.begin(); sec != j.end(); ++sec) {
    if (sec.key() == "command") continue;
    if (!sec->is_object()) throw ConfigError("config JSON: '" + sec.key() + "' must be an object");
    for (auto it = sec->begin(); it != sec->end(); ++it) {
      const std::string key = sec.key() + "." + it.key();
      const Key& k = find_key(key);
      try {
        std::visit(
            [&](auto member) {
              using M = std::remove_reference_t<decltype(cfg.*member)>;
              if constexpr (std::is_same_v<M, std::optional<double>>) {
                cfg.*member = it->is_null() ? std::nullopt : std::optional<double>(it->template get<double>());
              } else {
                cfg.*member = it->template get<M>();
              }
            },
            k.member);
      } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config JSON: key '" + key + "': " + e.what());
      }
    }
  }
  return cfg;
}

void apply_file(ParsedConfig& parsed, const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path + ": cannot open config file");
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string::npos || text[first] != '{') {
    apply_ini(parsed, text, path);
    return;
  }
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  if (j.contains("config")) j = j["config"];
  parsed.config = from_json(j);
  parsed.origins.clear();
  parsed.origins["command"] = path;
  for (const auto& key : config_keys()) parsed.origins[key] = path;
}

void validate(ParsedConfig& parsed) {
  RunConfig& c = parsed.config;
  const Origins& o = parsed.origins;
  const auto& cmds = commands();
  if (std::find(cmds.begin(), cmds.end(), c.command) == cmds.end())
    reject(o, "command", "'" + c.command + "' is not one of propagate, trajectories, verify, conditions");

  const bool has_scenario = !c.scenario.empty();
  const bool has_pde = !c.pde_field.empty();
  if (has_scenario && has_pde)
    throw ConfigError("conflicting inputs: run.scenario set at " + origin_of(o, "run.scenario") +
                      " and pde.field set at " + origin_of(o, "pde.field") + "; give exactly one");
  if (!has_scenario && !has_pde) throw ConfigError("no input: set run.scenario (--scenario) or pde.field (--pde)");

  auto positive = [&](const char* key, double v) {
    if (!(v > 0.0)) reject(o, key, "must be positive");
  };
  positive("run.T", c.T);
  positive("run.dt", c.dt);
  positive("run.n", static_cast<double>(c.n));
  positive("integrator.tol_rel", c.tol_rel);
  positive("integrator.tol_abs", c.tol_abs);
  positive("integrator.epsilon_node", c.epsilon_node);
  positive("integrator.max_steps", static_cast<double>(c.max_steps));
  positive("propagate.save_every", static_cast<double>(c.save_every));
  positive("verify.bins", static_cast<double>(c.bins));
  positive("verify.boxes", static_cast<double>(c.boxes));
  positive("conditions.dt", c.quad_dt);
  positive("conditions.sigmas", c.sigmas);
  if (c.workers < 0) reject(o, "run.workers", "must be non-negative");
  if (c.mesh < 2) reject(o, "verify.mesh", "must be at least 2");
  if (c.escape_radius && !(*c.escape_radius > 0.0)) reject(o, "integrator.escape_radius", "must be positive");
  if (c.delta && !(*c.delta > 0.0)) reject(o, "conditions.delta", "must be positive");
  if (c.points < 0 || c.half_width < 0.0) reject(o, "grid.points", "grid parameters must be non-negative");
  if (c.radius < 0.0) reject(o, "conditions.radius", "must be non-negative");
  if (c.h < 0.0) reject(o, "conditions.h", "must be non-negative");
  if (c.out.empty()) reject(o, "run.out", "must not be empty");

  int dim = 1;
  double min_extent = 0.0;
  if (has_scenario) {
    const auto names = scenario_names();
    if (std::find(names.begin(), names.end(), c.scenario) == names.end()) {
      std::string list;
      for (const auto& n : names) list += (list.empty() ? "" : ", ") + n;
      reject(o, "run.scenario", "'" + c.scenario + "' is unknown; choose one of " + list);
    }
    const auto sc = make_scenario(c.scenario);
    dim = sc->dim();
    const GridSpec g = sc->recommended_grid();
    if (c.points == 0) c.points = g.points[0];
    if (c.half_width == 0.0) c.half_width = g.extent[0];
    min_extent = c.half_width;
    if (c.provider == "auto") c.provider = "analytic";
  } else {
    if (c.pde_kind != "schrodinger" && c.pde_kind != "dirac1d")
      reject(o, "pde.kind", "must be schrodinger or dirac1d");
    if (c.provider == "auto") c.provider = "grid";
    if (c.provider != "grid") reject(o, "run.provider", "must be grid when initial data comes from pde.field");
    if (c.points != 0 || c.half_width != 0.0)
      reject(o, c.points != 0 ? "grid.points" : "grid.half_width", "cannot override the grid of a pde.field file");
    positive("pde.mass", c.pde_mass);
    positive("pde.c", c.pde_c);
    try {
      const SpinorField psi = read_field(c.pde_field);
      dim = psi.grid.dim;
      min_extent = *std::min_element(psi.grid.extent.begin(), psi.grid.extent.end());
    } catch (const std::exception& e) {
      reject(o, "pde.field", std::string("unreadable: ") + e.what());
    }
  }
  if (c.provider != "analytic" && c.provider != "grid") reject(o, "run.provider", "must be analytic or grid");
  if (c.points < 2 && has_scenario) reject(o, "grid.points", "needs at least 2 points per axis");
  if (c.radius == 0.0) c.radius = min_extent;
  if (c.h == 0.0) c.h = dim == 1 ? 0.02 : 0.1;
}

}  // namespace bohm::cli
