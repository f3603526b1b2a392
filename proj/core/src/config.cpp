#include "chmhd/config.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "chmhd/error.hpp"

namespace chmhd {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

[[noreturn]] void fail(int line, const std::string& msg) {
  throw ConfigError("config line " + std::to_string(line) + ": " + msg);
}

double parse_double(const std::string& v, int line, const std::string& key) {
  errno = 0;
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (end == v.c_str() || *end != '\0' || errno == ERANGE)
    fail(line, "malformed number '" + v + "' for key '" + key + "'");
  return x;
}

long long parse_ll(const std::string& v, int line, const std::string& key) {
  errno = 0;
  char* end = nullptr;
  const long long x = std::strtoll(v.c_str(), &end, 10);
  if (end == v.c_str() || *end != '\0' || errno == ERANGE)
    fail(line, "malformed integer '" + v + "' for key '" + key + "'");
  return x;
}

std::uint64_t parse_u64(const std::string& v, int line, const std::string& key) {
  if (!v.empty() && v[0] == '-') fail(line, "key '" + key + "' takes an unsigned value");
  errno = 0;
  char* end = nullptr;
  const unsigned long long x = std::strtoull(v.c_str(), &end, 10);
  if (end == v.c_str() || *end != '\0' || errno == ERANGE)
    fail(line, "malformed integer '" + v + "' for key '" + key + "'");
  return static_cast<std::uint64_t>(x);
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

} // namespace

std::string to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::manufactured: return "manufactured";
    case ScenarioKind::spinodal: return "spinodal";
    case ScenarioKind::lid_driven: return "lid_driven";
    case ScenarioKind::kelvin_helmholtz: return "kelvin_helmholtz";
  }
  throw Error("to_string: bad ScenarioKind");
}

ScenarioKind scenario_kind_from(const std::string& name) {
  if (name == "manufactured") return ScenarioKind::manufactured;
  if (name == "spinodal") return ScenarioKind::spinodal;
  if (name == "lid_driven") return ScenarioKind::lid_driven;
  if (name == "kelvin_helmholtz") return ScenarioKind::kelvin_helmholtz;
  throw ConfigError("unknown scenario '" + name +
                    "' (expected manufactured, spinodal, lid_driven, or kelvin_helmholtz)");
}

int ScenarioConfig::n_steps() const {
  return static_cast<int>(std::llround(T / dt));
}

Params ScenarioConfig::run_params() const {
  Params p = params;
  p.dt = dt;
  return p;
}

void ScenarioConfig::validate() const {
  if (n < 2) throw ConfigError("config: n must be at least 2");
  if (dt <= 0.0) throw ConfigError("config: dt must be positive");
  if (T <= 0.0) throw ConfigError("config: T must be positive");
  const long long steps = std::llround(T / dt);
  if (steps < 1 || std::abs(dt * static_cast<double>(steps) - T) > 1e-12 * std::max(1.0, T))
    throw ConfigError("config: T must be an integer multiple of dt");
  if (steps > 100000000LL) throw ConfigError("config: step count exceeds 1e8");
  if (output.every < 0) throw ConfigError("config: output.every must be non-negative");
  if (kind == ScenarioKind::kelvin_helmholtz && induction_init == InductionInit::projection)
    throw ConfigError(
        "config: kelvin_helmholtz needs induction_init = interpolation "
        "(the quasi-projection is not defined on periodic spaces)");
  params.validate();
}

ScenarioConfig parse_config(const std::string& text) {
  ScenarioConfig cfg;
  enum Section { none, scenario, params, output } section = none;
  bool saw_scenario = false, saw_n = false, saw_dt = false, saw_T = false;
  bool saw_induction_init = false;

  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const size_t hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string s = trim(raw);
    if (s.empty()) continue;

    if (s.front() == '[') {
      if (s.back() != ']') fail(line, "unterminated section header");
      const std::string name = trim(s.substr(1, s.size() - 2));
      if (name == "scenario") section = scenario;
      else if (name == "params") section = params;
      else if (name == "output") section = output;
      else fail(line, "unknown section [" + name + "]");
      continue;
    }

    const size_t eq = s.find('=');
    if (eq == std::string::npos) fail(line, "expected 'key = value'");
    const std::string key = trim(s.substr(0, eq));
    const std::string val = trim(s.substr(eq + 1));
    if (key.empty()) fail(line, "empty key");
    if (val.empty()) fail(line, "empty value for key '" + key + "'");
    if (section == none) fail(line, "key '" + key + "' outside any section");

    if (section == scenario) {
      if (key == "scenario") {
        try {
          cfg.kind = scenario_kind_from(val);
        } catch (const ConfigError& e) {
          fail(line, e.what());
        }
        saw_scenario = true;
      } else if (key == "n") {
        cfg.n = static_cast<int>(parse_ll(val, line, key));
        saw_n = true;
      } else if (key == "dt") {
        cfg.dt = parse_double(val, line, key);
        saw_dt = true;
      } else if (key == "T") {
        cfg.T = parse_double(val, line, key);
        saw_T = true;
      } else if (key == "seed") {
        cfg.seed = parse_u64(val, line, key);
      } else if (key == "induction_init") {
        if (val == "projection") cfg.induction_init = InductionInit::projection;
        else if (val == "interpolation") cfg.induction_init = InductionInit::interpolation;
        else fail(line, "induction_init must be 'projection' or 'interpolation'");
        saw_induction_init = true;
      } else {
        fail(line, "unknown key '" + key + "' in section [scenario]");
      }
    } else if (section == params) {
      double* slot = nullptr;
      if (key == "gamma") slot = &cfg.params.gamma;
      else if (key == "lambda") slot = &cfg.params.lambda;
      else if (key == "mu") slot = &cfg.params.mu;
      else if (key == "mobility1") slot = &cfg.params.mobility.v1;
      else if (key == "mobility2") slot = &cfg.params.mobility.v2;
      else if (key == "viscosity1") slot = &cfg.params.viscosity.v1;
      else if (key == "viscosity2") slot = &cfg.params.viscosity.v2;
      else if (key == "conductivity1") slot = &cfg.params.conductivity.v1;
      else if (key == "conductivity2") slot = &cfg.params.conductivity.v2;
      else fail(line, "unknown key '" + key + "' in section [params]");
      *slot = parse_double(val, line, key);
    } else {
      if (key == "directory") cfg.output.directory = val;
      else if (key == "every") cfg.output.every = static_cast<int>(parse_ll(val, line, key));
      else fail(line, "unknown key '" + key + "' in section [output]");
    }
  }

  if (!saw_scenario) throw ConfigError("config: missing required key 'scenario'");
  if (!saw_n) throw ConfigError("config: missing required key 'n'");
  if (!saw_dt) throw ConfigError("config: missing required key 'dt'");
  if (!saw_T) throw ConfigError("config: missing required key 'T'");
  if (!saw_induction_init && cfg.kind == ScenarioKind::kelvin_helmholtz)
    cfg.induction_init = InductionInit::interpolation;

  cfg.validate();
  return cfg;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string serialize_config(const ScenarioConfig& config) {
  config.validate();
  std::ostringstream out;
  out << "[scenario]\n";
  out << "scenario = " << to_string(config.kind) << "\n";
  out << "n = " << config.n << "\n";
  out << "dt = " << fmt_double(config.dt) << "\n";
  out << "T = " << fmt_double(config.T) << "\n";
  out << "seed = " << config.seed << "\n";
  out << "induction_init = "
      << (config.induction_init == InductionInit::projection ? "projection" : "interpolation")
      << "\n";
  out << "\n[params]\n";
  out << "gamma = " << fmt_double(config.params.gamma) << "\n";
  out << "lambda = " << fmt_double(config.params.lambda) << "\n";
  out << "mu = " << fmt_double(config.params.mu) << "\n";
  out << "mobility1 = " << fmt_double(config.params.mobility.v1) << "\n";
  out << "mobility2 = " << fmt_double(config.params.mobility.v2) << "\n";
  out << "viscosity1 = " << fmt_double(config.params.viscosity.v1) << "\n";
  out << "viscosity2 = " << fmt_double(config.params.viscosity.v2) << "\n";
  out << "conductivity1 = " << fmt_double(config.params.conductivity.v1) << "\n";
  out << "conductivity2 = " << fmt_double(config.params.conductivity.v2) << "\n";
  out << "\n[output]\n";
  out << "directory = " << config.output.directory << "\n";
  out << "every = " << config.output.every << "\n";
  return out.str();
}

} // namespace chmhd
