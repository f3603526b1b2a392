#pragma once

#include <cstdint>
#include <string>

#include "chmhd/assembly.hpp"

namespace chmhd {

enum class ScenarioKind { manufactured, spinodal, lid_driven, kelvin_helmholtz };

// How the initial induction field is produced: the curl-curl quasi-projection
// or plain tangential edge interpolation. Periodic runs must interpolate (the
// quasi-projection is defined on non-periodic spaces only).
enum class InductionInit { projection, interpolation };

std::string to_string(ScenarioKind kind);
ScenarioKind scenario_kind_from(const std::string& name); // throws ConfigError

struct OutputConfig {
  std::string directory = "out";
  // Snapshot cadence: a VTK file every this many steps (plus the initial and
  // final states); 0 disables snapshots entirely.
  int every = 0;
};

struct ScenarioConfig {
  ScenarioKind kind = ScenarioKind::manufactured;
  int n = 32;
  double dt = 1e-2;
  double T = 1.0;
  std::uint64_t seed = 1;
  InductionInit induction_init = InductionInit::projection;
  Params params;
  OutputConfig output;

  // round(T / dt); validate() guarantees the product lands back on T.
  int n_steps() const;
  // params with the scenario's dt folded in; use this for assembly and runs
  // so the two dt fields cannot drift apart.
  Params run_params() const;
  void validate() const;
};

// INI-style grammar: [scenario] / [params] / [output] sections, `key = value`
// lines, `#` starts a comment. Unknown sections or keys are errors naming the
// offender and its line; so are malformed numbers and violated invariants.
// The time grid must be uniform: dt * round(T/dt) = T within 1e-12.
ScenarioConfig parse_config(const std::string& text);
ScenarioConfig load_config(const std::string& path);

// Canonical form; parse(serialize(c)) reproduces c exactly (numbers are
// printed with enough digits to round-trip).
std::string serialize_config(const ScenarioConfig& config);

} // namespace chmhd
