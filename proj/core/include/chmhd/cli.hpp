#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "chmhd/diagnostics.hpp"
#include "chmhd/stepper.hpp"

namespace chmhd {

// Manufactured-solution convergence study: one run per level to T = 1 with
// dt snapped to T / round(T / (c h^2)) so every level lands exactly on the
// final time.
struct ConvergenceLevel {
  int n = 0;
  double h = 0.0;
  double dt = 0.0;
  TerminalErrors errors;
};

struct ConvergenceStudy {
  std::vector<ConvergenceLevel> levels;
  bool failed = false;     // a level's run aborted; table holds what finished
  std::string failure;
};

// Levels must be strictly increasing power-of-two multiples of the smallest
// entry (so h halves between consecutive levels); throws ConfigError.
void validate_levels(const std::vector<int>& levels);

ConvergenceStudy run_convergence_study(const std::vector<int>& levels, double dt_factor,
                                       SolverKind solver = SolverKind::lu);

// CSV: n,h,dt plus error and (for multi-level studies) rate columns for the
// seven tracked norms. Single-level studies emit errors only.
std::string convergence_csv(const ConvergenceStudy& study);

// Projection accuracy study for the t = 0 reference fields. target is one of
// phi0 (Ritz; L2 + H1 errors), u0 (L2 projection; L2 + H1), or B0
// (quasi-projection; L2 + Hcurl).
struct ProjectionLevel {
  int n = 0;
  double h = 0.0;
  double err_a = 0.0; // L2
  double err_b = 0.0; // H1 seminorm, or Hcurl seminorm for B0
};

std::vector<ProjectionLevel> run_projection_study(const std::string& target,
                                                  const std::vector<int>& levels);

std::string projection_csv(const std::string& target,
                           const std::vector<ProjectionLevel>& levels);

// Entry point behind the command-line binary; args excludes the program
// name. Returns the process exit code (0 success, 2 usage, 1 failure).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace chmhd
