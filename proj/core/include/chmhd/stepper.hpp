#pragma once

#include <functional>
#include <string>
#include <vector>

#include "chmhd/assembly.hpp"
#include "chmhd/constraints.hpp"
#include "chmhd/diagnostics.hpp"
#include "chmhd/spaces.hpp"

namespace chmhd {

// Discrete state at one time level. The chemical potential and pressure are
// by-products of the solve; at the initial level they are simply zero.
struct State {
  double t = 0.0;
  int step = 0;
  FEField phi;
  FEField omega;
  FEField u;
  FEField p;
  FEField B;
};

State make_state(const Spaces& spaces);

enum class SolverKind { lu, gmres };

struct NewtonConfig {
  double tol_residual = 1e-10;
  double tol_increment = 1e-11; // relative to 1 + |x|
  int max_iter = 30;
  // Two consecutive residual growths beyond this factor abort the step.
  double divergence_factor = 10.0;
  // Extra back-substitutions with the last factorization after convergence.
  // They cost no assembly or factorization and push the residual far below
  // the Newton tolerance, which is what keeps the accumulated mass drift of
  // long runs near rounding level. Each is kept only if it helps.
  int polish_backsolves = 2;
  double polish_target = 1e-13;
};

struct StepReport {
  int newton_iters = 0;
  int linear_solves = 0;
  double final_residual = 0.0;
  bool converged = false;
};

// One implicit step of the coupled system. The five fields plus the pressure
// gauge multiplier are solved monolithically; the cubic potential term is the
// only nonlinearity, handled by Newton on the constraint-reduced system.
class Stepper {
public:
  Stepper(const Spaces& spaces, const Params& params, NewtonConfig cfg = {},
          SolverKind solver = SolverKind::lu);

  // Advances state by params.dt. A null forcing means no body force; empty
  // vectors in bc mean homogeneous Dirichlet data. Throws StepFailure when
  // Newton diverges or hits the iteration cap (state is left untouched).
  StepReport advance(State& state, const ForcingSet* forcing, const BoundaryValues& bc);

  const ConstraintSet& constraints() const { return constraints_; }

private:
  const Spaces* spaces_;
  Params params_;
  NewtonConfig cfg_;
  SolverKind solver_;
  ConstraintSet constraints_;
  SparseLUSolver lu_;
};

// Callbacks for a time loop; any of them may be left empty. forcing and
// boundary are evaluated at the new time level t^{k+1}.
struct RunHooks {
  std::function<ForcingSet(double)> forcing;
  std::function<BoundaryValues(double)> boundary;
  std::function<void(const State&, const DiagnosticsRow&)> on_step;
};

struct RunResult {
  State final_state;
  std::vector<DiagnosticsRow> trace; // one row per level, including step 0
  bool failed = false;
  int failed_step = -1;
  std::string failure;
};

// Runs n_steps from the given state. A StepFailure ends the run early with
// the partial trajectory and the failure recorded instead of propagating.
RunResult run(const Spaces& spaces, const Params& params, const State& initial, int n_steps,
              const RunHooks& hooks = {}, NewtonConfig cfg = {},
              SolverKind solver = SolverKind::lu);

} // namespace chmhd
