#include "chmhd/stepper.hpp"

#include <algorithm>
#include <cmath>

#include "chmhd/error.hpp"

namespace chmhd {

namespace {

Vector pack_state(const FieldLayout& layout, const State& s) {
  Vector x(static_cast<size_t>(layout.total), 0.0);
  const auto put = [&](Field f, const Vector& v) {
    std::copy(v.begin(), v.end(), x.begin() + layout.begin(f));
  };
  put(Field::phase, s.phi.coeffs);
  put(Field::chemical_potential, s.omega.coeffs);
  put(Field::velocity, s.u.coeffs);
  put(Field::pressure, s.p.coeffs);
  put(Field::induction, s.B.coeffs);
  // The gauge multiplier always restarts from zero; it has no dynamics.
  return x;
}

void unpack_state(const FieldLayout& layout, const Vector& x, State& s) {
  const auto take = [&](Field f, Vector& v) {
    const int off = layout.begin(f);
    std::copy(x.begin() + off, x.begin() + off + layout.extent(f), v.begin());
  };
  take(Field::phase, s.phi.coeffs);
  take(Field::chemical_potential, s.omega.coeffs);
  take(Field::velocity, s.u.coeffs);
  take(Field::pressure, s.p.coeffs);
  take(Field::induction, s.B.coeffs);
}

// The pressure and gauge rows carry no diagonal entry, which ILU(0) cannot
// factor. Explicit zero slots let the elimination fill them with the usual
// Schur pivots; values are untouched, so this only widens the pattern.
TripletList with_diagonal_slots(const TripletList& t, int n) {
  TripletList out = t;
  out.reserve(out.size() + static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) out.push_back({i, i, 0.0});
  return out;
}

} // namespace

State make_state(const Spaces& spaces) {
  State s;
  s.phi = zero_field(spaces.phase);
  s.omega = zero_field(spaces.chemical_potential);
  s.u = zero_field(spaces.velocity);
  s.p = zero_field(spaces.pressure);
  s.B = zero_field(spaces.induction);
  return s;
}

Stepper::Stepper(const Spaces& spaces, const Params& params, NewtonConfig cfg, SolverKind solver)
    : spaces_(&spaces), params_(params), cfg_(cfg), solver_(solver), constraints_(spaces) {
  params_.validate();
  if (cfg_.max_iter < 1) throw Error("Stepper: max_iter must be at least 1");
  if (cfg_.tol_residual <= 0.0 || cfg_.tol_increment <= 0.0)
    throw Error("Stepper: Newton tolerances must be positive");
}

StepReport Stepper::advance(State& state, const ForcingSet* forcing, const BoundaryValues& bc) {
  const FieldLayout layout = spaces_->layout();

  if (bc.velocity.empty()) {
    constraints_.set_values(Field::velocity,
                            Vector(static_cast<size_t>(layout.extent(Field::velocity)), 0.0));
  } else {
    constraints_.set_values(Field::velocity, bc.velocity);
  }
  if (bc.induction.empty()) {
    constraints_.set_values(Field::induction,
                            Vector(static_cast<size_t>(layout.extent(Field::induction)), 0.0));
  } else {
    constraints_.set_values(Field::induction, bc.induction);
  }

  const BlockSystem sys = build_monolithic(*spaces_, params_, state.phi, state.u, state.B, forcing);
  const TripletList lin_full = flatten(sys);
  const Vector b = flatten_rhs(sys);
  const SparseMatrix A = triplets_to_csr(lin_full, layout.total, layout.total);
  TripletList lin_red;
  constraints_.reduce_matrix(lin_full, lin_red, nullptr);

  // Newton runs on the reduced unknowns; boundary values enter through
  // expand(), so no separate lifting is needed anywhere.
  Vector x_red = constraints_.restrict_free(pack_state(layout, state));
  Vector x_full = constraints_.expand(x_red);

  const int phi_off = layout.begin(Field::phase);
  const int omega_off = layout.begin(Field::chemical_potential);
  const int n_phi = layout.extent(Field::phase);
  const Vector phi_old = state.phi.coeffs;

  const auto cubic_at = [&](const Vector& xf) {
    const Vector phi_new(xf.begin() + phi_off, xf.begin() + phi_off + n_phi);
    return assemble_cubic(spaces_->phase, phi_new, phi_old, params_.gamma);
  };
  const auto reduced_residual = [&](const Vector& xf, const CubicTerm& cubic) {
    Vector r = matvec(A, xf);
    for (int i = 0; i < layout.total; ++i) r[i] -= b[i];
    for (int i = 0; i < n_phi; ++i) r[omega_off + i] += cubic.residual[i];
    return constraints_.reduce_vector(r);
  };
  const auto solve_with = [&](SparseMatrix J, const Vector& rhs) {
    if (solver_ == SolverKind::lu) {
      lu_.factorize(J);
      return lu_.solve(rhs);
    }
    auto [delta, rep] = gmres_solve(J, rhs, 1e-12, 100, 4000);
    if (!rep.converged)
      throw StepFailure("advance: gmres stalled on the Newton system", 0, rep.residual_norm);
    return delta;
  };

  StepReport rep;
  CubicTerm cubic = cubic_at(x_full);
  Vector r = reduced_residual(x_full, cubic);
  double rnorm = norm2(r);
  bool converged = rnorm <= cfg_.tol_residual;

  TripletList jac_red; // reduced cubic block, rebuilt per iterate
  SparseMatrix J;
  int grow_streak = 0;
  double prev_norm = rnorm;

  while (!converged && rep.newton_iters < cfg_.max_iter) {
    TripletList jac = lin_red;
    TripletList cub_full;
    cub_full.reserve(cubic.jacobian.size());
    for (const auto& t : cubic.jacobian)
      cub_full.push_back({omega_off + t.row, phi_off + t.col, t.value});
    constraints_.reduce_matrix(cub_full, jac_red, nullptr);
    jac.insert(jac.end(), jac_red.begin(), jac_red.end());
    if (solver_ == SolverKind::gmres) jac = with_diagonal_slots(jac, constraints_.n_reduced());
    J = triplets_to_csr(jac, constraints_.n_reduced(), constraints_.n_reduced());

    Vector rhs(r.size());
    for (size_t i = 0; i < r.size(); ++i) rhs[i] = -r[i];
    const Vector delta = solve_with(std::move(J), rhs);
    ++rep.linear_solves;
    ++rep.newton_iters;

    for (size_t i = 0; i < x_red.size(); ++i) x_red[i] += delta[i];
    x_full = constraints_.expand(x_red);
    cubic = cubic_at(x_full);
    r = reduced_residual(x_full, cubic);
    rnorm = norm2(r);

    if (rnorm <= cfg_.tol_residual ||
        norm2(delta) <= cfg_.tol_increment * (1.0 + norm2(x_red))) {
      converged = true;
      break;
    }
    if (rnorm > cfg_.divergence_factor * prev_norm) {
      if (++grow_streak >= 2)
        throw StepFailure("advance: Newton residual diverging", rep.newton_iters, rnorm);
    } else {
      grow_streak = 0;
    }
    prev_norm = rnorm;
  }
  if (!converged)
    throw StepFailure("advance: Newton did not converge", rep.newton_iters, rnorm);

  // Polish: the factorization from the last iteration is still an excellent
  // preconditioner at the converged point, so a plain back-substitution per
  // round buys several digits of residual. Skipped when the step converged
  // without building any Jacobian (stationary states).
  if (rep.newton_iters > 0) {
    for (int pass = 0; pass < cfg_.polish_backsolves && rnorm > cfg_.polish_target; ++pass) {
      Vector rhs(r.size());
      for (size_t i = 0; i < r.size(); ++i) rhs[i] = -r[i];
      Vector delta;
      if (solver_ == SolverKind::lu) {
        delta = lu_.solve(rhs);
      } else {
        auto [d, g] = gmres_solve(
            triplets_to_csr(with_diagonal_slots(lin_red, constraints_.n_reduced()),
                            constraints_.n_reduced(), constraints_.n_reduced()),
            rhs, 1e-12, 100, 4000);
        // The linear part alone is a fine polish operator; skip on stall.
        if (!g.converged) break;
        delta = std::move(d);
      }
      Vector x_try = x_red;
      for (size_t i = 0; i < x_try.size(); ++i) x_try[i] += delta[i];
      const Vector xf_try = constraints_.expand(x_try);
      const CubicTerm cubic_try = cubic_at(xf_try);
      const Vector r_try = reduced_residual(xf_try, cubic_try);
      const double try_norm = norm2(r_try);
      if (try_norm >= rnorm) break; // no longer helping; keep the better iterate
      x_red = std::move(x_try);
      x_full = xf_try;
      cubic = cubic_try;
      r = r_try;
      rnorm = try_norm;
      ++rep.linear_solves;
    }
  }

  rep.final_residual = rnorm;
  rep.converged = true;
  unpack_state(layout, x_full, state);
  state.t += params_.dt;
  state.step += 1;
  return rep;
}

RunResult run(const Spaces& spaces, const Params& params, const State& initial, int n_steps,
              const RunHooks& hooks, NewtonConfig cfg, SolverKind solver) {
  RunResult out;
  out.final_state = initial;
  State& s = out.final_state;
  Stepper stepper(spaces, params, cfg, solver);

  DiagnosticsRow row = diagnostics_row(s.step, s.t, s.phi, s.omega, s.u, s.B, params);
  out.trace.push_back(row);
  if (hooks.on_step) hooks.on_step(s, row);

  const double t0 = s.t;
  const int step0 = s.step;
  for (int k = 0; k < n_steps; ++k) {
    const double t_next = t0 + (k + 1) * params.dt;
    ForcingSet forcing;
    const ForcingSet* fptr = nullptr;
    if (hooks.forcing) {
      forcing = hooks.forcing(t_next);
      fptr = &forcing;
    }
    BoundaryValues bc;
    if (hooks.boundary) bc = hooks.boundary(t_next);
    try {
      stepper.advance(s, fptr, bc);
    } catch (const StepFailure& e) {
      out.failed = true;
      out.failed_step = step0 + k + 1;
      out.failure = e.what();
      break;
    }
    s.t = t_next; // absorb += accumulation over long runs
    row = diagnostics_row(s.step, s.t, s.phi, s.omega, s.u, s.B, params);
    out.trace.push_back(row);
    if (hooks.on_step) hooks.on_step(s, row);
  }
  return out;
}

} // namespace chmhd
