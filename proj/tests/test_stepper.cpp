#include <cmath>

#include "chmhd/diagnostics.hpp"
#include "chmhd/error.hpp"
#include "chmhd/manufactured.hpp"
#include "chmhd/parallel.hpp"
#include "chmhd/projections.hpp"
#include "chmhd/rng.hpp"
#include "chmhd/stepper.hpp"
#include "doctest.h"

using namespace chmhd;

namespace {

State manufactured_initial(const Spaces& spaces, const Params& params) {
  const ExactSolution ex = exact_solution(0.0, params);
  State s = make_state(spaces);
  s.phi = ritz_project(spaces.phase, ex.phi, ex.grad_phi);
  s.u = l2_project(spaces.velocity, ex.u);
  s.B = maxwell_quasi_project(spaces.induction, ex.B, ex.curl_B, ex.u);
  return s;
}

State noisy_initial(const Spaces& spaces, std::uint64_t seed) {
  State s = make_state(spaces);
  SplitMix64 rng(seed);
  for (auto& c : s.phi.coeffs) c = -0.05 + 0.001 * rng.uniform(-1.0, 1.0);
  return s;
}

} // namespace

TEST_CASE("a pure phase at rest is a fixed point recognized without iterating") {
  const Spaces spaces = build_spaces(4, SpaceSpec{});
  Params params;
  params.dt = 0.05;

  State s = make_state(spaces);
  for (auto& c : s.phi.coeffs) c = 1.0;
  const Vector phi_before = s.phi.coeffs;

  Stepper stepper(spaces, params);
  const StepReport report = stepper.advance(s, nullptr, BoundaryValues{});
  CHECK(report.converged);
  CHECK(report.newton_iters == 0);
  CHECK(s.phi.coeffs == phi_before);
  for (double c : s.u.coeffs) CHECK(c == 0.0);
  for (double c : s.B.coeffs) CHECK(c == 0.0);
  CHECK(s.t == doctest::Approx(0.05));
  CHECK(s.step == 1);
}

TEST_CASE("newton converges in a handful of iterations on manufactured steps") {
  const Spaces spaces = build_spaces(8, SpaceSpec{});
  Params params;
  params.dt = 1.0 / 64.0;

  State s = manufactured_initial(spaces, params);
  Stepper stepper(spaces, params);
  for (int k = 0; k < 3; ++k) {
    const double t_next = params.dt * (k + 1);
    const ForcingSet forcing = exact_forcing(t_next, params);
    const BoundaryValues bc = exact_boundary_values(spaces, t_next);
    const StepReport report = stepper.advance(s, &forcing, bc);
    CHECK(report.converged);
    CHECK(report.newton_iters <= 5);
    CHECK(report.final_residual <= 1e-10);
  }
}

TEST_CASE("mass is conserved to rounding on zero-forcing runs") {
  const Spaces spaces = build_spaces(8, SpaceSpec{});
  Params params;
  params.gamma = 0.1;
  params.dt = 1.0 / 50.0;

  const RunResult res = run(spaces, params, noisy_initial(spaces, 42), 10, RunHooks{});
  REQUIRE_FALSE(res.failed);
  REQUIRE(res.trace.size() == 11);
  const double m0 = res.trace.front().mass;
  for (const auto& row : res.trace)
    CHECK(std::fabs(row.mass - m0) <= 1e-11 * (1.0 + std::fabs(m0)));
}

TEST_CASE("discrete energy decays with the dissipation accounted for") {
  const Spaces spaces = build_spaces(8, SpaceSpec{});
  Params params; // all constants 1
  params.dt = 1.0 / 50.0;

  const RunResult res = run(spaces, params, noisy_initial(spaces, 7), 10, RunHooks{});
  REQUIRE_FALSE(res.failed);
  const double E0 = res.trace.front().algorithm_energy;
  for (size_t k = 1; k < res.trace.size(); ++k) {
    const auto& prev = res.trace[k - 1];
    const auto& cur = res.trace[k];
    const double dissipation = cur.grad_omega_sq + cur.grad_u_sq + cur.curl_B_sq;
    CHECK(cur.algorithm_energy - prev.algorithm_energy + params.dt * dissipation <=
          1e-8 * (1.0 + E0));
    CHECK(cur.algorithm_energy <= prev.algorithm_energy + 1e-12 * (1.0 + E0));
  }
}

TEST_CASE("starving newton of iterations surfaces as a step failure") {
  const Spaces spaces = build_spaces(4, SpaceSpec{});
  Params params;
  params.dt = 0.1;

  NewtonConfig cfg;
  cfg.max_iter = 1;
  cfg.tol_residual = 1e-300;
  cfg.tol_increment = 1e-300;

  State s = noisy_initial(spaces, 3);
  Stepper stepper(spaces, params, cfg);
  CHECK_THROWS_AS(stepper.advance(s, nullptr, BoundaryValues{}), StepFailure);

  const RunResult res = run(spaces, params, noisy_initial(spaces, 3), 5, RunHooks{}, cfg);
  CHECK(res.failed);
  CHECK(res.failed_step == 1);
  CHECK_FALSE(res.failure.empty());
  CHECK(res.trace.size() == 1); // the initial row only
}

TEST_CASE("the iterative solver path matches the direct one") {
  const Spaces spaces = build_spaces(4, SpaceSpec{});
  Params params;
  params.dt = 1.0 / 16.0;

  State a = manufactured_initial(spaces, params);
  State b = a;
  const ForcingSet forcing = exact_forcing(params.dt, params);
  const BoundaryValues bc = exact_boundary_values(spaces, params.dt);

  Stepper direct(spaces, params, NewtonConfig{}, SolverKind::lu);
  Stepper iterative(spaces, params, NewtonConfig{}, SolverKind::gmres);
  direct.advance(a, &forcing, bc);
  iterative.advance(b, &forcing, bc);

  double worst = 0.0;
  for (size_t i = 0; i < a.phi.coeffs.size(); ++i)
    worst = std::max(worst, std::fabs(a.phi.coeffs[i] - b.phi.coeffs[i]));
  for (size_t i = 0; i < a.u.coeffs.size(); ++i)
    worst = std::max(worst, std::fabs(a.u.coeffs[i] - b.u.coeffs[i]));
  for (size_t i = 0; i < a.B.coeffs.size(); ++i)
    worst = std::max(worst, std::fabs(a.B.coeffs[i] - b.B.coeffs[i]));
  CHECK(worst <= 1e-8);
}

TEST_CASE("runs are bitwise reproducible, independent of the thread count") {
  const Spaces spaces = build_spaces(6, SpaceSpec{});
  Params params;
  params.gamma = 0.2;
  params.dt = 0.02;

  set_thread_count(1);
  const RunResult r1 = run(spaces, params, noisy_initial(spaces, 11), 4, RunHooks{});
  set_thread_count(4);
  const RunResult r2 = run(spaces, params, noisy_initial(spaces, 11), 4, RunHooks{});
  set_thread_count(1);

  REQUIRE_FALSE(r1.failed);
  REQUIRE_FALSE(r2.failed);
  CHECK(r1.final_state.phi.coeffs == r2.final_state.phi.coeffs);
  CHECK(r1.final_state.u.coeffs == r2.final_state.u.coeffs);
  CHECK(r1.final_state.B.coeffs == r2.final_state.B.coeffs);
  CHECK(r1.final_state.p.coeffs == r2.final_state.p.coeffs);
}

TEST_CASE("the trace records the uniform time grid") {
  const Spaces spaces = build_spaces(4, SpaceSpec{});
  Params params;
  params.dt = 0.25;
  const RunResult res = run(spaces, params, noisy_initial(spaces, 1), 4, RunHooks{});
  REQUIRE_FALSE(res.failed);
  REQUIRE(res.trace.size() == 5);
  for (int k = 0; k < 5; ++k) {
    CHECK(res.trace[k].step == k);
    CHECK(res.trace[k].t == doctest::Approx(0.25 * k).epsilon(1e-14));
  }
  CHECK(res.final_state.t == doctest::Approx(1.0).epsilon(1e-14));
}
