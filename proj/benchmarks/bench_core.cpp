// Microbenchmarks for the per-step hot path: monolithic assembly, the two
// factorization regimes of the direct solver (fresh symbolic analysis vs a
// reused pattern), a full implicit step, and terminal error norms. Mesh size
// is the benchmark argument (cells = 2 n^2).

#include <benchmark/benchmark.h>

#include "chmhd/assembly.hpp"
#include "chmhd/constraints.hpp"
#include "chmhd/diagnostics.hpp"
#include "chmhd/manufactured.hpp"
#include "chmhd/projections.hpp"
#include "chmhd/spaces.hpp"
#include "chmhd/stepper.hpp"

using namespace chmhd;

namespace {

Params bench_params(int n) {
  Params p;
  p.dt = 1.0 / (n * n);
  return p;
}

State projected_state(const Spaces& spaces, const Params& params) {
  const ExactSolution ex = exact_solution(0.0, params);
  State s = make_state(spaces);
  s.phi = ritz_project(spaces.phase, ex.phi, ex.grad_phi);
  s.u = l2_project(spaces.velocity, ex.u);
  s.B = maxwell_quasi_project(spaces.induction, ex.B, ex.curl_B, ex.u);
  return s;
}

SparseMatrix reduced_system(const Spaces& spaces, const Params& params, const State& s,
                            const ConstraintSet& constraints) {
  const BlockSystem system = build_monolithic(spaces, params, s.phi, s.u, s.B, nullptr);
  TripletList reduced;
  Vector lift;
  constraints.reduce_matrix(flatten(system), reduced, &lift);
  return triplets_to_csr(reduced, constraints.n_reduced(), constraints.n_reduced());
}

void bm_assemble_monolithic(benchmark::State& st) {
  const int n = static_cast<int>(st.range(0));
  const Params params = bench_params(n);
  const Spaces spaces = build_spaces(n, SpaceSpec{});
  const State s = projected_state(spaces, params);
  for (auto _ : st) {
    BlockSystem system = build_monolithic(spaces, params, s.phi, s.u, s.B, nullptr);
    benchmark::DoNotOptimize(system);
  }
}

// range(1) == 0 times a cold factorization (symbolic analysis + numeric);
// == 1 times the steady-state regime where the pattern is already analyzed.
void bm_lu_factorize(benchmark::State& st) {
  const int n = static_cast<int>(st.range(0));
  const bool reuse_pattern = st.range(1) != 0;
  const Params params = bench_params(n);
  const Spaces spaces = build_spaces(n, SpaceSpec{});
  const ConstraintSet constraints(spaces);
  const SparseMatrix A = reduced_system(spaces, params, projected_state(spaces, params),
                                        constraints);
  SparseLUSolver warm;
  if (reuse_pattern) warm.factorize(A);
  for (auto _ : st) {
    if (reuse_pattern) {
      warm.factorize(A);
      benchmark::DoNotOptimize(warm);
    } else {
      SparseLUSolver lu;
      lu.factorize(A);
      benchmark::DoNotOptimize(lu);
    }
  }
}

void bm_time_step(benchmark::State& st) {
  const int n = static_cast<int>(st.range(0));
  const Params params = bench_params(n);
  const Spaces spaces = build_spaces(n, SpaceSpec{});
  const State initial = projected_state(spaces, params);
  Stepper stepper(spaces, params);
  const ForcingSet f = exact_forcing(params.dt, params);
  const BoundaryValues bc = exact_boundary_values(spaces, params.dt);
  for (auto _ : st) {
    State s = initial;
    stepper.advance(s, &f, bc);
    benchmark::DoNotOptimize(s);
  }
}

void bm_error_norms(benchmark::State& st) {
  const int n = static_cast<int>(st.range(0));
  const Params params = bench_params(n);
  const Spaces spaces = build_spaces(n, SpaceSpec{});
  const State s = projected_state(spaces, params);
  const ExactSolution ex = exact_solution(0.0, params);
  for (auto _ : st) {
    const TerminalErrors e = terminal_errors(s.phi, s.u, s.B, s.p, ex);
    benchmark::DoNotOptimize(e);
  }
}

} // namespace

BENCHMARK(bm_assemble_monolithic)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_lu_factorize)
    ->Args({8, 0})
    ->Args({8, 1})
    ->Args({16, 0})
    ->Args({16, 1})
    ->Args({32, 0})
    ->Args({32, 1})
    ->Unit(benchmark::kMillisecond);
BENCHMARK(bm_time_step)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_error_norms)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
