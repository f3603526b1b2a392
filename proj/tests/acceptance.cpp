// End-to-end acceptance checklist. Each section prints one [PASS]/[FAIL]
// line with its governing numbers; the process exits nonzero if anything
// fails. The convergence study dominates the runtime (several minutes).

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "chmhd/cli.hpp"
#include "chmhd/diagnostics.hpp"
#include "chmhd/field.hpp"
#include "chmhd/manufactured.hpp"
#include "chmhd/projections.hpp"
#include "chmhd/rng.hpp"
#include "chmhd/scenario.hpp"
#include "chmhd/stepper.hpp"
#include "chmhd/vtk.hpp"

using namespace chmhd;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

bool report(const char* name, bool ok, const std::string& detail) {
  std::printf("[%s] %s: %s\n", ok ? "PASS" : "FAIL", name, detail.c_str());
  std::fflush(stdout);
  return ok;
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

// ---------------------------------------------------------------------------
// 1. The manufactured forcing matches finite differences of the strong form.

bool check_forcing() {
  const auto t0 = Clock::now();
  Params params;
  const ForcingAudit audit = validate_forcing(params, 50, 1e-6, 1);
  return report("forcing oracle", audit.passed,
                fmt("worst relative difference %.2e over %d points (%.2f s)", audit.worst,
                    audit.n_points, seconds_since(t0)));
}

// ---------------------------------------------------------------------------
// 2. Convergence study at dt = h^2: rate bands at the finest pair plus error
// magnitudes within x5 of the recorded reference values at matching h. The
// reference stores errors relative to the exact-solution norms, so the
// measured errors are normalized the same way before comparing.

struct NormRef {
  const char* name;
  double lo, hi;       // admissible finest-pair rate band
  double ref[3];       // relative reference error at h = 1/8, 1/16, 1/32
};

constexpr NormRef kNorms[] = {
    {"phi_l2", 1.8, 2.2, {2.66e-1, 7.48e-2, 1.93e-2}},
    {"phi_h1", 0.9, 1.4, {3.62e-1, 1.57e-1, 7.36e-2}},
    {"u_l2", 1.8, 2.2, {1.30e-1, 3.44e-2, 8.67e-3}},
    {"u_h1", 0.9, 1.1, {3.02e-1, 1.52e-1, 7.58e-2}},
    {"B_l2", 0.9, 1.1, {1.14e-1, 5.68e-2, 2.84e-2}},
    {"B_hcurl", 0.9, 1.1, {2.26e-1, 1.13e-1, 5.67e-2}},
    {"p_l2", 1.0, 1.8, {3.28, 1.04, 3.36e-1}},
};

double norm_of(const TerminalErrors& e, int k) {
  switch (k) {
    case 0: return e.phi_l2;
    case 1: return e.phi_h1;
    case 2: return e.u_l2;
    case 3: return e.u_h1;
    case 4: return e.B_l2;
    case 5: return e.B_hcurl;
    default: return e.p_l2;
  }
}

// Norms of the exact terminal solution, for relative errors. A zero field
// measured against the solution integrates it with degree-8 quadrature.
std::array<double, 7> exact_norms() {
  Params params;
  params.dt = 0.01;
  const ExactSolution ex = exact_solution(1.0, params);
  const Spaces spaces = build_spaces(32, SpaceSpec{});
  const FEField zs = zero_field(spaces.phase);
  const FEField zv = zero_field(spaces.velocity);
  const FEField zb = zero_field(spaces.induction);
  return {error_norm(zs, ex.phi, ex.grad_phi, NormKind::L2),
          error_norm(zs, ex.phi, ex.grad_phi, NormKind::H1_semi),
          error_norm(zv, ex.u, ex.grad_u, NormKind::L2),
          error_norm(zv, ex.u, ex.grad_u, NormKind::H1_semi),
          error_norm_hcurl(zb, ex.B, ex.curl_B, NormKind::L2),
          error_norm_hcurl(zb, ex.B, ex.curl_B, NormKind::Hcurl),
          error_norm(zs, ex.p, ex.grad_p, NormKind::L2)};
}

bool check_convergence() {
  const auto t0 = Clock::now();
  const ConvergenceStudy study = run_convergence_study({8, 16, 32}, 1.0);
  if (study.failed)
    return report("convergence rates", false, "study aborted: " + study.failure);

  const std::array<double, 7> scale = exact_norms();
  bool ok = true;
  std::string breach;
  for (int k = 0; k < 7; ++k) {
    const double coarse = norm_of(study.levels[1].errors, k);
    const double fine = norm_of(study.levels[2].errors, k);
    const double rate = std::log2(coarse / fine);
    if (!(rate >= kNorms[k].lo && rate <= kNorms[k].hi)) {
      ok = false;
      breach += fmt(" %s rate %.2f outside [%.1f,%.1f];", kNorms[k].name, rate, kNorms[k].lo,
                    kNorms[k].hi);
    }
    for (int lev = 0; lev < 3; ++lev) {
      const double rel = norm_of(study.levels[lev].errors, k) / scale[k];
      const double ratio = rel / kNorms[k].ref[lev];
      if (!(ratio >= 0.2 && ratio <= 5.0)) {
        ok = false;
        breach += fmt(" %s at n=%d off reference by x%.2f;", kNorms[k].name,
                      study.levels[lev].n, ratio);
      }
    }
  }

  const double rate_phi =
      std::log2(norm_of(study.levels[1].errors, 0) / norm_of(study.levels[2].errors, 0));
  const double rate_u =
      std::log2(norm_of(study.levels[1].errors, 2) / norm_of(study.levels[2].errors, 2));
  const double rate_B =
      std::log2(norm_of(study.levels[1].errors, 4) / norm_of(study.levels[2].errors, 4));
  std::string detail = fmt("finest-pair rates phi %.2f, u %.2f, B %.2f; all magnitudes vs "
                           "reference within x5 (%.0f s)",
                           rate_phi, rate_u, rate_B, seconds_since(t0));
  if (!ok) detail += " —" + breach;
  return report("convergence rates", ok, detail);
}

// ---------------------------------------------------------------------------
// 3 + 4. One seeded-noise run with every constant at 1 serves both the mass
// ledger and the per-step energy decay estimate; two shorter runs confirm
// the energy stays monotone under coarser time steps.

ScenarioConfig noise_config(int n, double dt) {
  ScenarioConfig cfg;
  cfg.kind = ScenarioKind::spinodal;
  cfg.n = n;
  cfg.dt = dt;
  cfg.T = 1.0;
  cfg.seed = 42;
  cfg.params = Params{};
  cfg.params.dt = dt;
  cfg.validate();
  return cfg;
}

bool check_mass_and_energy(bool& energy_ok_out) {
  const auto t0 = Clock::now();
  const ScenarioConfig cfg = noise_config(32, 1.0 / 200.0);
  const Spaces spaces = scenario_spaces(cfg);
  const RunResult res =
      run(spaces, cfg.run_params(), scenario_initial_state(cfg, spaces), cfg.n_steps());

  bool mass_ok = !res.failed;
  double worst_drift = 0.0;
  const double m0 = res.trace.empty() ? 0.0 : res.trace.front().mass;
  for (const auto& row : res.trace)
    worst_drift = std::max(worst_drift, std::fabs(row.mass - m0));
  const double mass_tol = 1e-10 * (1.0 + std::fabs(m0));
  mass_ok = mass_ok && worst_drift <= mass_tol;
  mass_ok = report("mass conservation", mass_ok,
                   fmt("max |mass(k)-mass(0)| = %.2e over %d steps (tolerance %.2e, %.0f s)",
                       worst_drift, cfg.n_steps(), mass_tol, seconds_since(t0)));

  bool energy_ok = !res.failed;
  const double E0 = res.trace.empty() ? 0.0 : res.trace.front().algorithm_energy;
  const double decay_tol = 1e-8 * (1.0 + E0);
  double worst_gap = -1e300;
  for (size_t k = 1; k < res.trace.size(); ++k) {
    const auto& cur = res.trace[k];
    const double dissipation = cur.grad_omega_sq + cur.grad_u_sq + cur.curl_B_sq;
    const double gap = cur.algorithm_energy - res.trace[k - 1].algorithm_energy +
                       cfg.dt * dissipation;
    worst_gap = std::max(worst_gap, gap);
  }
  energy_ok = energy_ok && worst_gap <= decay_tol;

  // Coarser steps: the energy curve must stay monotone non-increasing.
  for (const double dt : {1.0 / 10.0, 1.0 / 100.0}) {
    const ScenarioConfig c2 = noise_config(32, dt);
    const RunResult r2 =
        run(scenario_spaces(c2), c2.run_params(), scenario_initial_state(c2, scenario_spaces(c2)),
            c2.n_steps());
    if (r2.failed) {
      energy_ok = false;
      continue;
    }
    for (size_t k = 1; k < r2.trace.size(); ++k) {
      if (r2.trace[k].algorithm_energy >
          r2.trace[k - 1].algorithm_energy + 1e-12 * (1.0 + r2.trace[0].algorithm_energy))
        energy_ok = false;
    }
  }
  energy_ok_out = report("energy decay", energy_ok,
                         fmt("max per-step surplus %.2e (tolerance %.2e); dt=1/10 and 1/100 "
                             "monotone (%.0f s)",
                             worst_gap, decay_tol, seconds_since(t0)));
  return mass_ok;
}

// ---------------------------------------------------------------------------
// 5. Projection accuracy orders for the initial fields.

bool check_projections() {
  const auto t0 = Clock::now();
  const auto phi = run_projection_study("phi0", {8, 16, 32});
  const auto B = run_projection_study("B0", {8, 16, 32});
  const double ritz_rate = std::log2(phi[1].err_a / phi[2].err_a);
  const double curl_rate = std::log2(B[1].err_b / B[2].err_b);
  const bool ok = ritz_rate >= 1.8 && curl_rate >= 0.9;
  return report("projection orders", ok,
                fmt("Ritz L2 order %.2f (need >= 1.8), quasi-projection Hcurl order %.2f "
                    "(need >= 0.9) (%.1f s)",
                    ritz_rate, curl_rate, seconds_since(t0)));
}

// ---------------------------------------------------------------------------
// 6. Structural properties of the assembled operators and the Newton loop.

double max_pair_deviation(const TripletList& first, const TripletList& second, double sign) {
  // max |first[i][j] + sign * second[j][i]| over the union pattern.
  std::map<std::pair<int, int>, double> acc;
  for (const auto& t : first) acc[{t.row, t.col}] += t.value;
  for (const auto& t : second) acc[{t.col, t.row}] += sign * t.value;
  double worst = 0.0;
  for (const auto& [key, v] : acc) worst = std::max(worst, std::fabs(v));
  return worst;
}

bool check_structure() {
  const auto t0 = Clock::now();
  const Spaces spaces = build_spaces(8, SpaceSpec{});
  SplitMix64 rng{2024};
  bool ok = true;
  std::string detail;

  // Convection assembles locally skew pairs: x^T C x vanishes for every x.
  FEField u_lag = interpolate(spaces.velocity, [](double x, double y) -> std::array<double, 2> {
    return {std::sin(3.0 * x + y), std::cos(2.0 * y - x)};
  });
  for (auto& c : u_lag.coeffs) c += 0.05 * rng.uniform(-1.0, 1.0);
  const SparseMatrix C = assemble_convection(spaces.velocity, u_lag);
  double worst_skew = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    Vector x(static_cast<size_t>(C.n_rows));
    for (auto& v : x) v = rng.uniform(-1.0, 1.0);
    const Vector Cx = matvec(C, x);
    double xcx = 0.0, xx = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
      xcx += x[i] * Cx[i];
      xx += x[i] * x[i];
    }
    worst_skew = std::max(worst_skew, std::fabs(xcx) / xx);
  }
  ok = ok && worst_skew <= 1e-12;
  detail += fmt("skew %.1e", worst_skew);

  // Adjoint placements are exact transposes of each other.
  const FEField phi_lag = interpolate(spaces.phase, [](double x, double y) {
    return std::cos(2.0 * x) * std::sin(1.0 + y);
  });
  const auto phase_pair =
      assemble_phase_velocity_coupling(spaces.phase, spaces.velocity, phi_lag);
  const double phase_dev = max_pair_deviation(phase_pair.first, phase_pair.second, 1.0);
  ok = ok && phase_dev <= 1e-12;
  detail += fmt(", phase adjoint %.1e", phase_dev);

  FEField B_lag = interpolate(spaces.induction, [](double x, double y) -> std::array<double, 2> {
    return {std::cos(x + 2.0 * y), std::sin(2.0 * x - y)};
  });
  const auto lorentz_pair = assemble_lorentz_coupling(spaces.velocity, spaces.induction, B_lag);
  const double lorentz_dev = max_pair_deviation(lorentz_pair.first, lorentz_pair.second, -1.0);
  ok = ok && lorentz_dev <= 1e-12;
  detail += fmt(", lorentz adjoint %.1e", lorentz_dev);

  // Tangential continuity of the edge space across every interior edge, for
  // an arbitrary coefficient vector.
  const Mesh& mesh = *spaces.mesh;
  FEField B = zero_field(spaces.induction);
  for (auto& c : B.coeffs) c = rng.uniform(-1.0, 1.0);
  std::vector<std::vector<int>> edge_cells(mesh.n_edges());
  for (int c = 0; c < mesh.n_cells(); ++c)
    for (int k = 0; k < 3; ++k) edge_cells[mesh.cell_edges[c][k]].push_back(c);
  const auto barycentric = [&](int cell, double x, double y) -> std::array<double, 3> {
    const auto& a = mesh.vertices[mesh.cells[cell][0]];
    const auto& b = mesh.vertices[mesh.cells[cell][1]];
    const auto& cc = mesh.vertices[mesh.cells[cell][2]];
    const double det = (b[0] - a[0]) * (cc[1] - a[1]) - (cc[0] - a[0]) * (b[1] - a[1]);
    const double l1 = ((x - a[0]) * (cc[1] - a[1]) - (cc[0] - a[0]) * (y - a[1])) / det;
    const double l2 = ((b[0] - a[0]) * (y - a[1]) - (x - a[0]) * (b[1] - a[1])) / det;
    return {1.0 - l1 - l2, l1, l2};
  };
  double worst_jump = 0.0;
  for (int e = 0; e < mesh.n_edges(); ++e) {
    if (edge_cells[e].size() != 2) continue;
    const auto& v0 = mesh.vertices[mesh.edges[e][0]];
    const auto& v1 = mesh.vertices[mesh.edges[e][1]];
    const double mx = 0.5 * (v0[0] + v1[0]);
    const double my = 0.5 * (v0[1] + v1[1]);
    double tx = v1[0] - v0[0], ty = v1[1] - v0[1];
    const double len = std::hypot(tx, ty);
    tx /= len;
    ty /= len;
    const auto a = eval_hcurl(B, edge_cells[e][0], barycentric(edge_cells[e][0], mx, my));
    const auto b = eval_hcurl(B, edge_cells[e][1], barycentric(edge_cells[e][1], mx, my));
    worst_jump = std::max(worst_jump, std::fabs(tx * (a[0] - b[0]) + ty * (a[1] - b[1])));
  }
  ok = ok && worst_jump <= 1e-12;
  detail += fmt(", tangential jump %.1e", worst_jump);

  // Cubic-term Jacobian against central differences.
  const int n_phi = spaces.phase.n_dofs;
  Vector phi_new(static_cast<size_t>(n_phi)), phi_old(static_cast<size_t>(n_phi));
  for (auto& v : phi_new) v = rng.uniform(-1.2, 1.2);
  for (auto& v : phi_old) v = rng.uniform(-1.2, 1.2);
  const double gamma = 0.7;
  const CubicTerm base = assemble_cubic(spaces.phase, phi_new, phi_old, gamma);
  std::map<std::pair<int, int>, double> jac;
  for (const auto& t : base.jacobian) jac[{t.row, t.col}] += t.value;
  double jac_scale = 0.0;
  for (const auto& [key, v] : jac) jac_scale = std::max(jac_scale, std::fabs(v));
  const double eps = 1e-6;
  double worst_fd = 0.0;
  for (int j = 0; j < n_phi; j += 7) {
    Vector plus = phi_new, minus = phi_new;
    plus[j] += eps;
    minus[j] -= eps;
    const Vector rp = assemble_cubic(spaces.phase, plus, phi_old, gamma).residual;
    const Vector rm = assemble_cubic(spaces.phase, minus, phi_old, gamma).residual;
    for (int i = 0; i < n_phi; ++i) {
      const double fd = (rp[i] - rm[i]) / (2.0 * eps);
      const auto it = jac.find({i, j});
      const double an = it == jac.end() ? 0.0 : it->second;
      worst_fd = std::max(worst_fd, std::fabs(fd - an) / jac_scale);
    }
  }
  ok = ok && worst_fd <= 1e-6;
  detail += fmt(", cubic FD %.1e", worst_fd);

  // Newton on manufactured steps: few iterations, tight residual.
  Params params;
  params.dt = 1.0 / 64.0;
  const ExactSolution ex = exact_solution(0.0, params);
  State s = make_state(spaces);
  s.phi = ritz_project(spaces.phase, ex.phi, ex.grad_phi);
  s.u = l2_project(spaces.velocity, ex.u);
  s.B = maxwell_quasi_project(spaces.induction, ex.B, ex.curl_B, ex.u);
  Stepper stepper(spaces, params);
  int worst_iters = 0;
  double worst_res = 0.0;
  for (int k = 1; k <= 3; ++k) {
    const ForcingSet f = exact_forcing(k * params.dt, params);
    const BoundaryValues bc = exact_boundary_values(spaces, k * params.dt);
    const StepReport rep = stepper.advance(s, &f, bc);
    worst_iters = std::max(worst_iters, rep.newton_iters);
    worst_res = std::max(worst_res, rep.final_residual);
  }
  ok = ok && worst_iters <= 5 && worst_res <= 1e-10;
  detail += fmt(", newton %d iters res %.1e (%.1f s)", worst_iters, worst_res,
                seconds_since(t0));

  return report("structural properties", ok, detail);
}

// ---------------------------------------------------------------------------
// 7. Scenario smoke tests at reduced size: the driven cavity completes and
// emits a wellformed VTK snapshot; the periodic shear layer keeps every
// slave DOF locked to its master.

bool vtk_is_wellformed(const std::string& path, int nv, int nc) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return text.rfind("# vtk DataFile Version 3.0\n", 0) == 0 &&
         text.find(fmt("POINTS %d double", nv)) != std::string::npos &&
         text.find(fmt("CELLS %d %d", nc, 4 * nc)) != std::string::npos &&
         text.find(fmt("POINT_DATA %d", nv)) != std::string::npos &&
         text.find("VECTORS B double") != std::string::npos;
}

bool check_scenarios() {
  const auto t0 = Clock::now();
  bool ok = true;
  std::string detail;

  ScenarioConfig lid = scenario_preset("lid_mu2");
  lid.n = 48;
  lid.dt = 1.0 / 500.0;
  lid.T = 0.1; // 50 steps
  lid.params.dt = lid.dt;
  lid.validate();
  {
    const Spaces spaces = scenario_spaces(lid);
    const RunResult res = run(spaces, lid.run_params(), scenario_initial_state(lid, spaces),
                              lid.n_steps(), scenario_hooks(lid, spaces));
    bool lid_ok = !res.failed;
    std::string vtk_path = "acceptance_lid.vtk";
    if (lid_ok) {
      write_vtk(sample_snapshot(res.final_state), *spaces.mesh, vtk_path);
      lid_ok = vtk_is_wellformed(vtk_path, spaces.mesh->n_vertices(), spaces.mesh->n_cells());
      std::filesystem::remove(vtk_path);
    }
    ok = ok && lid_ok;
    detail += fmt("cavity run %s", lid_ok ? "completed, VTK wellformed" : "FAILED");
    if (res.failed) detail += " (" + res.failure + ")";
  }

  ScenarioConfig kh = scenario_preset("kelvin_helmholtz");
  kh.n = 48;
  kh.dt = 1.0 / 500.0;
  kh.T = 0.1;
  kh.params.dt = kh.dt;
  kh.validate();
  {
    const Spaces spaces = scenario_spaces(kh);
    const RunResult res = run(spaces, kh.run_params(), scenario_initial_state(kh, spaces),
                              kh.n_steps(), scenario_hooks(kh, spaces));
    bool kh_ok = !res.failed;
    double worst_pair = 0.0;
    const auto check_pairs = [&](const DofMap& map, const Vector& coeffs) {
      for (int d = 0; d < map.n_dofs; ++d) {
        if (map.constraint[d] != DofConstraint::periodic_slave) continue;
        const double want = map.slave_sign[d] * coeffs[map.master[d]];
        worst_pair = std::max(worst_pair, std::fabs(coeffs[d] - want));
      }
    };
    if (kh_ok) {
      const State& s = res.final_state;
      check_pairs(spaces.phase, s.phi.coeffs);
      check_pairs(spaces.chemical_potential, s.omega.coeffs);
      check_pairs(spaces.velocity, s.u.coeffs);
      check_pairs(spaces.pressure, s.p.coeffs);
      check_pairs(spaces.induction, s.B.coeffs);
      kh_ok = worst_pair <= 1e-12;
    }
    ok = ok && kh_ok;
    detail += fmt("; shear layer %s, max periodic mismatch %.1e (%.0f s)",
                  res.failed ? "FAILED" : "completed", worst_pair, seconds_since(t0));
    if (res.failed) detail += " (" + res.failure + ")";
  }

  return report("scenario smoke", ok, detail);
}

} // namespace

int main() {
  bool ok = true;
  ok &= check_forcing();
  ok &= check_convergence();
  bool energy_ok = false;
  ok &= check_mass_and_energy(energy_ok);
  ok &= energy_ok;
  ok &= check_projections();
  ok &= check_structure();
  ok &= check_scenarios();
  std::printf("[NOTE] out of scope at this scale: analysis-level stability constants, the 3D "
              "variant, and the variable-coefficient convergence case; not checked here.\n");
  return ok ? 0 : 1;
}
