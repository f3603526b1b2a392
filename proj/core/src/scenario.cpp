#include "chmhd/scenario.hpp"

#include <cmath>
#include <memory>

#include "chmhd/error.hpp"
#include "chmhd/manufactured.hpp"
#include "chmhd/projections.hpp"
#include "chmhd/rng.hpp"

namespace chmhd {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

// Shear-layer profile shared by the K-H phase field and velocity.
double kh_profile(double x, double y, double gamma) {
  const double w = std::sqrt(2.0) * gamma;
  return std::tanh((y - 0.5 - 0.01 * std::sin(2.0 * kPi * x)) / w);
}

std::array<double, 2> kh_profile_grad(double x, double y, double gamma) {
  const double w = std::sqrt(2.0) * gamma;
  const double th = kh_profile(x, y, gamma);
  const double sech2 = 1.0 - th * th;
  return {sech2 * (-0.02 * kPi * std::cos(2.0 * kPi * x)) / w, sech2 / w};
}

FEField initial_induction(const ScenarioConfig& cfg, const Spaces& spaces, const VectorFn& B0,
                          const ScalarFn& curl_B0, const VectorFn& u0) {
  if (cfg.induction_init == InductionInit::projection)
    return maxwell_quasi_project(spaces.induction, B0, curl_B0, u0);
  return interpolate(spaces.induction, B0);
}

// Tangential edge moments of a fixed vector on the constrained edges.
Vector induction_dirichlet(const Spaces& spaces, const VectorFn& B) {
  Vector vals(static_cast<size_t>(spaces.induction.n_dofs), 0.0);
  for (int e = 0; e < spaces.induction.n_dofs; ++e) {
    if (spaces.induction.constraint[e] == DofConstraint::dirichlet)
      vals[e] = edge_moment(*spaces.mesh, e, B, 3);
  }
  return vals;
}

} // namespace

ScenarioConfig scenario_preset(const std::string& name) {
  ScenarioConfig c;
  if (name == "manufactured") {
    c.kind = ScenarioKind::manufactured;
    c.n = 16;
    c.dt = 1.0 / 256.0; // = h^2, the convergence-study scaling
    c.T = 1.0;
  } else if (name == "spinodal_snapshots") {
    c.kind = ScenarioKind::spinodal;
    c.n = 150;
    c.dt = 1.0 / 1000.0;
    c.T = 1.0;
    c.seed = 42;
    c.params.gamma = 1.0 / 100.0;
    c.output.every = 100;
  } else if (name == "spinodal_energy") {
    c.kind = ScenarioKind::spinodal;
    c.n = 120;
    c.dt = 1.0 / 100.0; // the published history runs also use 1/10 and 1/1000
    c.T = 1.0;
    c.seed = 42;
    c.params.gamma = 1.0 / 100.0;
    c.params.lambda = 1.0 / 100.0;
  } else if (name == "lid_mu2" || name == "lid_mu06" || name == "lid_mu01") {
    c.kind = ScenarioKind::lid_driven;
    c.n = 120;
    c.dt = 1.0 / 1000.0;
    c.T = 1.0;
    c.params.gamma = 1.0 / 120.0;
    c.params.lambda = 1.0 / 1000.0;
    c.params.mu = (name == "lid_mu2") ? 2.0 : (name == "lid_mu06") ? 0.6 : 0.1;
    c.params.mobility = CoefficientModel::linear(0.12, 0.12);
    c.params.viscosity = CoefficientModel::linear(1.0 / 1000.0, 1.0 / 100.0);
    c.params.conductivity = CoefficientModel::linear(50.0, 150.0);
    c.output.every = 100;
  } else if (name == "kelvin_helmholtz") {
    c.kind = ScenarioKind::kelvin_helmholtz;
    c.n = 150;
    c.dt = 1.0 / 1000.0;
    c.T = 1.4; // horizon of the published interface roll-up sequence
    c.params.gamma = 1.0 / 100.0;
    c.params.lambda = 1.0 / 10000.0;
    c.params.mobility = CoefficientModel::linear(1.0 / 100.0, 1.0 / 100.0);
    c.params.viscosity = CoefficientModel::linear(1.0 / 1000.0, 1.0 / 1000.0);
    c.induction_init = InductionInit::interpolation;
    c.output.every = 100;
  } else {
    throw ConfigError("unknown scenario preset '" + name + "'");
  }
  c.output.directory = "out/" + name;
  c.params.dt = c.dt;
  c.validate();
  return c;
}

std::vector<std::string> scenario_preset_names() {
  return {"manufactured", "spinodal_snapshots", "spinodal_energy",
          "lid_mu2",      "lid_mu06",           "lid_mu01",
          "kelvin_helmholtz"};
}

Spaces scenario_spaces(const ScenarioConfig& cfg) {
  cfg.validate();
  SpaceSpec spec;
  if (cfg.kind == ScenarioKind::kelvin_helmholtz) {
    spec.periodic_x = true;
    spec.velocity_bc = BoundarySpec::none();
    spec.velocity_bc.component_mask[side_y0] = 2; // wall-normal component only
    spec.velocity_bc.component_mask[side_y1] = 2;
    spec.induction_bc = BoundarySpec::none();
    spec.induction_bc.component_mask[side_y0] = 1;
    spec.induction_bc.component_mask[side_y1] = 1;
  }
  return build_spaces(cfg.n, spec);
}

State scenario_initial_state(const ScenarioConfig& cfg, const Spaces& spaces) {
  cfg.validate();
  State s = make_state(spaces);

  switch (cfg.kind) {
    case ScenarioKind::manufactured: {
      const ExactSolution ex = exact_solution(0.0, cfg.run_params());
      s.phi = ritz_project(spaces.phase, ex.phi, ex.grad_phi);
      s.u = l2_project(spaces.velocity, ex.u);
      s.B = initial_induction(cfg, spaces, ex.B, ex.curl_B, ex.u);
      break;
    }
    case ScenarioKind::spinodal: {
      // Seeded uniform noise per vertex; deliberately no projection, which
      // would smooth the noise mesh-dependently.
      SplitMix64 rng(cfg.seed);
      for (int v = 0; v < spaces.phase.n_dofs; ++v)
        s.phi.coeffs[v] = -0.05 + 0.001 * (2.0 * rng.uniform01() - 1.0);
      break;
    }
    case ScenarioKind::lid_driven: {
      const auto phi0 = [](double, double y) { return std::tanh(100.0 * (y - 0.5)); };
      const auto grad_phi0 = [](double, double y) -> std::array<double, 2> {
        const double th = std::tanh(100.0 * (y - 0.5));
        return {0.0, 100.0 * (1.0 - th * th)};
      };
      s.phi = ritz_project(spaces.phase, phi0, grad_phi0);
      const auto B0 = [](double, double) -> std::array<double, 2> { return {1.0, 0.0}; };
      const auto curl_B0 = [](double, double) { return 0.0; };
      const auto u0 = [](double, double) -> std::array<double, 2> { return {0.0, 0.0}; };
      s.B = initial_induction(cfg, spaces, B0, curl_B0, u0);
      break;
    }
    case ScenarioKind::kelvin_helmholtz: {
      const double gamma = cfg.params.gamma;
      const auto phi0 = [gamma](double x, double y) { return kh_profile(x, y, gamma); };
      const auto grad_phi0 = [gamma](double x, double y) {
        return kh_profile_grad(x, y, gamma);
      };
      s.phi = ritz_project(spaces.phase, phi0, grad_phi0);
      s.u = l2_project(spaces.velocity, [gamma](double x, double y) -> std::array<double, 2> {
        return {kh_profile(x, y, gamma), 0.0};
      });
      const auto B0 = [](double, double) -> std::array<double, 2> { return {1.0, 0.0}; };
      const auto curl_B0 = [](double, double) { return 0.0; };
      const auto u0 = [gamma](double x, double y) -> std::array<double, 2> {
        return {kh_profile(x, y, gamma), 0.0};
      };
      s.B = initial_induction(cfg, spaces, B0, curl_B0, u0);
      break;
    }
  }
  return s;
}

BoundaryValues scenario_boundary_values(const ScenarioConfig& cfg, const Spaces& spaces,
                                        double t) {
  BoundaryValues bv;
  switch (cfg.kind) {
    case ScenarioKind::manufactured:
      return exact_boundary_values(spaces, t);
    case ScenarioKind::spinodal:
      break; // homogeneous
    case ScenarioKind::lid_driven: {
      // Moving lid (7x(x-1), 0) along y=1, no-slip elsewhere. The profile
      // vanishes at the corners, so it is compatible with the side walls.
      const Mesh& mesh = *spaces.mesh;
      bv.velocity.assign(static_cast<size_t>(spaces.velocity.n_dofs), 0.0);
      for (int v = 0; v < mesh.n_vertices(); ++v) {
        if (mesh.vertex_side_mask[v] & (1u << side_y1)) {
          const double x = mesh.vertices[v][0];
          bv.velocity[v] = 7.0 * x * (x - 1.0);
        }
      }
      bv.induction = induction_dirichlet(
          spaces, [](double, double) -> std::array<double, 2> { return {1.0, 0.0}; });
      break;
    }
    case ScenarioKind::kelvin_helmholtz:
      // u2 = 0 at the walls is homogeneous; B is (-1, 0) there.
      bv.induction = induction_dirichlet(
          spaces, [](double, double) -> std::array<double, 2> { return {-1.0, 0.0}; });
      break;
  }
  return bv;
}

RunHooks scenario_hooks(const ScenarioConfig& cfg, const Spaces& spaces) {
  RunHooks hooks;
  const Spaces* sp = &spaces;
  if (cfg.kind == ScenarioKind::manufactured) {
    const Params p = cfg.run_params();
    hooks.forcing = [p](double t) { return exact_forcing(t, p); };
    hooks.boundary = [sp](double t) { return exact_boundary_values(*sp, t); };
    return hooks;
  }
  if (cfg.kind == ScenarioKind::spinodal) return hooks; // nothing to supply
  // Lid and K-H data are time-independent; compute once and share.
  auto cached = std::make_shared<BoundaryValues>(scenario_boundary_values(cfg, spaces, 0.0));
  hooks.boundary = [cached](double) { return *cached; };
  return hooks;
}

} // namespace chmhd
