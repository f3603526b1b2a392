#pragma once

#include <string>
#include <vector>

#include "chmhd/config.hpp"
#include "chmhd/stepper.hpp"

namespace chmhd {

// Shipped run configurations:
//   manufactured       unit coefficients, reference solution forcing
//   spinodal_snapshots gamma = 1/100, coarsening from random initial data
//   spinodal_energy    gamma = lambda = 1/100, energy/mass history run
//   lid_mu2 / lid_mu06 / lid_mu01
//                      driven cavity with phase-dependent coefficients and
//                      decreasing permeability (stronger Lorentz force)
//   kelvin_helmholtz   periodic-in-x shear layer with magnetic field
// Throws ConfigError on an unknown name.
ScenarioConfig scenario_preset(const std::string& name);
std::vector<std::string> scenario_preset_names();

// Spaces carrying the scenario's constraints. Kelvin-Helmholtz is periodic
// in x with slip walls (only the wall-normal velocity component pinned);
// every other scenario clamps the full velocity and the tangential induction
// trace on all four sides.
Spaces scenario_spaces(const ScenarioConfig& cfg);

// Initial fields: phi0 by Ritz projection of the scenario profile (spinodal
// assigns seeded nodal noise directly instead), u0 by L2 projection, B0 by
// the curl-curl quasi-projection or tangential interpolation per
// cfg.induction_init. Chemical potential and pressure start at zero.
State scenario_initial_state(const ScenarioConfig& cfg, const Spaces& spaces);

// Dirichlet data at time t. Time-independent except for the manufactured
// scenario, which tracks the reference solution.
BoundaryValues scenario_boundary_values(const ScenarioConfig& cfg, const Spaces& spaces,
                                        double t);

// forcing/boundary hooks for run(); on_step is left empty. cfg is copied;
// spaces must outlive the returned hooks.
RunHooks scenario_hooks(const ScenarioConfig& cfg, const Spaces& spaces);

} // namespace chmhd
