#pragma once

#include <vector>

#include "chmhd/assembly.hpp"
#include "chmhd/field.hpp"
#include "chmhd/manufactured.hpp"

namespace chmhd {

// Integral of a scalar Lagrange field over the domain. The scheme conserves
// this for the phase field exactly (up to solver tolerance), so it is the
// quantity the mass-conservation checks track.
double discrete_mass(const FEField& phi);

// Free energy split by contribution:
//   interface  (lambda gamma / 2) ||grad phi||^2
//   potential  (lambda / 4 gamma) ||phi^2 - 1||^2
//   kinetic    (1/2) ||u||^2
//   magnetic   (1 / 2 mu) ||B||^2
// Quadrature is exact for the integrands (piecewise polynomials of degree
// at most six), so these are the discrete energies, not approximations.
struct EnergyBreakdown {
  double interface = 0.0;
  double potential = 0.0;
  double kinetic = 0.0;
  double magnetic = 0.0;
  double total = 0.0;
};

EnergyBreakdown system_energy(const FEField& phi, const FEField& u, const FEField& B,
                              const Params& params);

// The same functional with every constant set to one; the per-step decay
// estimate of the time discretization is stated for this quantity.
double algorithm_energy(const FEField& phi, const FEField& u, const FEField& B);

// Unweighted squared dissipation seminorms entering the decay estimate.
struct DissipationNorms {
  double grad_omega_sq = 0.0;
  double grad_u_sq = 0.0;
  double curl_B_sq = 0.0;
};

DissipationNorms dissipation_norms(const FEField& omega, const FEField& u, const FEField& B);

// One time-series record, written per accepted step (including step 0).
struct DiagnosticsRow {
  int step = 0;
  double t = 0.0;
  double mass = 0.0;
  double system_energy = 0.0;
  double algorithm_energy = 0.0;
  double grad_omega_sq = 0.0;
  double grad_u_sq = 0.0;
  double curl_B_sq = 0.0;
};

DiagnosticsRow diagnostics_row(int step, double t, const FEField& phi, const FEField& omega,
                               const FEField& u, const FEField& B, const Params& params);

// Errors against the reference solution at the final time.
struct TerminalErrors {
  double phi_l2 = 0.0;
  double phi_h1 = 0.0;
  double u_l2 = 0.0;
  double u_h1 = 0.0;
  double B_l2 = 0.0;
  double B_hcurl = 0.0;
  double p_l2 = 0.0;
};

TerminalErrors terminal_errors(const FEField& phi, const FEField& u, const FEField& B,
                               const FEField& p, const ExactSolution& exact);

// rates[i] = log2(errors[i-1] / errors[i]); rates[0] is NaN. Levels must
// halve h exactly (|h[i-1]/h[i] - 2| <= 1e-9) or the ratios are meaningless,
// so anything else is an error.
std::vector<double> convergence_rates(const std::vector<double>& h,
                                      const std::vector<double>& errors);

} // namespace chmhd
