#include "chmhd/diagnostics.hpp"

#include <cmath>

#include "chmhd/error.hpp"
#include "chmhd/quadrature.hpp"

namespace chmhd {

namespace {

constexpr int kEnergyDegree = 8;

// Quadrature loop over all cells; fn(cell, bc, weight) accumulates.
template <typename Fn>
void for_quadrature(const Mesh& mesh, int degree, Fn&& fn) {
  const QuadratureRule& rule = quadrature_rule(degree);
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const double det = cell_geometry(mesh, c).det;
    for (int q = 0; q < rule.size(); ++q) fn(c, rule.points[q], rule.weights[q] * det);
  }
}

} // namespace

double discrete_mass(const FEField& phi) {
  if (phi.space == nullptr) throw Error("discrete_mass: field has no space");
  double mass = 0.0;
  for_quadrature(*phi.space->mesh, 2, [&](int c, const std::array<double, 3>& bc, double w) {
    mass += w * eval_scalar(phi, c, bc);
  });
  return mass;
}

EnergyBreakdown system_energy(const FEField& phi, const FEField& u, const FEField& B,
                              const Params& params) {
  params.validate();
  EnergyBreakdown e;
  const Mesh& mesh = *phi.space->mesh;
  for_quadrature(mesh, kEnergyDegree, [&](int c, const std::array<double, 3>& bc, double w) {
    const auto gp = eval_scalar_grad(phi, c, bc);
    const double pv = eval_scalar(phi, c, bc);
    const double well = pv * pv - 1.0;
    const auto uv = eval_vector(u, c, bc);
    const auto Bv = eval_hcurl(B, c, bc);
    e.interface += w * (gp[0] * gp[0] + gp[1] * gp[1]);
    e.potential += w * well * well;
    e.kinetic += w * (uv[0] * uv[0] + uv[1] * uv[1]);
    e.magnetic += w * (Bv[0] * Bv[0] + Bv[1] * Bv[1]);
  });
  e.interface *= 0.5 * params.lambda * params.gamma;
  e.potential *= 0.25 * params.lambda / params.gamma;
  e.kinetic *= 0.5;
  e.magnetic *= 0.5 / params.mu;
  e.total = e.interface + e.potential + e.kinetic + e.magnetic;
  return e;
}

double algorithm_energy(const FEField& phi, const FEField& u, const FEField& B) {
  Params unit;
  return system_energy(phi, u, B, unit).total;
}

DissipationNorms dissipation_norms(const FEField& omega, const FEField& u, const FEField& B) {
  DissipationNorms d;
  const Mesh& mesh = *omega.space->mesh;
  for_quadrature(mesh, kEnergyDegree, [&](int c, const std::array<double, 3>& bc, double w) {
    const auto go = eval_scalar_grad(omega, c, bc);
    const auto ju = eval_vector_jac(u, c, bc);
    const double curl = eval_curl(B, c, bc);
    d.grad_omega_sq += w * (go[0] * go[0] + go[1] * go[1]);
    d.grad_u_sq += w * (ju[0] * ju[0] + ju[1] * ju[1] + ju[2] * ju[2] + ju[3] * ju[3]);
    d.curl_B_sq += w * curl * curl;
  });
  return d;
}

DiagnosticsRow diagnostics_row(int step, double t, const FEField& phi, const FEField& omega,
                               const FEField& u, const FEField& B, const Params& params) {
  DiagnosticsRow row;
  row.step = step;
  row.t = t;
  row.mass = discrete_mass(phi);
  row.system_energy = system_energy(phi, u, B, params).total;
  row.algorithm_energy = algorithm_energy(phi, u, B);
  const DissipationNorms d = dissipation_norms(omega, u, B);
  row.grad_omega_sq = d.grad_omega_sq;
  row.grad_u_sq = d.grad_u_sq;
  row.curl_B_sq = d.curl_B_sq;
  return row;
}

TerminalErrors terminal_errors(const FEField& phi, const FEField& u, const FEField& B,
                               const FEField& p, const ExactSolution& exact) {
  TerminalErrors e;
  e.phi_l2 = error_norm(phi, exact.phi, exact.grad_phi, NormKind::L2);
  e.phi_h1 = error_norm(phi, exact.phi, exact.grad_phi, NormKind::H1_semi);
  e.u_l2 = error_norm(u, exact.u, exact.grad_u, NormKind::L2);
  e.u_h1 = error_norm(u, exact.u, exact.grad_u, NormKind::H1_semi);
  e.B_l2 = error_norm_hcurl(B, exact.B, exact.curl_B, NormKind::L2);
  e.B_hcurl = error_norm_hcurl(B, exact.B, exact.curl_B, NormKind::Hcurl);
  e.p_l2 = error_norm(p, exact.p, exact.grad_p, NormKind::L2);
  return e;
}

std::vector<double> convergence_rates(const std::vector<double>& h,
                                      const std::vector<double>& errors) {
  if (h.size() != errors.size()) throw Error("convergence_rates: size mismatch");
  if (h.empty()) throw Error("convergence_rates: no levels");
  std::vector<double> rates(h.size(), std::nan(""));
  for (size_t i = 1; i < h.size(); ++i) {
    if (std::abs(h[i - 1] / h[i] - 2.0) > 1e-9)
      throw Error("convergence_rates: levels must halve h");
    rates[i] = std::log2(errors[i - 1] / errors[i]);
  }
  return rates;
}

} // namespace chmhd
