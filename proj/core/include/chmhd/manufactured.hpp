#pragma once

#include <array>
#include <cstdint>

#include "chmhd/assembly.hpp"
#include "chmhd/constraints.hpp"
#include "chmhd/field.hpp"
#include "chmhd/spaces.hpp"

namespace chmhd {

// Trigonometric reference solution on the unit square used for convergence
// studies. The fields satisfy the continuous system once the matching body
// forces from exact_forcing() are added; velocity is solenoidal and vanishes
// on the boundary, the induction field is solenoidal with nonzero tangential
// trace, and the pressure has zero mean.
//
//   phi = cos(t) cos^2(pi x) cos^2(pi y)
//   u   = cos(t) (pi sin(2 pi y) sin^2(pi x), -pi sin(2 pi x) sin^2(pi y))
//   p   = cos(t) (2x - 2)(2y - 1)
//   B   = cos(t) (sin(pi x) cos(pi y), -sin(pi y) cos(pi x))

// Closed-form fields frozen at one time level. omega is the chemical
// potential consistent with params.gamma.
struct ExactSolution {
  ScalarFn phi;
  VectorFn grad_phi;
  ScalarFn omega;
  VectorFn grad_omega;
  VectorFn u;
  JacobianFn grad_u;
  ScalarFn p;
  VectorFn grad_p;
  VectorFn B;
  ScalarFn curl_B;
};

ExactSolution exact_solution(double t, const Params& params);

// Body forces at time t. All coefficient models in params must be constant;
// phase-dependent coefficients have no closed-form forcing here.
ForcingSet exact_forcing(double t, const Params& params);

// Dirichlet data at time t: nodal velocity values (zero up to rounding for
// this solution) and tangential edge moments of the exact induction field.
BoundaryValues exact_boundary_values(const Spaces& spaces, double t);

// Finite-difference audit of the closed-form forcings. Reconstructs each
// force from the field values alone (central differences, step 1e-5; second
// derivatives by three-point stencils, mixed ones by the four-point cross)
// at points sampled uniformly from [0.05, 0.95]^2 x [0, 2]. A component
// passes when |fd - formula| <= tol * (1 + S) with S the largest |formula|
// seen for that component across the whole sample; the floor keeps points
// near forcing zeros from amplifying stencil roundoff.
struct ForcingAudit {
  bool passed = false;
  int n_points = 0;
  // Component order: f_phi, f_u1, f_u2, f_B1, f_B2.
  std::array<double, 5> max_diff{};
  std::array<double, 5> scale{};
  double worst = 0.0; // max over components of max_diff / (1 + scale)
};

ForcingAudit validate_forcing(const Params& params, int n_points = 50, double tol = 1e-6,
                              std::uint64_t seed = 1);

} // namespace chmhd
