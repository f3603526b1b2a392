#pragma once

// Element assembly for the coupled phase-field / flow / induction system.
// Everything here integrates with the shared degree-6 triangle rule so the
// stiffness-vs-transport cancellation behind the energy estimate is exact
// (all scheme integrands are polynomials of degree <= 6 once the coefficient
// models below are evaluated pointwise).

#include <array>
#include <map>
#include <utility>

#include "chmhd/field.hpp"
#include "chmhd/linalg.hpp"
#include "chmhd/spaces.hpp"

namespace chmhd {

// Quadrature degree used by every scheme matrix and load in this module.
constexpr int kAssemblyDegree = 6;

// Phase-dependent material coefficient: the linear interpolant taking value
// v1 at phi = -1 and v2 at phi = +1, clamped from below at min(v1, v2) / 10
// so overshooting phase values cannot drive it toward zero. A constant model
// (v1 == v2) evaluates through the same arithmetic and returns the constant
// bit-exactly.
struct CoefficientModel {
  double v1 = 1.0;
  double v2 = 1.0;

  static CoefficientModel constant(double c) { return {c, c}; }
  static CoefficientModel linear(double v1, double v2) { return {v1, v2}; }

  double operator()(double phi) const;
  bool is_constant() const { return v1 == v2; }
  void validate(const char* name) const; // both endpoints must be positive
};

struct Params {
  double gamma = 1.0;  // interface width
  double lambda = 1.0; // capillary coupling strength
  double mu = 1.0;     // magnetic permeability
  double dt = 1e-2;
  CoefficientModel mobility = CoefficientModel::constant(1.0);
  CoefficientModel viscosity = CoefficientModel::constant(1.0);
  CoefficientModel conductivity = CoefficientModel::constant(1.0);

  void validate() const;
};

// Right-hand sides of the three evolution equations, already bound to the
// evaluation time. Null members mean zero forcing.
struct ForcingSet {
  ScalarFn phase;
  VectorFn velocity;
  VectorFn induction;
};

// --- individual forms -------------------------------------------------------
// All assemblers emit one triplet per local pair even when the value is zero,
// so the assembled pattern never depends on the coefficients and factorization
// symbolics can be reused across time steps.

// (u, v); block-diagonal over components, edge-element Gram for Nedelec0.
SparseMatrix assemble_mass(const DofMap& space);

// (c(phi_lag) grad u, grad v), component-wise for vector spaces. Passing a
// null phase field requires a constant model.
SparseMatrix assemble_stiffness(const DofMap& space, const CoefficientModel& coefficient,
                                const FEField* phi_lag);

// (1/c(phi_lag) curl u, curl v) on the edge space; `coefficient` is the
// conductivity model, inverted pointwise after clamping.
SparseMatrix assemble_curl_curl(const DofMap& space, const CoefficientModel& coefficient,
                                const FEField* phi_lag);

// Skew-symmetrized transport 1/2 [((w.grad)u, v) - ((w.grad)v, u)] with the
// lagged velocity w. Local blocks are emitted as exactly negated pairs, so
// x^T C x vanishes to rounding for every x.
SparseMatrix assemble_convection(const DofMap& velocity_space, const FEField& u_lag);

// Transport/capillary adjoint pair sharing one set of integrals:
//   first[i][j]  = (grad(phi_lag) . Psi_j, chi_i)   rows: scalar, cols: velocity
//   second       = -first^T                          (bitwise negated transpose)
std::pair<TripletList, TripletList> assemble_phase_velocity_coupling(
    const DofMap& scalar_space, const DofMap& velocity_space, const FEField& phi_lag);

// Lorentz/induction adjoint pair sharing one set of integrals:
//   first[i][j]  = (curl Theta_j, Psi_i x B_lag)    rows: velocity, cols: edge
//   second       = first^T                           (bitwise transpose)
// The cross product is the scalar a x b = a1 b2 - a2 b1; the permeability
// scaling and the signs of the two placements are applied by the caller.
std::pair<TripletList, TripletList> assemble_lorentz_coupling(const DofMap& velocity_space,
                                                              const DofMap& induction_space,
                                                              const FEField& B_lag);

// (div Psi_j, q_i); rows: pressure, cols: velocity.
SparseMatrix assemble_divergence(const DofMap& velocity_space, const DofMap& pressure_space);

// (1, q_i) for the zero-mean pressure gauge (any scalar nodal space).
Vector assemble_area_vector(const DofMap& space);

// (f, basis_i).
Vector assemble_load(const DofMap& space, const ScalarFn& f);
Vector assemble_load(const DofMap& space, const VectorFn& f);

// Nonlinear double-well term of the chemical-potential equation, convex part
// implicit and concave part lagged:
//   residual_i = 1/gamma ((phi_new)^3 - phi_old, psi_i)
//   jacobian   = 1/gamma (3 (phi_new)^2 psi_j, psi_i)
struct CubicTerm {
  Vector residual;
  TripletList jacobian;
};
CubicTerm assemble_cubic(const DofMap& space, const Vector& phi_new, const Vector& phi_old,
                         double gamma);

// --- monolithic system ------------------------------------------------------

// Linear part of one implicit step, blocked by (row field, column field).
// The cubic term is the only piece missing; the Newton loop adds it per
// iteration at the (chemical_potential, phase) block.
struct BlockSystem {
  FieldLayout layout;
  std::map<std::pair<int, int>, TripletList> blocks;
  std::array<Vector, kNumFields> rhs;

  TripletList& block(Field row, Field col);
  const TripletList* find(Field row, Field col) const;
};

BlockSystem build_monolithic(const Spaces& spaces, const Params& params, const FEField& phi_k,
                             const FEField& u_k, const FEField& B_k,
                             const ForcingSet* forcing);

// Offsets every block/segment into one global triplet list / vector.
TripletList flatten(const BlockSystem& system);
Vector flatten_rhs(const BlockSystem& system);

} // namespace chmhd
