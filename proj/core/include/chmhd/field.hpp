#pragma once

#include "chmhd/dofmap.hpp"
#include "chmhd/linalg.hpp"

#include <array>
#include <functional>

namespace chmhd {

using ScalarFn = std::function<double(double, double)>;
using VectorFn = std::function<std::array<double, 2>(double, double)>;
// Row-major Jacobian: [d0/dx, d0/dy, d1/dx, d1/dy]
using JacobianFn = std::function<std::array<double, 4>(double, double)>;

struct FEField {
  const DofMap* space = nullptr;
  Vector coeffs;
};

FEField zero_field(const DofMap& space);

// Nodal/edge-moment interpolation. Lagrange takes point values (P2 adds edge
// midpoints), Mini leaves the bubbles at zero, DG0 samples centroids, and
// Nedelec0 takes tangential edge moments by 3-point Gauss.
FEField interpolate(const DofMap& space, const ScalarFn& f);
FEField interpolate(const DofMap& space, const VectorFn& f);

// Tangential moment of f over one edge, low-to-high vertex orientation.
double edge_moment(const Mesh& mesh, int edge, const VectorFn& f, int n_gauss = 3);

// Cell-local evaluation at a barycentric point (gradients/curls in physical
// coordinates).
double eval_scalar(const FEField& u, int cell, const std::array<double, 3>& bc);
std::array<double, 2> eval_scalar_grad(const FEField& u, int cell, const std::array<double, 3>& bc);
std::array<double, 2> eval_vector(const FEField& u, int cell, const std::array<double, 3>& bc);
std::array<double, 4> eval_vector_jac(const FEField& u, int cell, const std::array<double, 3>& bc);
std::array<double, 2> eval_hcurl(const FEField& u, int cell, const std::array<double, 3>& bc);
double eval_curl(const FEField& u, int cell, const std::array<double, 3>& bc);

// Point evaluation through locate_point.
double eval_scalar_at(const FEField& u, double x, double y);
std::array<double, 2> eval_scalar_grad_at(const FEField& u, double x, double y);
std::array<double, 2> eval_vector_at(const FEField& u, double x, double y);
std::array<double, 4> eval_vector_jac_at(const FEField& u, double x, double y);
std::array<double, 2> eval_hcurl_at(const FEField& u, double x, double y);
double eval_curl_at(const FEField& u, double x, double y);

enum class NormKind { L2, H1_semi, Hcurl };

// ||u_h - exact|| in the requested norm, degree-8 quadrature. The FE side is
// evaluated through the same point-evaluation path as any FE-backed callback,
// so comparing a field against its own evaluation gives exactly zero.
double error_norm(const FEField& u, const ScalarFn& exact, const VectorFn& exact_grad,
                  NormKind norm);
double error_norm(const FEField& u, const VectorFn& exact, const JacobianFn& exact_jac,
                  NormKind norm);
// Nedelec0 version; exact_curl is the scalar curl dx(u2) - dy(u1).
double error_norm_hcurl(const FEField& u, const VectorFn& exact, const ScalarFn& exact_curl,
                        NormKind norm);

} // namespace chmhd
