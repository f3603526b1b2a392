#pragma once

// Initial-data operators: Ritz projection for the phase field, L2 projection
// for the velocity, and the velocity-weighted curl-curl quasi-projection for
// the induction field. Matrices use the shared assembly quadrature; loads
// against analytic targets integrate at degree 8 so consistency error stays
// far below the orders being measured.

#include "chmhd/field.hpp"

namespace chmhd {

// H1-seminorm orthogonal projection onto a scalar Lagrange space, normalized
// to reproduce the target mean (enforced through a scalar multiplier).
FEField ritz_project(const DofMap& space, const ScalarFn& f, const VectorFn& grad_f);

// Mass-matrix projection onto the velocity space. Dirichlet entries are
// pinned to the nodal interpolant of the target so the result is admissible
// as initial data.
FEField l2_project(const DofMap& space, const VectorFn& f);

// Curl-curl projection with the cross coupling (curl zeta)(u0 x .) and the
// weighted mass term 7(|u0|^2 + 1)(., zeta), solved over every edge unknown
// (boundary edges included; the weighted mass keeps the full-space system
// nonsingular). curl_f is the scalar curl of the target.
FEField maxwell_quasi_project(const DofMap& space, const VectorFn& f, const ScalarFn& curl_f,
                              const VectorFn& u0);

} // namespace chmhd
