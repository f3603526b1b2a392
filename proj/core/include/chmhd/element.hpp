#pragma once

// Reference-element bases. Scalar families (P1, P2, the P1+cubic-bubble
// enrichment, piecewise constants) report values and reference gradients;
// the lowest-order edge family reports vector values and scalar curls.
// All geometry mapping happens at the call sites via CellGeometry.

#include <array>

namespace chmhd {

enum class ElementKind { Lagrange1, Lagrange2, Mini, Nedelec0, DG0 };

// Scalar basis functions per cell and per component (Nedelec0 counts its
// three edge functions).
int basis_count(ElementKind kind);

struct BasisEval {
  int count = 0;
  // Scalar families:
  std::array<double, 6> values{};
  std::array<std::array<double, 2>, 6> grads{}; // d/dxhat, d/dyhat
  // Edge family:
  std::array<std::array<double, 2>, 3> vec_values{};
  std::array<double, 3> curls{}; // constant 2 on the reference cell
};

// Evaluates the reference basis at a barycentric point. For Nedelec0 the
// vector values/curls fields are populated instead of values/grads.
BasisEval reference_basis(ElementKind kind, const std::array<double, 3>& bc);

} // namespace chmhd
