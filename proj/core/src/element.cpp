#include "chmhd/element.hpp"

#include "chmhd/error.hpp"

namespace chmhd {

namespace {
// Reference gradients of the barycentric coordinates (l0, l1, l2) with
// l0 = 1 - x - y, l1 = x, l2 = y.
constexpr double kL[3][2] = {{-1.0, -1.0}, {1.0, 0.0}, {0.0, 1.0}};
// Local edges, matching Mesh::cell_edges: (0,1), (1,2), (2,0).
constexpr int kEdge[3][2] = {{0, 1}, {1, 2}, {2, 0}};
} // namespace

int basis_count(ElementKind kind) {
  switch (kind) {
    case ElementKind::Lagrange1: return 3;
    case ElementKind::Lagrange2: return 6;
    case ElementKind::Mini: return 4;
    case ElementKind::Nedelec0: return 3;
    case ElementKind::DG0: return 1;
  }
  throw Error("basis_count: unknown element kind");
}

BasisEval reference_basis(ElementKind kind, const std::array<double, 3>& bc) {
  const double l0 = bc[0], l1 = bc[1], l2 = bc[2];
  BasisEval out;
  out.count = basis_count(kind);

  switch (kind) {
    case ElementKind::Lagrange1:
      for (int i = 0; i < 3; ++i) {
        out.values[i] = bc[i];
        out.grads[i] = {kL[i][0], kL[i][1]};
      }
      return out;

    case ElementKind::Lagrange2: {
      for (int i = 0; i < 3; ++i) {
        out.values[i] = bc[i] * (2.0 * bc[i] - 1.0);
        out.grads[i] = {(4.0 * bc[i] - 1.0) * kL[i][0], (4.0 * bc[i] - 1.0) * kL[i][1]};
      }
      for (int k = 0; k < 3; ++k) {
        const int a = kEdge[k][0], b = kEdge[k][1];
        out.values[3 + k] = 4.0 * bc[a] * bc[b];
        out.grads[3 + k] = {4.0 * (bc[a] * kL[b][0] + bc[b] * kL[a][0]),
                            4.0 * (bc[a] * kL[b][1] + bc[b] * kL[a][1])};
      }
      return out;
    }

    case ElementKind::Mini: {
      for (int i = 0; i < 3; ++i) {
        out.values[i] = bc[i];
        out.grads[i] = {kL[i][0], kL[i][1]};
      }
      // Cubic bubble normalized to 1 at the centroid.
      out.values[3] = 27.0 * l0 * l1 * l2;
      out.grads[3] = {27.0 * (l1 * l2 * kL[0][0] + l0 * l2 * kL[1][0] + l0 * l1 * kL[2][0]),
                      27.0 * (l1 * l2 * kL[0][1] + l0 * l2 * kL[1][1] + l0 * l1 * kL[2][1])};
      return out;
    }

    case ElementKind::Nedelec0: {
      for (int k = 0; k < 3; ++k) {
        const int a = kEdge[k][0], b = kEdge[k][1];
        out.vec_values[k] = {bc[a] * kL[b][0] - bc[b] * kL[a][0],
                             bc[a] * kL[b][1] - bc[b] * kL[a][1]};
        out.curls[k] = 2.0; // 2 * (grad l_a x grad l_b) for each local edge
      }
      return out;
    }

    case ElementKind::DG0:
      out.values[0] = 1.0;
      out.grads[0] = {0.0, 0.0};
      return out;
  }
  throw Error("reference_basis: unknown element kind");
}

} // namespace chmhd
