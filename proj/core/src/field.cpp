#include "chmhd/field.hpp"

#include "chmhd/error.hpp"
#include "chmhd/quadrature.hpp"

#include <cmath>

namespace chmhd {

FEField zero_field(const DofMap& space) {
  return FEField{&space, Vector(static_cast<size_t>(space.n_dofs), 0.0)};
}

double edge_moment(const Mesh& mesh, int edge, const VectorFn& f, int n_gauss) {
  const auto [a, b] = mesh.edges[edge];
  const auto& pa = mesh.vertices[a];
  const auto& pb = mesh.vertices[b];
  const double tx = pb[0] - pa[0], ty = pb[1] - pa[1];
  std::vector<double> gx, gw;
  gauss_legendre_01(n_gauss, gx, gw);
  double m = 0.0;
  for (int q = 0; q < n_gauss; ++q) {
    const auto v = f(pa[0] + gx[q] * tx, pa[1] + gx[q] * ty);
    m += gw[q] * (v[0] * tx + v[1] * ty);
  }
  return m;
}

FEField interpolate(const DofMap& space, const ScalarFn& f) {
  if (space.components != 1 || space.kind == ElementKind::Nedelec0)
    throw Error("interpolate: scalar callable needs a scalar nodal space");
  const Mesh& mesh = *space.mesh;
  FEField u = zero_field(space);
  for (int v = 0; v < mesh.n_vertices(); ++v)
    u.coeffs[v] = f(mesh.vertices[v][0], mesh.vertices[v][1]);
  if (space.kind == ElementKind::Lagrange2) {
    for (int e = 0; e < mesh.n_edges(); ++e) {
      const auto& pa = mesh.vertices[mesh.edges[e][0]];
      const auto& pb = mesh.vertices[mesh.edges[e][1]];
      u.coeffs[mesh.n_vertices() + e] = f(0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1]));
    }
  } else if (space.kind == ElementKind::DG0) {
    for (int c = 0; c < mesh.n_cells(); ++c) {
      const auto& v = mesh.cells[c];
      const double cx = (mesh.vertices[v[0]][0] + mesh.vertices[v[1]][0] + mesh.vertices[v[2]][0]) / 3.0;
      const double cy = (mesh.vertices[v[0]][1] + mesh.vertices[v[1]][1] + mesh.vertices[v[2]][1]) / 3.0;
      u.coeffs[c] = f(cx, cy);
    }
  }
  // Mini: bubble coefficients stay zero, the nodal part carries the data.
  return u;
}

FEField interpolate(const DofMap& space, const VectorFn& f) {
  const Mesh& mesh = *space.mesh;
  FEField u = zero_field(space);
  if (space.kind == ElementKind::Nedelec0) {
    for (int e = 0; e < mesh.n_edges(); ++e) u.coeffs[e] = edge_moment(mesh, e, f, 3);
    return u;
  }
  if (space.components != 2) throw Error("interpolate: vector callable needs two components");
  for (int comp = 0; comp < 2; ++comp) {
    const int base = comp * space.scalar_dofs;
    for (int v = 0; v < mesh.n_vertices(); ++v)
      u.coeffs[base + v] = f(mesh.vertices[v][0], mesh.vertices[v][1])[comp];
    if (space.kind == ElementKind::Lagrange2) {
      for (int e = 0; e < mesh.n_edges(); ++e) {
        const auto& pa = mesh.vertices[mesh.edges[e][0]];
        const auto& pb = mesh.vertices[mesh.edges[e][1]];
        u.coeffs[base + mesh.n_vertices() + e] =
            f(0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1]))[comp];
      }
    }
  }
  return u;
}

namespace {

struct MappedBasis {
  BasisEval ref;
  CellGeometry geom;
};

MappedBasis mapped(const FEField& u, int cell, const std::array<double, 3>& bc) {
  return {reference_basis(u.space->kind, bc), cell_geometry(*u.space->mesh, cell)};
}

std::array<double, 2> push_grad(const CellGeometry& g, const std::array<double, 2>& ref) {
  return {g.inv_transpose[0][0] * ref[0] + g.inv_transpose[0][1] * ref[1],
          g.inv_transpose[1][0] * ref[0] + g.inv_transpose[1][1] * ref[1]};
}

} // namespace

double eval_scalar(const FEField& u, int cell, const std::array<double, 3>& bc) {
  const auto m = mapped(u, cell, bc);
  const int* dofs = u.space->cell(cell);
  double s = 0.0;
  for (int i = 0; i < m.ref.count; ++i) s += u.coeffs[dofs[i]] * m.ref.values[i];
  return s;
}

std::array<double, 2> eval_scalar_grad(const FEField& u, int cell, const std::array<double, 3>& bc) {
  const auto m = mapped(u, cell, bc);
  const int* dofs = u.space->cell(cell);
  std::array<double, 2> ref{0.0, 0.0};
  for (int i = 0; i < m.ref.count; ++i) {
    ref[0] += u.coeffs[dofs[i]] * m.ref.grads[i][0];
    ref[1] += u.coeffs[dofs[i]] * m.ref.grads[i][1];
  }
  return push_grad(m.geom, ref);
}

std::array<double, 2> eval_vector(const FEField& u, int cell, const std::array<double, 3>& bc) {
  if (u.space->kind == ElementKind::Nedelec0) return eval_hcurl(u, cell, bc);
  const auto m = mapped(u, cell, bc);
  const int* dofs = u.space->cell(cell);
  const int nb = m.ref.count;
  std::array<double, 2> out{0.0, 0.0};
  for (int comp = 0; comp < 2; ++comp)
    for (int i = 0; i < nb; ++i) out[comp] += u.coeffs[dofs[comp * nb + i]] * m.ref.values[i];
  return out;
}

std::array<double, 4> eval_vector_jac(const FEField& u, int cell, const std::array<double, 3>& bc) {
  const auto m = mapped(u, cell, bc);
  const int* dofs = u.space->cell(cell);
  const int nb = m.ref.count;
  std::array<double, 4> out{};
  for (int comp = 0; comp < 2; ++comp) {
    std::array<double, 2> ref{0.0, 0.0};
    for (int i = 0; i < nb; ++i) {
      ref[0] += u.coeffs[dofs[comp * nb + i]] * m.ref.grads[i][0];
      ref[1] += u.coeffs[dofs[comp * nb + i]] * m.ref.grads[i][1];
    }
    const auto g = push_grad(m.geom, ref);
    out[2 * comp] = g[0];
    out[2 * comp + 1] = g[1];
  }
  return out;
}

std::array<double, 2> eval_hcurl(const FEField& u, int cell, const std::array<double, 3>& bc) {
  const auto m = mapped(u, cell, bc);
  const int* dofs = u.space->cell(cell);
  const auto& signs = u.space->mesh->cell_edge_signs[cell];
  std::array<double, 2> ref{0.0, 0.0};
  for (int k = 0; k < 3; ++k) {
    const double c = u.coeffs[dofs[k]] * signs[k];
    ref[0] += c * m.ref.vec_values[k][0];
    ref[1] += c * m.ref.vec_values[k][1];
  }
  // Covariant map preserves tangential traces: v = J^{-T} vhat.
  return push_grad(m.geom, ref);
}

double eval_curl(const FEField& u, int cell, const std::array<double, 3>&) {
  const CellGeometry g = cell_geometry(*u.space->mesh, cell);
  const int* dofs = u.space->cell(cell);
  const auto& signs = u.space->mesh->cell_edge_signs[cell];
  double c = 0.0;
  for (int k = 0; k < 3; ++k) c += u.coeffs[dofs[k]] * signs[k] * 2.0;
  return c / g.det;
}

double eval_scalar_at(const FEField& u, double x, double y) {
  const auto loc = locate_point(*u.space->mesh, x, y);
  return eval_scalar(u, loc.cell, loc.barycentric);
}
std::array<double, 2> eval_scalar_grad_at(const FEField& u, double x, double y) {
  const auto loc = locate_point(*u.space->mesh, x, y);
  return eval_scalar_grad(u, loc.cell, loc.barycentric);
}
std::array<double, 2> eval_vector_at(const FEField& u, double x, double y) {
  const auto loc = locate_point(*u.space->mesh, x, y);
  return eval_vector(u, loc.cell, loc.barycentric);
}
std::array<double, 4> eval_vector_jac_at(const FEField& u, double x, double y) {
  const auto loc = locate_point(*u.space->mesh, x, y);
  return eval_vector_jac(u, loc.cell, loc.barycentric);
}
std::array<double, 2> eval_hcurl_at(const FEField& u, double x, double y) {
  const auto loc = locate_point(*u.space->mesh, x, y);
  return eval_hcurl(u, loc.cell, loc.barycentric);
}
double eval_curl_at(const FEField& u, double x, double y) {
  const auto loc = locate_point(*u.space->mesh, x, y);
  return eval_curl(u, loc.cell, loc.barycentric);
}

namespace {

constexpr int kErrorQuadDegree = 8;

template <typename Accum>
double cell_quadrature_sum(const Mesh& mesh, Accum&& accumulate) {
  const QuadratureRule& rule = quadrature_rule(kErrorQuadDegree);
  double total = 0.0;
  for (int cell = 0; cell < mesh.n_cells(); ++cell) {
    const CellGeometry g = cell_geometry(mesh, cell);
    const auto& verts = mesh.cells[cell];
    const auto& p0 = mesh.vertices[verts[0]];
    const auto& p1 = mesh.vertices[verts[1]];
    const auto& p2 = mesh.vertices[verts[2]];
    for (int q = 0; q < rule.size(); ++q) {
      const auto& bc = rule.points[q];
      const double x = bc[0] * p0[0] + bc[1] * p1[0] + bc[2] * p2[0];
      const double y = bc[0] * p0[1] + bc[1] * p1[1] + bc[2] * p2[1];
      total += rule.weights[q] * g.det * accumulate(x, y);
    }
  }
  return total;
}

} // namespace

double error_norm(const FEField& u, const ScalarFn& exact, const VectorFn& exact_grad,
                  NormKind norm) {
  const Mesh& mesh = *u.space->mesh;
  if (norm == NormKind::Hcurl) throw Error("error_norm: Hcurl needs an edge-element field");
  double sq = 0.0;
  if (norm == NormKind::L2) {
    sq = cell_quadrature_sum(mesh, [&](double x, double y) {
      const double d = eval_scalar_at(u, x, y) - exact(x, y);
      return d * d;
    });
  } else {
    if (!exact_grad) throw Error("error_norm: H1_semi needs the exact gradient");
    sq = cell_quadrature_sum(mesh, [&](double x, double y) {
      const auto gh = eval_scalar_grad_at(u, x, y);
      const auto ge = exact_grad(x, y);
      const double dx = gh[0] - ge[0], dy = gh[1] - ge[1];
      return dx * dx + dy * dy;
    });
  }
  return std::sqrt(sq);
}

double error_norm(const FEField& u, const VectorFn& exact, const JacobianFn& exact_jac,
                  NormKind norm) {
  const Mesh& mesh = *u.space->mesh;
  if (norm == NormKind::Hcurl) throw Error("error_norm: Hcurl needs an edge-element field");
  double sq = 0.0;
  if (norm == NormKind::L2) {
    sq = cell_quadrature_sum(mesh, [&](double x, double y) {
      const auto vh = eval_vector_at(u, x, y);
      const auto ve = exact(x, y);
      const double d0 = vh[0] - ve[0], d1 = vh[1] - ve[1];
      return d0 * d0 + d1 * d1;
    });
  } else {
    if (!exact_jac) throw Error("error_norm: H1_semi needs the exact Jacobian");
    sq = cell_quadrature_sum(mesh, [&](double x, double y) {
      const auto jh = eval_vector_jac_at(u, x, y);
      const auto je = exact_jac(x, y);
      double s = 0.0;
      for (int k = 0; k < 4; ++k) {
        const double d = jh[k] - je[k];
        s += d * d;
      }
      return s;
    });
  }
  return std::sqrt(sq);
}

double error_norm_hcurl(const FEField& u, const VectorFn& exact, const ScalarFn& exact_curl,
                        NormKind norm) {
  if (u.space->kind != ElementKind::Nedelec0)
    throw Error("error_norm_hcurl: field is not an edge-element field");
  const Mesh& mesh = *u.space->mesh;
  double sq = cell_quadrature_sum(mesh, [&](double x, double y) {
    const auto vh = eval_hcurl_at(u, x, y);
    const auto ve = exact(x, y);
    const double d0 = vh[0] - ve[0], d1 = vh[1] - ve[1];
    return d0 * d0 + d1 * d1;
  });
  if (norm == NormKind::Hcurl) {
    if (!exact_curl) throw Error("error_norm_hcurl: needs the exact scalar curl");
    sq += cell_quadrature_sum(mesh, [&](double x, double y) {
      const double d = eval_curl_at(u, x, y) - exact_curl(x, y);
      return d * d;
    });
  } else if (norm != NormKind::L2) {
    throw Error("error_norm_hcurl: unsupported norm for edge elements");
  }
  return std::sqrt(sq);
}

} // namespace chmhd
