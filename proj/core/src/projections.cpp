#include "chmhd/projections.hpp"

#include <cmath>

#include "chmhd/assembly.hpp"
#include "chmhd/error.hpp"
#include "chmhd/quadrature.hpp"

namespace chmhd {

namespace {

constexpr int kTargetQuadDegree = 8;

std::array<double, 2> apply(const std::array<std::array<double, 2>, 2>& m,
                            const std::array<double, 2>& v) {
  return {m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]};
}

std::array<double, 2> physical_point(const Mesh& mesh, int cell,
                                     const std::array<double, 3>& bc) {
  const auto& cv = mesh.cells[cell];
  return {bc[0] * mesh.vertices[cv[0]][0] + bc[1] * mesh.vertices[cv[1]][0] +
              bc[2] * mesh.vertices[cv[2]][0],
          bc[0] * mesh.vertices[cv[0]][1] + bc[1] * mesh.vertices[cv[1]][1] +
              bc[2] * mesh.vertices[cv[2]][1]};
}

// Reduction over one space: folds periodic slaves, eliminates dirichlet
// entries against supplied values. The monolithic ConstraintSet does the same
// job for the coupled system; this local variant keeps the projections free
// of the five-field layout.
struct SpaceReducer {
  const DofMap* space;
  std::vector<int> reduced; // -1 when constrained
  Vector values;            // dirichlet data
  int n_reduced = 0;

  explicit SpaceReducer(const DofMap& s) : space(&s), values(s.n_dofs, 0.0) {
    reduced.assign(s.n_dofs, -1);
    for (int i = 0; i < s.n_dofs; ++i) {
      if (s.constraint[i] == DofConstraint::free) reduced[i] = n_reduced++;
    }
  }

  void reduce(const TripletList& full, TripletList& out, Vector& lift) const {
    out.clear();
    out.reserve(full.size());
    lift.assign(static_cast<size_t>(n_reduced), 0.0);
    for (const auto& t : full) {
      int r = t.row;
      int c = t.col;
      double v = t.value;
      if (space->constraint[r] == DofConstraint::periodic_slave) {
        v *= space->slave_sign[r];
        r = space->master[r];
      }
      if (space->constraint[r] == DofConstraint::dirichlet) continue;
      if (space->constraint[c] == DofConstraint::periodic_slave) {
        v *= space->slave_sign[c];
        c = space->master[c];
      }
      if (space->constraint[c] == DofConstraint::dirichlet) {
        lift[reduced[r]] += v * values[c];
        continue;
      }
      out.push_back({reduced[r], reduced[c], v});
    }
  }

  Vector reduce_vec(const Vector& full) const {
    Vector out(static_cast<size_t>(n_reduced), 0.0);
    for (int i = 0; i < space->n_dofs; ++i) {
      switch (space->constraint[i]) {
        case DofConstraint::free: out[reduced[i]] += full[i]; break;
        case DofConstraint::periodic_slave:
          out[reduced[space->master[i]]] += space->slave_sign[i] * full[i];
          break;
        case DofConstraint::dirichlet: break;
      }
    }
    return out;
  }

  Vector expand(const Vector& red) const {
    Vector out(static_cast<size_t>(space->n_dofs), 0.0);
    for (int i = 0; i < space->n_dofs; ++i) {
      switch (space->constraint[i]) {
        case DofConstraint::free: out[i] = red[reduced[i]]; break;
        case DofConstraint::dirichlet: out[i] = values[i]; break;
        case DofConstraint::periodic_slave:
          out[i] = space->slave_sign[i] * red[reduced[space->master[i]]];
          break;
      }
    }
    return out;
  }
};

TripletList csr_triplets(const SparseMatrix& m) {
  TripletList out;
  out.reserve(m.nnz());
  for (int r = 0; r < m.n_rows; ++r)
    for (int k = m.row_ptr[r]; k < m.row_ptr[r + 1]; ++k)
      out.push_back({r, m.col_idx[k], m.values[k]});
  return out;
}

} // namespace

FEField ritz_project(const DofMap& space, const ScalarFn& f, const VectorFn& grad_f) {
  if (space.kind != ElementKind::Lagrange1 && space.kind != ElementKind::Lagrange2) {
    throw Error("ritz_project: expected a scalar Lagrange space");
  }
  if (!f || !grad_f) throw Error("ritz_project: target value and gradient required");

  const Mesh& mesh = *space.mesh;
  const QuadratureRule& rule = quadrature_rule(kTargetQuadDegree);

  const SparseMatrix K = assemble_stiffness(space, CoefficientModel::constant(1.0), nullptr);
  const Vector area = assemble_area_vector(space);

  // (grad f, grad psi_i) and the target mean.
  Vector b(static_cast<size_t>(space.n_dofs), 0.0);
  double mean = 0.0;
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const CellGeometry g = cell_geometry(mesh, c);
    const int* dofs = space.cell(c);
    const int nb = basis_count(space.kind);
    for (int q = 0; q < rule.size(); ++q) {
      const auto x = physical_point(mesh, c, rule.points[q]);
      const auto gf = grad_f(x[0], x[1]);
      const double wq = rule.weights[q] * g.det;
      mean += wq * f(x[0], x[1]);
      const BasisEval bas = reference_basis(space.kind, rule.points[q]);
      for (int i = 0; i < nb; ++i) {
        const auto gi = apply(g.inv_transpose, bas.grads[i]);
        b[dofs[i]] += wq * (gf[0] * gi[0] + gf[1] * gi[1]);
      }
    }
  }

  // Reduced saddle system [[K, m], [m^T, 0]] with the mean as gauge datum.
  SpaceReducer red(space);
  TripletList kt;
  Vector lift;
  red.reduce(csr_triplets(K), kt, lift);
  const Vector m_red = red.reduce_vec(area);
  const Vector b_red = red.reduce_vec(b);

  const int n = red.n_reduced;
  TripletList sys = kt;
  for (int i = 0; i < n; ++i) {
    sys.push_back({i, n, m_red[i]});
    sys.push_back({n, i, m_red[i]});
  }
  Vector rhs(static_cast<size_t>(n) + 1, 0.0);
  for (int i = 0; i < n; ++i) rhs[i] = b_red[i];
  rhs[n] = mean;

  const Vector sol = sparse_lu_solve(triplets_to_csr(sys, n + 1, n + 1), rhs);
  FEField out;
  out.space = &space;
  out.coeffs = red.expand(Vector(sol.begin(), sol.begin() + n));
  return out;
}

FEField l2_project(const DofMap& space, const VectorFn& f) {
  if (space.components != 2) throw Error("l2_project: expected a two-component space");
  if (!f) throw Error("l2_project: target required");

  const Mesh& mesh = *space.mesh;
  const QuadratureRule& rule = quadrature_rule(kTargetQuadDegree);
  const SparseMatrix M = assemble_mass(space);

  Vector b(static_cast<size_t>(space.n_dofs), 0.0);
  const int nb = basis_count(space.kind);
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const CellGeometry g = cell_geometry(mesh, c);
    const int* dofs = space.cell(c);
    for (int q = 0; q < rule.size(); ++q) {
      const auto x = physical_point(mesh, c, rule.points[q]);
      const auto fx = f(x[0], x[1]);
      const double wq = rule.weights[q] * g.det;
      const BasisEval bas = reference_basis(space.kind, rule.points[q]);
      for (int i = 0; i < nb; ++i) {
        b[dofs[i]] += wq * fx[0] * bas.values[i];
        b[dofs[nb + i]] += wq * fx[1] * bas.values[i];
      }
    }
  }

  SpaceReducer red(space);
  const FEField nodal = interpolate(space, f);
  red.values = nodal.coeffs;

  TripletList mt;
  Vector lift;
  red.reduce(csr_triplets(M), mt, lift);
  Vector b_red = red.reduce_vec(b);
  for (size_t i = 0; i < b_red.size(); ++i) b_red[i] -= lift[i];

  const Vector sol = sparse_lu_solve(triplets_to_csr(mt, red.n_reduced, red.n_reduced), b_red);
  FEField out;
  out.space = &space;
  out.coeffs = red.expand(sol);
  return out;
}

FEField maxwell_quasi_project(const DofMap& space, const VectorFn& f, const ScalarFn& curl_f,
                              const VectorFn& u0) {
  if (space.kind != ElementKind::Nedelec0) {
    throw Error("maxwell_quasi_project: expected the edge-element space");
  }
  if (!f || !curl_f || !u0) throw Error("maxwell_quasi_project: target, curl, and u0 required");
  for (int i = 0; i < space.n_dofs; ++i) {
    if (space.constraint[i] == DofConstraint::periodic_slave) {
      throw Error("maxwell_quasi_project: periodic spaces take interpolated initial data");
    }
  }

  const Mesh& mesh = *space.mesh;
  const QuadratureRule& rule = quadrature_rule(kTargetQuadDegree);

  TripletList sys;
  sys.reserve(static_cast<size_t>(mesh.n_cells()) * 9);
  Vector b(static_cast<size_t>(space.n_dofs), 0.0);

  for (int c = 0; c < mesh.n_cells(); ++c) {
    const CellGeometry g = cell_geometry(mesh, c);
    const auto& signs = mesh.cell_edge_signs[c];
    const int* dofs = space.cell(c);
    std::array<double, 3> curl;
    for (int k = 0; k < 3; ++k) curl[k] = signs[k] * 2.0 / g.det;

    double loc[3][3] = {};
    for (int q = 0; q < rule.size(); ++q) {
      const auto x = physical_point(mesh, c, rule.points[q]);
      const auto u = u0(x[0], x[1]);
      const auto fx = f(x[0], x[1]);
      const double weight7 = 7.0 * (u[0] * u[0] + u[1] * u[1] + 1.0);
      const double wq = rule.weights[q] * g.det;

      const BasisEval bas = reference_basis(ElementKind::Nedelec0, rule.points[q]);
      std::array<std::array<double, 2>, 3> w;
      for (int k = 0; k < 3; ++k) {
        w[k] = apply(g.inv_transpose, bas.vec_values[k]);
        w[k][0] *= signs[k];
        w[k][1] *= signs[k];
      }
      for (int k = 0; k < 3; ++k) {
        for (int l = 0; l < 3; ++l) {
          const double cross_ul = u[0] * w[l][1] - u[1] * w[l][0];
          loc[k][l] += wq * (curl[k] * curl[l] + curl[k] * cross_ul +
                             weight7 * (w[k][0] * w[l][0] + w[k][1] * w[l][1]));
        }
        const double cross_uf = u[0] * fx[1] - u[1] * fx[0];
        b[dofs[k]] += wq * (curl[k] * curl_f(x[0], x[1]) + curl[k] * cross_uf +
                            weight7 * (w[k][0] * fx[0] + w[k][1] * fx[1]));
      }
    }
    for (int k = 0; k < 3; ++k)
      for (int l = 0; l < 3; ++l) sys.push_back({dofs[k], dofs[l], loc[k][l]});
  }

  FEField out;
  out.space = &space;
  out.coeffs = sparse_lu_solve(triplets_to_csr(sys, space.n_dofs, space.n_dofs), b);
  return out;
}

} // namespace chmhd
