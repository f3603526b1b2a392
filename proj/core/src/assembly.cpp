#include "chmhd/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <vector>

#include "chmhd/error.hpp"
#include "chmhd/parallel.hpp"
#include "chmhd/quadrature.hpp"

namespace chmhd {

namespace {

// Reference-basis values tabulated at the rule points once per assembly call;
// only the geometry factors vary from cell to cell.
struct ScalarTable {
  int nq = 0;
  int nb = 0;
  std::vector<std::array<double, 6>> val;
  std::vector<std::array<std::array<double, 2>, 6>> grad;
};

ScalarTable tabulate_scalar(ElementKind kind, const QuadratureRule& rule) {
  ScalarTable t;
  t.nq = rule.size();
  t.nb = basis_count(kind);
  t.val.resize(t.nq);
  t.grad.resize(t.nq);
  for (int q = 0; q < t.nq; ++q) {
    const BasisEval b = reference_basis(kind, rule.points[q]);
    t.val[q] = b.values;
    t.grad[q] = b.grads;
  }
  return t;
}

struct EdgeTable {
  int nq = 0;
  std::vector<std::array<std::array<double, 2>, 3>> vec;
};

EdgeTable tabulate_edge(const QuadratureRule& rule) {
  EdgeTable t;
  t.nq = rule.size();
  t.vec.resize(t.nq);
  for (int q = 0; q < t.nq; ++q) {
    t.vec[q] = reference_basis(ElementKind::Nedelec0, rule.points[q]).vec_values;
  }
  return t;
}

std::array<double, 2> apply(const std::array<std::array<double, 2>, 2>& m,
                            const std::array<double, 2>& v) {
  return {m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]};
}

std::array<double, 2> physical_point(const Mesh& mesh, int cell,
                                     const std::array<double, 3>& bc) {
  const auto& cv = mesh.cells[cell];
  double x = 0.0, y = 0.0;
  for (int a = 0; a < 3; ++a) {
    x += bc[a] * mesh.vertices[cv[a]][0];
    y += bc[a] * mesh.vertices[cv[a]][1];
  }
  return {x, y};
}

// Chunked cell loop collecting triplets; per-chunk buffers are concatenated in
// chunk order, so the emitted list is identical to the serial one.
template <class CellFn>
TripletList run_cell_assembly(int n_cells, int triplets_per_cell, const CellFn& fn) {
  std::vector<TripletList> bufs(static_cast<size_t>(n_chunks(n_cells)));
  parallel_chunks(n_cells, [&](int chunk, int begin, int end) {
    TripletList& out = bufs[chunk];
    out.reserve(static_cast<size_t>(end - begin) * triplets_per_cell);
    for (int c = begin; c < end; ++c) fn(c, out);
  });
  size_t total = 0;
  for (const auto& b : bufs) total += b.size();
  TripletList all;
  all.reserve(total);
  for (const auto& b : bufs) all.insert(all.end(), b.begin(), b.end());
  return all;
}

bool is_scalar_family(ElementKind kind) {
  return kind != ElementKind::Nedelec0;
}

void require_same_mesh(const DofMap& a, const FEField* f, const char* where) {
  if (f == nullptr) return;
  if (f->space == nullptr || f->space->mesh != a.mesh) {
    throw Error(std::string(where) + ": lagged field lives on a different mesh");
  }
  if (f->space->kind != ElementKind::Lagrange1 || f->space->components != 1) {
    throw Error(std::string(where) + ": lagged phase field must be scalar P1");
  }
}

// P1 value of a lagged coefficient field at a rule point of one cell.
double p1_value(const FEField& f, const std::array<int, 3>& verts,
                const std::array<double, 3>& bc) {
  return bc[0] * f.coeffs[verts[0]] + bc[1] * f.coeffs[verts[1]] + bc[2] * f.coeffs[verts[2]];
}

} // namespace

double CoefficientModel::operator()(double phi) const {
  const double v = 0.5 * (v2 - v1) * phi + 0.5 * (v2 + v1);
  const double lo = std::min(v1, v2) / 10.0;
  return std::max(v, lo);
}

void CoefficientModel::validate(const char* name) const {
  if (!(v1 > 0.0) || !(v2 > 0.0) || !std::isfinite(v1) || !std::isfinite(v2)) {
    throw ConfigError(std::string("coefficient model '") + name +
                      "' needs positive endpoint values");
  }
}

void Params::validate() const {
  if (!(gamma > 0.0)) throw ConfigError("params: gamma must be positive");
  if (!(lambda > 0.0)) throw ConfigError("params: lambda must be positive");
  if (!(mu > 0.0)) throw ConfigError("params: mu must be positive");
  if (!(dt > 0.0)) throw ConfigError("params: dt must be positive");
  mobility.validate("mobility");
  viscosity.validate("viscosity");
  conductivity.validate("conductivity");
}

SparseMatrix assemble_mass(const DofMap& space) {
  const Mesh& mesh = *space.mesh;
  const QuadratureRule& rule = quadrature_rule(kAssemblyDegree);
  const int nq = rule.size();

  if (is_scalar_family(space.kind)) {
    const ScalarTable tab = tabulate_scalar(space.kind, rule);
    const int nb = tab.nb;
    const int per_cell = space.components * nb * nb;
    TripletList tr = run_cell_assembly(mesh.n_cells(), per_cell, [&](int c, TripletList& out) {
      const CellGeometry g = cell_geometry(mesh, c);
      double loc[6][6] = {};
      for (int q = 0; q < nq; ++q) {
        const double wq = rule.weights[q] * g.det;
        for (int i = 0; i < nb; ++i) {
          const double wi = wq * tab.val[q][i];
          for (int j = 0; j < nb; ++j) loc[i][j] += wi * tab.val[q][j];
        }
      }
      const int* dofs = space.cell(c);
      for (int comp = 0; comp < space.components; ++comp) {
        const int* d = dofs + comp * nb;
        for (int i = 0; i < nb; ++i)
          for (int j = 0; j < nb; ++j) out.push_back({d[i], d[j], loc[i][j]});
      }
    });
    return triplets_to_csr(tr, space.n_dofs, space.n_dofs);
  }

  const EdgeTable tab = tabulate_edge(rule);
  TripletList tr = run_cell_assembly(mesh.n_cells(), 9, [&](int c, TripletList& out) {
    const CellGeometry g = cell_geometry(mesh, c);
    const auto& signs = mesh.cell_edge_signs[c];
    double loc[3][3] = {};
    std::array<std::array<double, 2>, 3> w;
    for (int q = 0; q < nq; ++q) {
      for (int k = 0; k < 3; ++k) {
        w[k] = apply(g.inv_transpose, tab.vec[q][k]);
        w[k][0] *= signs[k];
        w[k][1] *= signs[k];
      }
      const double wq = rule.weights[q] * g.det;
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) loc[k][l] += wq * (w[k][0] * w[l][0] + w[k][1] * w[l][1]);
    }
    const int* dofs = space.cell(c);
    for (int k = 0; k < 3; ++k)
      for (int l = 0; l < 3; ++l) out.push_back({dofs[k], dofs[l], loc[k][l]});
  });
  return triplets_to_csr(tr, space.n_dofs, space.n_dofs);
}

SparseMatrix assemble_stiffness(const DofMap& space, const CoefficientModel& coefficient,
                                const FEField* phi_lag) {
  if (!is_scalar_family(space.kind)) {
    throw Error("assemble_stiffness: expected a nodal space");
  }
  if (phi_lag == nullptr && !coefficient.is_constant()) {
    throw Error("assemble_stiffness: phase-dependent coefficient needs a lagged phase field");
  }
  require_same_mesh(space, phi_lag, "assemble_stiffness");

  const Mesh& mesh = *space.mesh;
  const QuadratureRule& rule = quadrature_rule(kAssemblyDegree);
  const int nq = rule.size();
  const ScalarTable tab = tabulate_scalar(space.kind, rule);
  const int nb = tab.nb;
  const bool constant = coefficient.is_constant();

  const int per_cell = space.components * nb * nb;
  TripletList tr = run_cell_assembly(mesh.n_cells(), per_cell, [&](int c, TripletList& out) {
    const CellGeometry g = cell_geometry(mesh, c);
    const auto& verts = mesh.cells[c];
    double loc[6][6] = {};
    std::array<std::array<double, 2>, 6> gp;
    for (int q = 0; q < nq; ++q) {
      for (int i = 0; i < nb; ++i) gp[i] = apply(g.inv_transpose, tab.grad[q][i]);
      const double coef =
          constant ? coefficient.v1 : coefficient(p1_value(*phi_lag, verts, rule.points[q]));
      const double wq = rule.weights[q] * g.det * coef;
      for (int i = 0; i < nb; ++i)
        for (int j = 0; j < nb; ++j) loc[i][j] += wq * (gp[i][0] * gp[j][0] + gp[i][1] * gp[j][1]);
    }
    const int* dofs = space.cell(c);
    for (int comp = 0; comp < space.components; ++comp) {
      const int* d = dofs + comp * nb;
      for (int i = 0; i < nb; ++i)
        for (int j = 0; j < nb; ++j) out.push_back({d[i], d[j], loc[i][j]});
    }
  });
  return triplets_to_csr(tr, space.n_dofs, space.n_dofs);
}

SparseMatrix assemble_curl_curl(const DofMap& space, const CoefficientModel& coefficient,
                                const FEField* phi_lag) {
  if (space.kind != ElementKind::Nedelec0) {
    throw Error("assemble_curl_curl: expected the edge-element space");
  }
  if (phi_lag == nullptr && !coefficient.is_constant()) {
    throw Error("assemble_curl_curl: phase-dependent coefficient needs a lagged phase field");
  }
  require_same_mesh(space, phi_lag, "assemble_curl_curl");

  const Mesh& mesh = *space.mesh;
  const QuadratureRule& rule = quadrature_rule(kAssemblyDegree);
  const int nq = rule.size();
  const bool constant = coefficient.is_constant();

  TripletList tr = run_cell_assembly(mesh.n_cells(), 9, [&](int c, TripletList& out) {
    const CellGeometry g = cell_geometry(mesh, c);
    const auto& verts = mesh.cells[c];
    const auto& signs = mesh.cell_edge_signs[c];
    // curl of each basis function is constant on the cell; only the inverse
    // coefficient needs the quadrature loop.
    double inv_coef_int = 0.0;
    for (int q = 0; q < nq; ++q) {
      const double coef =
          constant ? coefficient.v1 : coefficient(p1_value(*phi_lag, verts, rule.points[q]));
      inv_coef_int += rule.weights[q] * g.det / coef;
    }
    std::array<double, 3> curl;
    for (int k = 0; k < 3; ++k) curl[k] = signs[k] * 2.0 / g.det;
    const int* dofs = space.cell(c);
    for (int k = 0; k < 3; ++k)
      for (int l = 0; l < 3; ++l) out.push_back({dofs[k], dofs[l], inv_coef_int * curl[k] * curl[l]});
  });
  return triplets_to_csr(tr, space.n_dofs, space.n_dofs);
}

SparseMatrix assemble_convection(const DofMap& velocity_space, const FEField& u_lag) {
  if (velocity_space.kind != ElementKind::Mini || velocity_space.components != 2) {
    throw Error("assemble_convection: expected the two-component MINI space");
  }
  if (u_lag.space != &velocity_space) {
    throw Error("assemble_convection: lagged velocity must live in the target space");
  }

  const Mesh& mesh = *velocity_space.mesh;
  const QuadratureRule& rule = quadrature_rule(kAssemblyDegree);
  const int nq = rule.size();
  const ScalarTable tab = tabulate_scalar(ElementKind::Mini, rule);
  const int nb = tab.nb;

  TripletList tr = run_cell_assembly(mesh.n_cells(), 2 * nb * nb, [&](int c, TripletList& out) {
    const CellGeometry g = cell_geometry(mesh, c);
    const int* dofs = velocity_space.cell(c);
    double adv[4][4] = {}; // ((w.grad) N_j, N_i) on the scalar factor space
    std::array<std::array<double, 2>, 6> gp;
    for (int q = 0; q < nq; ++q) {
      for (int j = 0; j < nb; ++j) gp[j] = apply(g.inv_transpose, tab.grad[q][j]);
      double w0 = 0.0, w1 = 0.0;
      for (int j = 0; j < nb; ++j) {
        w0 += u_lag.coeffs[dofs[j]] * tab.val[q][j];
        w1 += u_lag.coeffs[dofs[nb + j]] * tab.val[q][j];
      }
      const double wq = rule.weights[q] * g.det;
      for (int i = 0; i < nb; ++i) {
        const double wi = wq * tab.val[q][i];
        for (int j = 0; j < nb; ++j) adv[i][j] += wi * (w0 * gp[j][0] + w1 * gp[j][1]);
      }
    }
    // Skew part; adv[j][i] - adv[i][j] is the exact negation of its mirror,
    // so the assembled operator annihilates x^T C x up to rounding.
    for (int comp = 0; comp < 2; ++comp) {
      const int* d = dofs + comp * nb;
      for (int i = 0; i < nb; ++i)
        for (int j = 0; j < nb; ++j) out.push_back({d[i], d[j], 0.5 * (adv[i][j] - adv[j][i])});
    }
  });
  return triplets_to_csr(tr, velocity_space.n_dofs, velocity_space.n_dofs);
}

std::pair<TripletList, TripletList> assemble_phase_velocity_coupling(
    const DofMap& scalar_space, const DofMap& velocity_space, const FEField& phi_lag) {
  if (scalar_space.mesh != velocity_space.mesh) {
    throw Error("assemble_phase_velocity_coupling: spaces live on different meshes");
  }
  require_same_mesh(scalar_space, &phi_lag, "assemble_phase_velocity_coupling");

  const Mesh& mesh = *scalar_space.mesh;
  const QuadratureRule& rule = quadrature_rule(kAssemblyDegree);
  const int nq = rule.size();
  const ScalarTable stab = tabulate_scalar(scalar_space.kind, rule);
  const ScalarTable vtab = tabulate_scalar(velocity_space.kind, rule);
  const int ns = stab.nb;
  const int nv = vtab.nb;

  TripletList first, second;
  const size_t cap = static_cast<size_t>(mesh.n_cells()) * ns * nv * 2;
  first.reserve(cap);
  second.reserve(cap);
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const CellGeometry g = cell_geometry(mesh, c);
    const auto& verts = mesh.cells[c];
    // P1 gradient of the lagged phase is constant per cell.
    const BasisEval p1 = reference_basis(ElementKind::Lagrange1, {1.0, 0.0, 0.0});
    std::array<double, 2> gphi = {0.0, 0.0};
    for (int a = 0; a < 3; ++a) {
      const auto ga = apply(g.inv_transpose, p1.grads[a]);
      gphi[0] += phi_lag.coeffs[verts[a]] * ga[0];
      gphi[1] += phi_lag.coeffs[verts[a]] * ga[1];
    }
    double mix[3][4] = {}; // (N^v_j, chi_i)
    for (int q = 0; q < nq; ++q) {
      const double wq = rule.weights[q] * g.det;
      for (int i = 0; i < ns; ++i) {
        const double wi = wq * stab.val[q][i];
        for (int j = 0; j < nv; ++j) mix[i][j] += wi * vtab.val[q][j];
      }
    }
    const int* sd = scalar_space.cell(c);
    const int* vd = velocity_space.cell(c);
    for (int comp = 0; comp < 2; ++comp) {
      for (int i = 0; i < ns; ++i) {
        for (int j = 0; j < nv; ++j) {
          const double v = gphi[comp] * mix[i][j];
          const int col = vd[comp * nv + j];
          first.push_back({sd[i], col, v});
          second.push_back({col, sd[i], -v});
        }
      }
    }
  }
  return {std::move(first), std::move(second)};
}

std::pair<TripletList, TripletList> assemble_lorentz_coupling(const DofMap& velocity_space,
                                                              const DofMap& induction_space,
                                                              const FEField& B_lag) {
  if (velocity_space.mesh != induction_space.mesh) {
    throw Error("assemble_lorentz_coupling: spaces live on different meshes");
  }
  if (B_lag.space != &induction_space) {
    throw Error("assemble_lorentz_coupling: lagged induction must live in the edge space");
  }

  const Mesh& mesh = *velocity_space.mesh;
  const QuadratureRule& rule = quadrature_rule(kAssemblyDegree);
  const int nq = rule.size();
  const ScalarTable vtab = tabulate_scalar(velocity_space.kind, rule);
  const EdgeTable etab = tabulate_edge(rule);
  const int nv = vtab.nb;

  TripletList first, second;
  const size_t cap = static_cast<size_t>(mesh.n_cells()) * 2 * nv * 3;
  first.reserve(cap);
  second.reserve(cap);
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const CellGeometry g = cell_geometry(mesh, c);
    const auto& signs = mesh.cell_edge_signs[c];
    const int* vd = velocity_space.cell(c);
    const int* ed = induction_space.cell(c);
    // (N_i B1_lag) and (N_i B2_lag) integrals; the edge curls are constant.
    double s1[4] = {}, s2[4] = {};
    for (int q = 0; q < nq; ++q) {
      double b0 = 0.0, b1 = 0.0;
      for (int k = 0; k < 3; ++k) {
        const auto wk = apply(g.inv_transpose, etab.vec[q][k]);
        const double ck = signs[k] * B_lag.coeffs[ed[k]];
        b0 += ck * wk[0];
        b1 += ck * wk[1];
      }
      const double wq = rule.weights[q] * g.det;
      for (int i = 0; i < nv; ++i) {
        s1[i] += wq * vtab.val[q][i] * b0;
        s2[i] += wq * vtab.val[q][i] * b1;
      }
    }
    for (int k = 0; k < 3; ++k) {
      const double curl_k = signs[k] * 2.0 / g.det;
      for (int i = 0; i < nv; ++i) {
        // Psi x B_lag with Psi = N_i e_c: component 0 gives N_i B2, component
        // 1 gives -N_i B1.
        const double v0 = curl_k * s2[i];
        const double v1 = -(curl_k * s1[i]);
        first.push_back({vd[i], ed[k], v0});
        second.push_back({ed[k], vd[i], v0});
        first.push_back({vd[nv + i], ed[k], v1});
        second.push_back({ed[k], vd[nv + i], v1});
      }
    }
  }
  return {std::move(first), std::move(second)};
}

SparseMatrix assemble_divergence(const DofMap& velocity_space, const DofMap& pressure_space) {
  if (velocity_space.mesh != pressure_space.mesh) {
    throw Error("assemble_divergence: spaces live on different meshes");
  }
  const Mesh& mesh = *velocity_space.mesh;
  const QuadratureRule& rule = quadrature_rule(kAssemblyDegree);
  const int nq = rule.size();
  const ScalarTable ptab = tabulate_scalar(pressure_space.kind, rule);
  const ScalarTable vtab = tabulate_scalar(velocity_space.kind, rule);
  const int np = ptab.nb;
  const int nv = vtab.nb;

  TripletList tr = run_cell_assembly(mesh.n_cells(), np * nv * 2, [&](int c, TripletList& out) {
    const CellGeometry g = cell_geometry(mesh, c);
    double loc[3][4][2] = {}; // [pressure i][velocity j][component]
    std::array<std::array<double, 2>, 6> gp;
    for (int q = 0; q < nq; ++q) {
      for (int j = 0; j < nv; ++j) gp[j] = apply(g.inv_transpose, vtab.grad[q][j]);
      const double wq = rule.weights[q] * g.det;
      for (int i = 0; i < np; ++i) {
        const double wi = wq * ptab.val[q][i];
        for (int j = 0; j < nv; ++j) {
          loc[i][j][0] += wi * gp[j][0];
          loc[i][j][1] += wi * gp[j][1];
        }
      }
    }
    const int* pd = pressure_space.cell(c);
    const int* vd = velocity_space.cell(c);
    for (int i = 0; i < np; ++i)
      for (int comp = 0; comp < 2; ++comp)
        for (int j = 0; j < nv; ++j) out.push_back({pd[i], vd[comp * nv + j], loc[i][j][comp]});
  });
  return triplets_to_csr(tr, pressure_space.n_dofs, velocity_space.n_dofs);
}

Vector assemble_area_vector(const DofMap& space) {
  if (!is_scalar_family(space.kind) || space.components != 1) {
    throw Error("assemble_area_vector: expected a scalar nodal space");
  }
  const Mesh& mesh = *space.mesh;
  const QuadratureRule& rule = quadrature_rule(kAssemblyDegree);
  const ScalarTable tab = tabulate_scalar(space.kind, rule);
  Vector out(static_cast<size_t>(space.n_dofs), 0.0);
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const CellGeometry g = cell_geometry(mesh, c);
    const int* dofs = space.cell(c);
    for (int q = 0; q < tab.nq; ++q) {
      const double wq = rule.weights[q] * g.det;
      for (int i = 0; i < tab.nb; ++i) out[dofs[i]] += wq * tab.val[q][i];
    }
  }
  return out;
}

Vector assemble_load(const DofMap& space, const ScalarFn& f) {
  if (!is_scalar_family(space.kind) || space.components != 1) {
    throw Error("assemble_load: scalar forcing needs a scalar nodal space");
  }
  const Mesh& mesh = *space.mesh;
  const QuadratureRule& rule = quadrature_rule(kAssemblyDegree);
  const ScalarTable tab = tabulate_scalar(space.kind, rule);
  Vector out(static_cast<size_t>(space.n_dofs), 0.0);
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const CellGeometry g = cell_geometry(mesh, c);
    const int* dofs = space.cell(c);
    for (int q = 0; q < tab.nq; ++q) {
      const auto x = physical_point(mesh, c, rule.points[q]);
      const double wq = rule.weights[q] * g.det * f(x[0], x[1]);
      for (int i = 0; i < tab.nb; ++i) out[dofs[i]] += wq * tab.val[q][i];
    }
  }
  return out;
}

Vector assemble_load(const DofMap& space, const VectorFn& f) {
  const Mesh& mesh = *space.mesh;
  const QuadratureRule& rule = quadrature_rule(kAssemblyDegree);
  Vector out(static_cast<size_t>(space.n_dofs), 0.0);

  if (space.kind == ElementKind::Nedelec0) {
    const EdgeTable tab = tabulate_edge(rule);
    for (int c = 0; c < mesh.n_cells(); ++c) {
      const CellGeometry g = cell_geometry(mesh, c);
      const auto& signs = mesh.cell_edge_signs[c];
      const int* dofs = space.cell(c);
      for (int q = 0; q < rule.size(); ++q) {
        const auto x = physical_point(mesh, c, rule.points[q]);
        const auto fx = f(x[0], x[1]);
        const double wq = rule.weights[q] * g.det;
        for (int k = 0; k < 3; ++k) {
          const auto wk = apply(g.inv_transpose, tab.vec[q][k]);
          out[dofs[k]] += wq * signs[k] * (fx[0] * wk[0] + fx[1] * wk[1]);
        }
      }
    }
    return out;
  }

  if (space.components != 2) {
    throw Error("assemble_load: vector forcing needs a two-component space");
  }
  const ScalarTable tab = tabulate_scalar(space.kind, rule);
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const CellGeometry g = cell_geometry(mesh, c);
    const int* dofs = space.cell(c);
    for (int q = 0; q < tab.nq; ++q) {
      const auto x = physical_point(mesh, c, rule.points[q]);
      const auto fx = f(x[0], x[1]);
      const double wq = rule.weights[q] * g.det;
      for (int i = 0; i < tab.nb; ++i) {
        out[dofs[i]] += wq * fx[0] * tab.val[q][i];
        out[dofs[tab.nb + i]] += wq * fx[1] * tab.val[q][i];
      }
    }
  }
  return out;
}

CubicTerm assemble_cubic(const DofMap& space, const Vector& phi_new, const Vector& phi_old,
                         double gamma) {
  if (space.kind != ElementKind::Lagrange1 || space.components != 1) {
    throw Error("assemble_cubic: expected the scalar P1 phase space");
  }
  if (static_cast<int>(phi_new.size()) != space.n_dofs ||
      static_cast<int>(phi_old.size()) != space.n_dofs) {
    throw Error("assemble_cubic: coefficient vector size mismatch");
  }
  const Mesh& mesh = *space.mesh;
  const QuadratureRule& rule = quadrature_rule(kAssemblyDegree);
  const int nq = rule.size();
  const double inv_gamma = 1.0 / gamma;

  CubicTerm term;
  term.residual.assign(static_cast<size_t>(space.n_dofs), 0.0);
  term.jacobian.reserve(static_cast<size_t>(mesh.n_cells()) * 9);
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const CellGeometry g = cell_geometry(mesh, c);
    const auto& verts = mesh.cells[c];
    const int* dofs = space.cell(c);
    double jac[3][3] = {};
    for (int q = 0; q < nq; ++q) {
      const auto& bc = rule.points[q];
      double pn = 0.0, po = 0.0;
      for (int a = 0; a < 3; ++a) {
        pn += bc[a] * phi_new[verts[a]];
        po += bc[a] * phi_old[verts[a]];
      }
      const double wq = rule.weights[q] * g.det * inv_gamma;
      const double res_q = wq * (pn * pn * pn - po);
      const double jac_q = wq * 3.0 * pn * pn;
      for (int i = 0; i < 3; ++i) {
        term.residual[dofs[i]] += res_q * bc[i];
        const double wi = jac_q * bc[i];
        for (int j = 0; j < 3; ++j) jac[i][j] += wi * bc[j];
      }
    }
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) term.jacobian.push_back({dofs[i], dofs[j], jac[i][j]});
  }
  return term;
}

// --- monolithic system ------------------------------------------------------

TripletList& BlockSystem::block(Field row, Field col) {
  return blocks[{static_cast<int>(row), static_cast<int>(col)}];
}

const TripletList* BlockSystem::find(Field row, Field col) const {
  auto it = blocks.find({static_cast<int>(row), static_cast<int>(col)});
  return it == blocks.end() ? nullptr : &it->second;
}

namespace {

void append_csr(TripletList& dst, const SparseMatrix& m, double scale) {
  for (int r = 0; r < m.n_rows; ++r) {
    for (int k = m.row_ptr[r]; k < m.row_ptr[r + 1]; ++k) {
      dst.push_back({r, m.col_idx[k], scale * m.values[k]});
    }
  }
}

void append_scaled(TripletList& dst, const TripletList& src, double scale) {
  dst.reserve(dst.size() + src.size());
  for (const auto& t : src) dst.push_back({t.row, t.col, scale * t.value});
}

void add_scaled_vec(Vector& dst, const Vector& src, double scale) {
  for (size_t i = 0; i < dst.size(); ++i) dst[i] += scale * src[i];
}

} // namespace

BlockSystem build_monolithic(const Spaces& spaces, const Params& params, const FEField& phi_k,
                             const FEField& u_k, const FEField& B_k,
                             const ForcingSet* forcing) {
  params.validate();
  const double inv_dt = 1.0 / params.dt;
  const double inv_mu = 1.0 / params.mu;

  BlockSystem sys;
  sys.layout = spaces.layout();
  for (int f = 0; f < kNumFields; ++f) {
    sys.rhs[f].assign(static_cast<size_t>(sys.layout.size[f]), 0.0);
  }

  // Phase transport row.
  const SparseMatrix M_phi = assemble_mass(spaces.phase);
  append_csr(sys.block(Field::phase, Field::phase), M_phi, inv_dt);
  auto coupling = assemble_phase_velocity_coupling(spaces.phase, spaces.velocity, phi_k);
  append_scaled(sys.block(Field::phase, Field::velocity), coupling.first, 1.0);
  const SparseMatrix K_mob = assemble_stiffness(spaces.phase, params.mobility, &phi_k);
  append_csr(sys.block(Field::phase, Field::chemical_potential), K_mob, params.gamma);
  sys.rhs[static_cast<int>(Field::phase)] = matvec(M_phi, phi_k.coeffs);
  for (auto& v : sys.rhs[static_cast<int>(Field::phase)]) v *= inv_dt;

  // Chemical potential row; the cubic double-well part is added by the Newton
  // iteration, everything else is linear.
  const SparseMatrix K_unit = assemble_stiffness(spaces.phase, CoefficientModel::constant(1.0),
                                                 nullptr);
  append_csr(sys.block(Field::chemical_potential, Field::phase), K_unit, params.gamma);
  append_csr(sys.block(Field::chemical_potential, Field::chemical_potential), M_phi, -1.0);

  // Momentum row.
  const SparseMatrix M_u = assemble_mass(spaces.velocity);
  TripletList& uu = sys.block(Field::velocity, Field::velocity);
  append_csr(uu, M_u, inv_dt);
  append_csr(uu, assemble_convection(spaces.velocity, u_k), 1.0);
  append_csr(uu, assemble_stiffness(spaces.velocity, params.viscosity, &phi_k), 1.0);
  append_scaled(sys.block(Field::velocity, Field::chemical_potential), coupling.second,
                params.lambda);
  const SparseMatrix D = assemble_divergence(spaces.velocity, spaces.pressure);
  append_csr(sys.block(Field::pressure, Field::velocity), D, 1.0);
  {
    TripletList& up = sys.block(Field::velocity, Field::pressure);
    up.reserve(D.nnz());
    for (int r = 0; r < D.n_rows; ++r) {
      for (int k = D.row_ptr[r]; k < D.row_ptr[r + 1]; ++k) {
        up.push_back({D.col_idx[k], r, -D.values[k]});
      }
    }
  }
  auto lorentz = assemble_lorentz_coupling(spaces.velocity, spaces.induction, B_k);
  append_scaled(sys.block(Field::velocity, Field::induction), lorentz.first, inv_mu);
  sys.rhs[static_cast<int>(Field::velocity)] = matvec(M_u, u_k.coeffs);
  for (auto& v : sys.rhs[static_cast<int>(Field::velocity)]) v *= inv_dt;

  // Induction row, scaled by 1/mu so the coupling with the momentum row stays
  // a bitwise transpose pair.
  const SparseMatrix M_B = assemble_mass(spaces.induction);
  TripletList& bb = sys.block(Field::induction, Field::induction);
  append_csr(bb, M_B, inv_mu * inv_dt);
  append_csr(bb, assemble_curl_curl(spaces.induction, params.conductivity, &phi_k),
             inv_mu * inv_mu);
  append_scaled(sys.block(Field::induction, Field::velocity), lorentz.second, -inv_mu);
  sys.rhs[static_cast<int>(Field::induction)] = matvec(M_B, B_k.coeffs);
  for (auto& v : sys.rhs[static_cast<int>(Field::induction)]) v *= inv_mu * inv_dt;

  // Zero-mean pressure gauge.
  if (spaces.pressure.mean_zero) {
    const Vector area = assemble_area_vector(spaces.pressure);
    TripletList& ps = sys.block(Field::pressure, Field::multiplier);
    TripletList& sp = sys.block(Field::multiplier, Field::pressure);
    for (int i = 0; i < static_cast<int>(area.size()); ++i) {
      ps.push_back({i, 0, area[i]});
      sp.push_back({0, i, area[i]});
    }
  } else {
    sys.block(Field::multiplier, Field::multiplier).push_back({0, 0, 1.0});
  }

  if (forcing != nullptr) {
    if (forcing->phase) {
      add_scaled_vec(sys.rhs[static_cast<int>(Field::phase)],
                     assemble_load(spaces.phase, forcing->phase), 1.0);
    }
    if (forcing->velocity) {
      add_scaled_vec(sys.rhs[static_cast<int>(Field::velocity)],
                     assemble_load(spaces.velocity, forcing->velocity), 1.0);
    }
    if (forcing->induction) {
      add_scaled_vec(sys.rhs[static_cast<int>(Field::induction)],
                     assemble_load(spaces.induction, forcing->induction), inv_mu);
    }
  }
  return sys;
}

TripletList flatten(const BlockSystem& system) {
  size_t total = 0;
  for (const auto& [key, tr] : system.blocks) total += tr.size();
  TripletList out;
  out.reserve(total);
  for (const auto& [key, tr] : system.blocks) {
    const int ro = system.layout.offset[key.first];
    const int co = system.layout.offset[key.second];
    for (const auto& t : tr) out.push_back({t.row + ro, t.col + co, t.value});
  }
  return out;
}

Vector flatten_rhs(const BlockSystem& system) {
  Vector out(static_cast<size_t>(system.layout.total), 0.0);
  for (int f = 0; f < kNumFields; ++f) {
    const int off = system.layout.offset[f];
    const Vector& r = system.rhs[f];
    for (size_t i = 0; i < r.size(); ++i) out[off + static_cast<int>(i)] = r[i];
  }
  return out;
}

} // namespace chmhd
