#include "chmhd/dofmap.hpp"

#include "chmhd/error.hpp"

#include <string>

namespace chmhd {

int DofMap::n_constrained() const {
  int k = 0;
  for (DofConstraint c : constraint)
    if (c != DofConstraint::free) ++k;
  return k;
}

namespace {

void mark_dirichlet(DofMap& map, const Mesh& mesh, const BoundarySpec& bc) {
  auto side_constrains = [&](int side, int comp) {
    return side >= 0 && (bc.component_mask[side] & (1u << comp)) != 0;
  };

  if (map.kind == ElementKind::Nedelec0) {
    for (int e : mesh.boundary_edges)
      if (side_constrains(mesh.edge_side[e], 0)) map.constraint[e] = DofConstraint::dirichlet;
    return;
  }
  if (map.kind == ElementKind::DG0) return; // interior by construction

  for (int comp = 0; comp < map.components; ++comp) {
    const int base = comp * map.scalar_dofs;
    for (int v = 0; v < mesh.n_vertices(); ++v) {
      const std::uint8_t m = mesh.vertex_side_mask[v];
      for (int s = 0; s < 4; ++s)
        if ((m & (1u << s)) && side_constrains(s, comp))
          map.constraint[base + v] = DofConstraint::dirichlet;
    }
    if (map.kind == ElementKind::Lagrange2) {
      for (int e : mesh.boundary_edges)
        if (side_constrains(mesh.edge_side[e], comp))
          map.constraint[base + mesh.n_vertices() + e] = DofConstraint::dirichlet;
    }
    // Mini bubbles are cell-interior and never constrained.
  }
}

void mark_periodic(DofMap& map, const Mesh& mesh, const PeriodicMap& periodic) {
  auto alias = [&](int slave, int master, std::int8_t sign) {
    if (map.constraint[slave] == DofConstraint::dirichlet) return; // data pins it already
    if (map.constraint[master] == DofConstraint::dirichlet) {
      // Slave inherits the pinned value through the identification.
      map.constraint[slave] = DofConstraint::dirichlet;
      return;
    }
    if (map.constraint[master] == DofConstraint::periodic_slave)
      throw Error("build_dof_map: chained periodic constraint");
    map.constraint[slave] = DofConstraint::periodic_slave;
    map.master[slave] = master;
    map.slave_sign[slave] = sign;
  };

  if (map.kind == ElementKind::Nedelec0) {
    for (size_t i = 0; i < periodic.edge_pairs.size(); ++i)
      alias(periodic.edge_pairs[i][0], periodic.edge_pairs[i][1], periodic.edge_signs[i]);
    return;
  }
  if (map.kind == ElementKind::DG0) return;

  for (int comp = 0; comp < map.components; ++comp) {
    const int base = comp * map.scalar_dofs;
    for (const auto& p : periodic.vertex_pairs) alias(base + p[0], base + p[1], 1);
    if (map.kind == ElementKind::Lagrange2) {
      const int off = base + mesh.n_vertices();
      for (const auto& p : periodic.edge_pairs) alias(off + p[0], off + p[1], 1);
    }
  }
}

} // namespace

DofMap build_dof_map(const Mesh& mesh, ElementKind kind, int components, const BoundarySpec& bc,
                     const PeriodicMap* periodic) {
  if (components < 1 || components > 2)
    throw Error("build_dof_map: components must be 1 or 2");
  if (kind == ElementKind::Nedelec0 && components != 1)
    throw Error("build_dof_map: Nedelec0 is intrinsically vector-valued; use components=1");

  DofMap map;
  map.mesh = &mesh;
  map.kind = kind;
  map.components = (kind == ElementKind::Nedelec0) ? 1 : components;

  switch (kind) {
    case ElementKind::Lagrange1: map.scalar_dofs = mesh.n_vertices(); break;
    case ElementKind::Lagrange2: map.scalar_dofs = mesh.n_vertices() + mesh.n_edges(); break;
    case ElementKind::Mini: map.scalar_dofs = mesh.n_vertices() + mesh.n_cells(); break;
    case ElementKind::Nedelec0: map.scalar_dofs = mesh.n_edges(); break;
    case ElementKind::DG0: map.scalar_dofs = mesh.n_cells(); break;
  }
  map.n_dofs = map.components * map.scalar_dofs;
  map.dofs_per_cell = map.components * basis_count(kind);

  map.cell_dofs.resize(static_cast<size_t>(mesh.n_cells()) * map.dofs_per_cell);
  for (int c = 0; c < mesh.n_cells(); ++c) {
    int* out = map.cell_dofs.data() + static_cast<size_t>(c) * map.dofs_per_cell;
    for (int comp = 0; comp < map.components; ++comp) {
      const int base = comp * map.scalar_dofs;
      switch (kind) {
        case ElementKind::Lagrange1:
          for (int k = 0; k < 3; ++k) *out++ = base + mesh.cells[c][k];
          break;
        case ElementKind::Lagrange2:
          for (int k = 0; k < 3; ++k) *out++ = base + mesh.cells[c][k];
          for (int k = 0; k < 3; ++k) *out++ = base + mesh.n_vertices() + mesh.cell_edges[c][k];
          break;
        case ElementKind::Mini:
          for (int k = 0; k < 3; ++k) *out++ = base + mesh.cells[c][k];
          *out++ = base + mesh.n_vertices() + c;
          break;
        case ElementKind::Nedelec0:
          for (int k = 0; k < 3; ++k) *out++ = mesh.cell_edges[c][k];
          break;
        case ElementKind::DG0:
          *out++ = base + c;
          break;
      }
    }
  }

  map.constraint.assign(map.n_dofs, DofConstraint::free);
  map.master.assign(map.n_dofs, -1);
  map.slave_sign.assign(map.n_dofs, 1);
  map.mean_zero = bc.mean_zero;

  mark_dirichlet(map, mesh, bc);
  if (periodic) mark_periodic(map, mesh, *periodic);
  return map;
}

} // namespace chmhd
