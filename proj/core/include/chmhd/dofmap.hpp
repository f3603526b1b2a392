#pragma once

#include "chmhd/element.hpp"
#include "chmhd/mesh.hpp"

#include <cstdint>
#include <vector>

namespace chmhd {

enum class DofConstraint : std::int8_t { free = 0, dirichlet = 1, periodic_slave = 2 };

// Which boundary sides constrain which components. For Nedelec0 any nonzero
// mask on a side pins the tangential trace there (one DOF per boundary edge).
struct BoundarySpec {
  std::array<std::uint8_t, 4> component_mask{{0, 0, 0, 0}};
  bool mean_zero = false;

  static BoundarySpec none() { return {}; }
  static BoundarySpec all_sides(std::uint8_t mask) {
    BoundarySpec s;
    s.component_mask = {mask, mask, mask, mask};
    return s;
  }
};

// Global numbering. Scalar blocks are laid out component-major:
// [comp 0 | comp 1], and within a component vertices come first, then the
// cell bubbles (Mini) or edge midpoints (P2).
struct DofMap {
  const Mesh* mesh = nullptr;
  ElementKind kind = ElementKind::Lagrange1;
  int components = 1;
  int scalar_dofs = 0; // per component
  int n_dofs = 0;
  int dofs_per_cell = 0;

  std::vector<int> cell_dofs; // n_cells * dofs_per_cell, component-major

  std::vector<DofConstraint> constraint;
  std::vector<int> master;          // for periodic slaves
  std::vector<std::int8_t> slave_sign;
  bool mean_zero = false;

  const int* cell(int c) const { return cell_dofs.data() + static_cast<size_t>(c) * dofs_per_cell; }
  int n_constrained() const;
};

DofMap build_dof_map(const Mesh& mesh, ElementKind kind, int components,
                     const BoundarySpec& bc = BoundarySpec::none(),
                     const PeriodicMap* periodic = nullptr);

} // namespace chmhd
