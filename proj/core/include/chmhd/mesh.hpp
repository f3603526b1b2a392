#pragma once

// Structured triangulations of the unit square. Cells are split along the
// same diagonal in every square (no union-jack alternation), vertices are
// numbered row-major, and edges carry a global low-to-high orientation that
// the edge-element degrees of freedom rely on.

#include <array>
#include <cstdint>
#include <vector>

namespace chmhd {

// Boundary side ids for [0,1]^2; interior entities carry side_none.
enum : int { side_x0 = 0, side_x1 = 1, side_y0 = 2, side_y1 = 3, side_none = -1 };

struct Mesh {
  int n = 0; // subdivisions per direction for generated meshes, 0 if hand-built

  std::vector<std::array<double, 2>> vertices;
  std::vector<std::array<int, 3>> cells; // CCW vertex triples

  // Edge table: vertex pairs with lo < hi, ordered lexicographically.
  std::vector<std::array<int, 2>> edges;
  // Per cell, the edge ids of local edges (0,1), (1,2), (2,0) and the sign
  // relating the local direction to the global lo->hi orientation.
  std::vector<std::array<int, 3>> cell_edges;
  std::vector<std::array<std::int8_t, 3>> cell_edge_signs;

  std::vector<int> boundary_edges;
  std::vector<std::int8_t> edge_side;         // side id per edge, side_none if interior
  std::vector<std::uint8_t> vertex_side_mask; // bit s set iff the vertex lies on side s

  int n_vertices() const { return static_cast<int>(vertices.size()); }
  int n_cells() const { return static_cast<int>(cells.size()); }
  int n_edges() const { return static_cast<int>(edges.size()); }
};

// Identification of the x=1 boundary with x=0 (same y). Edge pairs map the
// vertical boundary edges; orientation_sign relates the two lo->hi directions.
struct PeriodicMap {
  std::vector<std::array<int, 2>> vertex_pairs; // {slave on x=1, master on x=0}
  std::vector<std::array<int, 2>> edge_pairs;   // {slave edge, master edge}
  std::vector<std::int8_t> edge_signs;
};

// n x n squares, each cut from (i,j) to (i+1,j+1); 2n^2 congruent right
// triangles, mesh size sqrt(2)/n. Throws on n < 1.
Mesh build_unit_square_mesh(int n);

// Finalizes a hand-built vertex/cell list (edge table, boundary data).
// Side tags are assigned only to edges lying on the unit-square boundary.
Mesh make_mesh(std::vector<std::array<double, 2>> vertices,
               std::vector<std::array<int, 3>> cells);

PeriodicMap build_periodic_map(const Mesh& mesh);

struct CellGeometry {
  std::array<std::array<double, 2>, 2> jacobian;     // columns: v1-v0, v2-v0
  std::array<std::array<double, 2>, 2> inv_transpose;
  double det = 0.0; // = 2 * area, positive for CCW cells
  double area = 0.0;
};

CellGeometry cell_geometry(const Mesh& mesh, int cell);

// Returns {cell, barycentric} for a point of the closed unit square.
// O(1) on generated meshes, linear scan otherwise.
struct PointLocation {
  int cell = -1;
  std::array<double, 3> barycentric{};
};
PointLocation locate_point(const Mesh& mesh, double x, double y);

} // namespace chmhd
