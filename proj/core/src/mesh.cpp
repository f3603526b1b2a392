#include "chmhd/mesh.hpp"

#include "chmhd/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

namespace chmhd {

namespace {

constexpr double kSideTol = 1e-12;

void finalize_connectivity(Mesh& mesh) {
  const int n_cells = mesh.n_cells();

  std::vector<std::array<int, 2>> all;
  all.reserve(static_cast<size_t>(n_cells) * 3);
  for (const auto& c : mesh.cells) {
    for (int k = 0; k < 3; ++k) {
      int a = c[k], b = c[(k + 1) % 3];
      if (a == b) throw Error("mesh: degenerate cell with repeated vertex");
      all.push_back({std::min(a, b), std::max(a, b)});
    }
  }
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  mesh.edges = std::move(all);

  std::map<std::array<int, 2>, int> edge_of;
  for (int e = 0; e < mesh.n_edges(); ++e) edge_of[mesh.edges[e]] = e;

  mesh.cell_edges.assign(n_cells, {});
  mesh.cell_edge_signs.assign(n_cells, {});
  std::vector<int> edge_use(mesh.n_edges(), 0);
  for (int c = 0; c < n_cells; ++c) {
    for (int k = 0; k < 3; ++k) {
      const int a = mesh.cells[c][k], b = mesh.cells[c][(k + 1) % 3];
      const int e = edge_of.at({std::min(a, b), std::max(a, b)});
      mesh.cell_edges[c][k] = e;
      mesh.cell_edge_signs[c][k] = static_cast<std::int8_t>(a < b ? 1 : -1);
      edge_use[e]++;
    }
  }

  mesh.vertex_side_mask.assign(mesh.n_vertices(), 0);
  for (int v = 0; v < mesh.n_vertices(); ++v) {
    const auto [x, y] = mesh.vertices[v];
    std::uint8_t m = 0;
    if (std::abs(x) < kSideTol) m |= 1u << side_x0;
    if (std::abs(x - 1.0) < kSideTol) m |= 1u << side_x1;
    if (std::abs(y) < kSideTol) m |= 1u << side_y0;
    if (std::abs(y - 1.0) < kSideTol) m |= 1u << side_y1;
    mesh.vertex_side_mask[v] = m;
  }

  mesh.edge_side.assign(mesh.n_edges(), static_cast<std::int8_t>(side_none));
  mesh.boundary_edges.clear();
  for (int e = 0; e < mesh.n_edges(); ++e) {
    if (edge_use[e] > 2) throw Error("mesh: edge shared by more than two cells");
    if (edge_use[e] != 1) continue;
    mesh.boundary_edges.push_back(e);
    const std::uint8_t common =
        mesh.vertex_side_mask[mesh.edges[e][0]] & mesh.vertex_side_mask[mesh.edges[e][1]];
    for (int s = 0; s < 4; ++s) {
      if (common & (1u << s)) {
        mesh.edge_side[e] = static_cast<std::int8_t>(s);
        break;
      }
    }
  }
}

} // namespace

Mesh build_unit_square_mesh(int n) {
  if (n < 1) throw Error("build_unit_square_mesh: n must be >= 1, got " + std::to_string(n));

  Mesh mesh;
  mesh.n = n;
  mesh.vertices.reserve(static_cast<size_t>(n + 1) * (n + 1));
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i)
      mesh.vertices.push_back({static_cast<double>(i) / n, static_cast<double>(j) / n});

  auto vid = [n](int i, int j) { return j * (n + 1) + i; };
  mesh.cells.reserve(static_cast<size_t>(2) * n * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int v00 = vid(i, j), v10 = vid(i + 1, j);
      const int v11 = vid(i + 1, j + 1), v01 = vid(i, j + 1);
      mesh.cells.push_back({v00, v10, v11});
      mesh.cells.push_back({v00, v11, v01});
    }
  }

  finalize_connectivity(mesh);
  return mesh;
}

Mesh make_mesh(std::vector<std::array<double, 2>> vertices, std::vector<std::array<int, 3>> cells) {
  Mesh mesh;
  mesh.n = 0;
  mesh.vertices = std::move(vertices);
  mesh.cells = std::move(cells);
  for (const auto& c : mesh.cells)
    for (int v : c)
      if (v < 0 || v >= mesh.n_vertices()) throw Error("make_mesh: cell vertex out of range");
  finalize_connectivity(mesh);
  return mesh;
}

PeriodicMap build_periodic_map(const Mesh& mesh) {
  PeriodicMap map;

  std::vector<int> master_of(mesh.n_vertices(), -1);
  std::map<long long, int> masters_by_y; // quantized y -> vertex on x=0
  auto key_of = [](double y) { return static_cast<long long>(std::llround(y * 1e12)); };
  for (int v = 0; v < mesh.n_vertices(); ++v)
    if (mesh.vertex_side_mask[v] & (1u << side_x0)) masters_by_y[key_of(mesh.vertices[v][1])] = v;

  for (int v = 0; v < mesh.n_vertices(); ++v) {
    if (!(mesh.vertex_side_mask[v] & (1u << side_x1))) continue;
    auto it = masters_by_y.find(key_of(mesh.vertices[v][1]));
    if (it == masters_by_y.end())
      throw Error("build_periodic_map: no x=0 partner for vertex " + std::to_string(v));
    map.vertex_pairs.push_back({v, it->second});
    master_of[v] = it->second;
  }

  std::map<std::array<int, 2>, int> edge_of;
  for (int e = 0; e < mesh.n_edges(); ++e) edge_of[mesh.edges[e]] = e;

  for (int e = 0; e < mesh.n_edges(); ++e) {
    if (mesh.edge_side[e] != side_x1) continue;
    const int a = master_of[mesh.edges[e][0]], b = master_of[mesh.edges[e][1]];
    if (a < 0 || b < 0) throw Error("build_periodic_map: unmatched edge endpoints");
    auto it = edge_of.find({std::min(a, b), std::max(a, b)});
    if (it == edge_of.end())
      throw Error("build_periodic_map: no x=0 partner for edge " + std::to_string(e));
    map.edge_pairs.push_back({e, it->second});
    // Both edges are stored lo->hi; the pairing preserves orientation iff the
    // vertex map preserves the index order.
    map.edge_signs.push_back(static_cast<std::int8_t>((a < b) ? 1 : -1));
  }
  return map;
}

CellGeometry cell_geometry(const Mesh& mesh, int cell) {
  if (cell < 0 || cell >= mesh.n_cells()) throw Error("cell_geometry: cell index out of range");
  const auto& c = mesh.cells[cell];
  const auto& p0 = mesh.vertices[c[0]];
  const auto& p1 = mesh.vertices[c[1]];
  const auto& p2 = mesh.vertices[c[2]];

  CellGeometry g;
  g.jacobian = {{{p1[0] - p0[0], p2[0] - p0[0]}, {p1[1] - p0[1], p2[1] - p0[1]}}};
  g.det = g.jacobian[0][0] * g.jacobian[1][1] - g.jacobian[0][1] * g.jacobian[1][0];
  if (g.det <= 0.0)
    throw Error("cell_geometry: cell " + std::to_string(cell) + " is degenerate or clockwise");
  g.area = 0.5 * g.det;
  // inverse transpose of J
  g.inv_transpose = {{{g.jacobian[1][1] / g.det, -g.jacobian[1][0] / g.det},
                      {-g.jacobian[0][1] / g.det, g.jacobian[0][0] / g.det}}};
  return g;
}

namespace {

std::array<double, 3> barycentric_in(const Mesh& mesh, int cell, double x, double y) {
  const auto& c = mesh.cells[cell];
  const auto& p0 = mesh.vertices[c[0]];
  const CellGeometry g = cell_geometry(mesh, cell);
  const double rx = x - p0[0], ry = y - p0[1];
  const double l1 = (g.jacobian[1][1] * rx - g.jacobian[0][1] * ry) / g.det;
  const double l2 = (-g.jacobian[1][0] * rx + g.jacobian[0][0] * ry) / g.det;
  return {1.0 - l1 - l2, l1, l2};
}

} // namespace

PointLocation locate_point(const Mesh& mesh, double x, double y) {
  if (mesh.n > 0) {
    const int n = mesh.n;
    const double cx = std::clamp(x, 0.0, 1.0), cy = std::clamp(y, 0.0, 1.0);
    const int i = std::min(static_cast<int>(cx * n), n - 1);
    const int j = std::min(static_cast<int>(cy * n), n - 1);
    const double xi = cx * n - i, eta = cy * n - j;
    const int cell = 2 * (j * n + i) + (xi >= eta ? 0 : 1);
    return {cell, barycentric_in(mesh, cell, x, y)};
  }
  for (int cell = 0; cell < mesh.n_cells(); ++cell) {
    const auto bc = barycentric_in(mesh, cell, x, y);
    if (bc[0] >= -1e-12 && bc[1] >= -1e-12 && bc[2] >= -1e-12) return {cell, bc};
  }
  throw Error("locate_point: point outside the mesh");
}

} // namespace chmhd
