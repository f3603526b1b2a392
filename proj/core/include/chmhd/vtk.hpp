#pragma once

#include <array>
#include <string>
#include <vector>

#include "chmhd/diagnostics.hpp"
#include "chmhd/stepper.hpp"

namespace chmhd {

// Vertex samples of one time level, ready for the writer. Every array has
// one entry per mesh vertex and must be finite.
struct VtkSnapshot {
  double t = 0.0;
  std::vector<double> phi, omega, p;
  std::vector<std::array<double, 2>> u, B;
};

// Samples the state at the vertices. Nodal fields read their vertex
// coefficients directly (the velocity bubbles vanish there); the edge-based
// induction field is only tangentially continuous, so each vertex takes the
// average of the evaluations from all incident cells.
VtkSnapshot sample_snapshot(const State& state);

// Legacy ASCII UNSTRUCTURED_GRID: POINTS, CELLS (triangle type 5), then
// POINT_DATA with SCALARS phi/omega/p and VECTORS u/B (z component written
// as 0). Numbers carry 9 significant digits and the output is byte-identical
// for identical input. Throws on length mismatches, non-finite values, or
// IO failure; messages name the path.
void write_vtk(const VtkSnapshot& snapshot, const Mesh& mesh, const std::string& path);

// CSV with header
//   step,t,mass,E_system,E_algorithm,grad_omega_sq,grad_u_sq,curl_B_sq
// and one row per diagnostics record; an empty stream writes just the header.
void write_timeseries(const std::vector<DiagnosticsRow>& rows, const std::string& path);

} // namespace chmhd
