#include "chmhd/vtk.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "chmhd/error.hpp"

namespace chmhd {

namespace {

std::string g9(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void require_finite(const std::vector<double>& a, const char* name, const std::string& path) {
  for (size_t i = 0; i < a.size(); ++i) {
    if (!std::isfinite(a[i]))
      throw Error("write_vtk: non-finite value in '" + std::string(name) + "' at vertex " +
                  std::to_string(i) + " (" + path + ")");
  }
}

void require_finite(const std::vector<std::array<double, 2>>& a, const char* name,
                    const std::string& path) {
  for (size_t i = 0; i < a.size(); ++i) {
    if (!std::isfinite(a[i][0]) || !std::isfinite(a[i][1]))
      throw Error("write_vtk: non-finite value in '" + std::string(name) + "' at vertex " +
                  std::to_string(i) + " (" + path + ")");
  }
}

} // namespace

VtkSnapshot sample_snapshot(const State& state) {
  const Mesh& mesh = *state.phi.space->mesh;
  const int nv = mesh.n_vertices();
  VtkSnapshot snap;
  snap.t = state.t;
  snap.phi.resize(nv);
  snap.omega.resize(nv);
  snap.p.resize(nv);
  snap.u.resize(nv);
  snap.B.assign(nv, {0.0, 0.0});

  const int u_stride = state.u.space->scalar_dofs;
  for (int v = 0; v < nv; ++v) {
    snap.phi[v] = state.phi.coeffs[v];
    snap.omega[v] = state.omega.coeffs[v];
    snap.p[v] = state.p.coeffs[v];
    snap.u[v] = {state.u.coeffs[v], state.u.coeffs[u_stride + v]};
  }

  std::vector<int> incident(nv, 0);
  for (int c = 0; c < mesh.n_cells(); ++c) {
    for (int k = 0; k < 3; ++k) {
      std::array<double, 3> bc{0.0, 0.0, 0.0};
      bc[k] = 1.0;
      const auto val = eval_hcurl(state.B, c, bc);
      const int v = mesh.cells[c][k];
      snap.B[v][0] += val[0];
      snap.B[v][1] += val[1];
      ++incident[v];
    }
  }
  for (int v = 0; v < nv; ++v) {
    snap.B[v][0] /= incident[v];
    snap.B[v][1] /= incident[v];
  }
  return snap;
}

void write_vtk(const VtkSnapshot& snapshot, const Mesh& mesh, const std::string& path) {
  const size_t nv = static_cast<size_t>(mesh.n_vertices());
  const auto check_len = [&](size_t got, const char* name) {
    if (got != nv)
      throw Error("write_vtk: field '" + std::string(name) + "' has " + std::to_string(got) +
                  " entries, mesh has " + std::to_string(nv) + " vertices (" + path + ")");
  };
  check_len(snapshot.phi.size(), "phi");
  check_len(snapshot.omega.size(), "omega");
  check_len(snapshot.p.size(), "p");
  check_len(snapshot.u.size(), "u");
  check_len(snapshot.B.size(), "B");
  require_finite(snapshot.phi, "phi", path);
  require_finite(snapshot.omega, "omega", path);
  require_finite(snapshot.p, "p", path);
  require_finite(snapshot.u, "u", path);
  require_finite(snapshot.B, "B", path);

  std::ostringstream out;
  out << "# vtk DataFile Version 3.0\n";
  out << "chmhd snapshot t = " << g9(snapshot.t) << "\n";
  out << "ASCII\n";
  out << "DATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << nv << " double\n";
  for (size_t v = 0; v < nv; ++v)
    out << g9(mesh.vertices[v][0]) << " " << g9(mesh.vertices[v][1]) << " 0\n";

  const int nc = mesh.n_cells();
  out << "CELLS " << nc << " " << 4 * nc << "\n";
  for (int c = 0; c < nc; ++c)
    out << "3 " << mesh.cells[c][0] << " " << mesh.cells[c][1] << " " << mesh.cells[c][2]
        << "\n";
  out << "CELL_TYPES " << nc << "\n";
  for (int c = 0; c < nc; ++c) out << "5\n";

  out << "POINT_DATA " << nv << "\n";
  const auto scalars = [&](const char* name, const std::vector<double>& a) {
    out << "SCALARS " << name << " double 1\n";
    out << "LOOKUP_TABLE default\n";
    for (size_t v = 0; v < nv; ++v) out << g9(a[v]) << "\n";
  };
  scalars("phi", snapshot.phi);
  scalars("omega", snapshot.omega);
  scalars("p", snapshot.p);
  const auto vectors = [&](const char* name, const std::vector<std::array<double, 2>>& a) {
    out << "VECTORS " << name << " double\n";
    for (size_t v = 0; v < nv; ++v) out << g9(a[v][0]) << " " << g9(a[v][1]) << " 0\n";
  };
  vectors("u", snapshot.u);
  vectors("B", snapshot.B);

  std::ofstream f(path, std::ios::binary); // binary: no newline translation
  if (!f) throw Error("write_vtk: cannot open " + path);
  f << out.str();
  f.flush();
  if (!f) throw Error("write_vtk: write failed for " + path);
}

void write_timeseries(const std::vector<DiagnosticsRow>& rows, const std::string& path) {
  std::ostringstream out;
  out << "step,t,mass,E_system,E_algorithm,grad_omega_sq,grad_u_sq,curl_B_sq\n";
  for (const auto& r : rows) {
    out << r.step << "," << g17(r.t) << "," << g17(r.mass) << "," << g17(r.system_energy)
        << "," << g17(r.algorithm_energy) << "," << g17(r.grad_omega_sq) << ","
        << g17(r.grad_u_sq) << "," << g17(r.curl_B_sq) << "\n";
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("write_timeseries: cannot open " + path);
  f << out.str();
  f.flush();
  if (!f) throw Error("write_timeseries: write failed for " + path);
}

} // namespace chmhd
