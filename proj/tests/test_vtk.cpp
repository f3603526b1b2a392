#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "chmhd/error.hpp"
#include "chmhd/field.hpp"
#include "chmhd/vtk.hpp"
#include "doctest.h"

using namespace chmhd;

namespace {

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(static_cast<bool>(in));
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

std::string read_all(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(static_cast<bool>(in));
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

size_t find_line(const std::vector<std::string>& lines, const std::string& want) {
  for (size_t i = 0; i < lines.size(); ++i)
    if (lines[i] == want) return i;
  FAIL("missing line '" << want << "'");
  return 0;
}

// n = 2 state with fields whose vertex samples are known in closed form.
struct Fixture {
  Spaces spaces = build_spaces(2, SpaceSpec{});
  State state = make_state(spaces);

  Fixture() {
    state.t = 0.375;
    state.phi = interpolate(spaces.phase, [](double x, double y) { return x + 2.0 * y; });
    state.omega = interpolate(spaces.phase, [](double x, double y) { return x * y; });
    state.p = interpolate(spaces.pressure, [](double x, double y) { return 3.0 * x - y; });
    state.u = interpolate(spaces.velocity, [](double x, double y) -> std::array<double, 2> {
      return {x, y - 1.0};
    });
    // (-y, x) lies in the lowest-order edge space, so every incident-cell
    // evaluation at a vertex agrees and the average is exact.
    state.B = interpolate(spaces.induction, [](double x, double y) -> std::array<double, 2> {
      return {-y, x};
    });
  }
};

const char* kTmp = "vtk_test_tmp";

struct TmpDir {
  TmpDir() { std::filesystem::create_directories(kTmp); }
  ~TmpDir() { std::filesystem::remove_all(kTmp); }
  std::string path(const char* name) const { return std::string(kTmp) + "/" + name; }
};

} // namespace

TEST_CASE("vertex samples reproduce the nodal fields and average the edge field") {
  const Fixture fx;
  const VtkSnapshot snap = sample_snapshot(fx.state);
  const Mesh& mesh = *fx.spaces.mesh;

  CHECK(snap.t == 0.375);
  REQUIRE(snap.phi.size() == static_cast<size_t>(mesh.n_vertices()));
  for (int v = 0; v < mesh.n_vertices(); ++v) {
    const double x = mesh.vertices[v][0];
    const double y = mesh.vertices[v][1];
    CHECK(snap.phi[v] == doctest::Approx(x + 2.0 * y).epsilon(1e-13));
    CHECK(snap.omega[v] == doctest::Approx(x * y).epsilon(1e-13));
    CHECK(snap.p[v] == doctest::Approx(3.0 * x - y).epsilon(1e-13));
    CHECK(snap.u[v][0] == doctest::Approx(x).epsilon(1e-13));
    CHECK(snap.u[v][1] == doctest::Approx(y - 1.0).epsilon(1e-13));
    CHECK(snap.B[v][0] == doctest::Approx(-y).epsilon(1e-12));
    CHECK(snap.B[v][1] == doctest::Approx(x).epsilon(1e-12));
  }
}

TEST_CASE("the writer emits a complete legacy unstructured grid") {
  const Fixture fx;
  const TmpDir tmp;
  const VtkSnapshot snap = sample_snapshot(fx.state);
  const Mesh& mesh = *fx.spaces.mesh;
  const std::string path = tmp.path("snap.vtk");
  write_vtk(snap, mesh, path);

  const auto lines = read_lines(path);
  REQUIRE(lines.size() > 20);
  CHECK(lines[0] == "# vtk DataFile Version 3.0");
  CHECK(lines[2] == "ASCII");
  CHECK(lines[3] == "DATASET UNSTRUCTURED_GRID");
  CHECK(lines[4] == "POINTS 9 double");
  CHECK(lines[5] == "0 0 0"); // the first vertex of the unit-square grid

  const size_t cells = find_line(lines, "CELLS 8 32");
  for (size_t i = cells + 1; i <= cells + 8; ++i) {
    CHECK(lines[i].substr(0, 2) == "3 ");
    int a, b, c, d;
    REQUIRE(std::sscanf(lines[i].c_str(), "%d %d %d %d", &a, &b, &c, &d) == 4);
    CHECK(a == 3);
    for (int idx : {b, c, d}) {
      CHECK(idx >= 0);
      CHECK(idx < 9);
    }
  }

  const size_t types = find_line(lines, "CELL_TYPES 8");
  for (size_t i = types + 1; i <= types + 8; ++i) CHECK(lines[i] == "5");

  find_line(lines, "POINT_DATA 9");
  const size_t phi = find_line(lines, "SCALARS phi double 1");
  CHECK(lines[phi + 1] == "LOOKUP_TABLE default");
  find_line(lines, "SCALARS omega double 1");
  find_line(lines, "SCALARS p double 1");

  const size_t u = find_line(lines, "VECTORS u double");
  for (size_t i = u + 1; i <= u + 9; ++i) {
    double ux, uy, uz;
    REQUIRE(std::sscanf(lines[i].c_str(), "%lf %lf %lf", &ux, &uy, &uz) == 3);
    CHECK(uz == 0.0); // planar data, explicit zero z
  }
  find_line(lines, "VECTORS B double");
}

TEST_CASE("identical snapshots produce byte-identical files") {
  const Fixture fx;
  const TmpDir tmp;
  const VtkSnapshot snap = sample_snapshot(fx.state);
  write_vtk(snap, *fx.spaces.mesh, tmp.path("a.vtk"));
  write_vtk(sample_snapshot(fx.state), *fx.spaces.mesh, tmp.path("b.vtk"));
  const std::string a = read_all(tmp.path("a.vtk"));
  CHECK_FALSE(a.empty());
  CHECK(a == read_all(tmp.path("b.vtk")));
}

TEST_CASE("bad snapshots are rejected with the field named") {
  const Fixture fx;
  const TmpDir tmp;
  const Mesh& mesh = *fx.spaces.mesh;

  VtkSnapshot poisoned = sample_snapshot(fx.state);
  poisoned.phi[3] = std::numeric_limits<double>::quiet_NaN();
  try {
    write_vtk(poisoned, mesh, tmp.path("bad.vtk"));
    FAIL_CHECK("expected Error for NaN");
  } catch (const Error& e) {
    const std::string what = e.what();
    CHECK(what.find("'phi'") != std::string::npos);
    CHECK(what.find("vertex 3") != std::string::npos);
  }

  VtkSnapshot inf_vec = sample_snapshot(fx.state);
  inf_vec.B[1][1] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(write_vtk(inf_vec, mesh, tmp.path("bad.vtk")), Error);

  VtkSnapshot short_field = sample_snapshot(fx.state);
  short_field.u.pop_back();
  try {
    write_vtk(short_field, mesh, tmp.path("bad.vtk"));
    FAIL_CHECK("expected Error for length mismatch");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("'u'") != std::string::npos);
  }

  CHECK_THROWS_AS(write_vtk(sample_snapshot(fx.state), mesh, "/nonexistent-dir/x.vtk"), Error);
}

TEST_CASE("the timeseries file is exact and carries the fixed header") {
  const TmpDir tmp;
  DiagnosticsRow r0;
  r0.step = 0;
  r0.t = 0.0;
  r0.mass = 0.5;
  r0.system_energy = 2.0;
  r0.algorithm_energy = 2.25;
  r0.grad_omega_sq = 0.125;
  r0.grad_u_sq = 1.0;
  r0.curl_B_sq = 4.0;
  DiagnosticsRow r1 = r0;
  r1.step = 1;
  r1.t = 0.25;
  r1.mass = 0.5;
  r1.system_energy = 1.5;

  const std::string path = tmp.path("series.csv");
  write_timeseries({r0, r1}, path);
  CHECK(read_all(path) ==
        "step,t,mass,E_system,E_algorithm,grad_omega_sq,grad_u_sq,curl_B_sq\n"
        "0,0,0.5,2,2.25,0.125,1,4\n"
        "1,0.25,0.5,1.5,2.25,0.125,1,4\n");

  write_timeseries({}, path);
  CHECK(read_all(path) ==
        "step,t,mass,E_system,E_algorithm,grad_omega_sq,grad_u_sq,curl_B_sq\n");

  CHECK_THROWS_AS(write_timeseries({r0}, "/nonexistent-dir/x.csv"), Error);
}
