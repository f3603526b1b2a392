#include "chmhd/manufactured.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "chmhd/error.hpp"
#include "chmhd/rng.hpp"

namespace chmhd {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

// Per-point trig primitives; everything below is a polynomial in these.
struct Trig {
  double T, dT;
  double Sx, Cx, Sy, Cy;
  double s2x, c2x, s2y, c2y;
};

Trig trig(double x, double y, double t) {
  Trig g;
  g.T = std::cos(t);
  g.dT = -std::sin(t);
  g.Sx = std::sin(kPi * x);
  g.Cx = std::cos(kPi * x);
  g.Sy = std::sin(kPi * y);
  g.Cy = std::cos(kPi * y);
  g.s2x = std::sin(2.0 * kPi * x);
  g.c2x = std::cos(2.0 * kPi * x);
  g.s2y = std::sin(2.0 * kPi * y);
  g.c2y = std::cos(2.0 * kPi * y);
  return g;
}

constexpr double kPi2 = kPi * kPi;
constexpr double kPi3 = kPi2 * kPi;
constexpr double kPi4 = kPi2 * kPi2;

double phi_value(const Trig& g) { return g.T * g.Cx * g.Cx * g.Cy * g.Cy; }
double phi_dt(const Trig& g) { return g.dT * g.Cx * g.Cx * g.Cy * g.Cy; }
double phi_dx(const Trig& g) { return -kPi * g.T * g.s2x * g.Cy * g.Cy; }
double phi_dy(const Trig& g) { return -kPi * g.T * g.Cx * g.Cx * g.s2y; }
double phi_lap(const Trig& g) {
  return -2.0 * kPi2 * g.T * (g.c2x * g.Cy * g.Cy + g.Cx * g.Cx * g.c2y);
}
double phi_lap_dx(const Trig& g) {
  return 2.0 * kPi3 * g.T * g.s2x * (2.0 * g.Cy * g.Cy + g.c2y);
}
double phi_lap_dy(const Trig& g) {
  return 2.0 * kPi3 * g.T * g.s2y * (2.0 * g.Cx * g.Cx + g.c2x);
}
double phi_bilap(const Trig& g) {
  return 8.0 * kPi4 * g.T *
         (g.c2x * g.Cy * g.Cy + g.Cx * g.Cx * g.c2y + g.c2x * g.c2y);
}

double u1_value(const Trig& g) { return g.T * kPi * g.s2y * g.Sx * g.Sx; }
double u2_value(const Trig& g) { return -g.T * kPi * g.s2x * g.Sy * g.Sy; }
double u1_dt(const Trig& g) { return g.dT * kPi * g.s2y * g.Sx * g.Sx; }
double u2_dt(const Trig& g) { return -g.dT * kPi * g.s2x * g.Sy * g.Sy; }
double u1_dx(const Trig& g) { return g.T * kPi2 * g.s2x * g.s2y; }
double u1_dy(const Trig& g) { return 2.0 * g.T * kPi2 * g.c2y * g.Sx * g.Sx; }
double u2_dx(const Trig& g) { return -2.0 * g.T * kPi2 * g.c2x * g.Sy * g.Sy; }
double u2_dy(const Trig& g) { return -g.T * kPi2 * g.s2x * g.s2y; }
double u1_lap(const Trig& g) { return 2.0 * g.T * kPi3 * g.s2y * (2.0 * g.c2x - 1.0); }
double u2_lap(const Trig& g) { return -2.0 * g.T * kPi3 * g.s2x * (2.0 * g.c2y - 1.0); }

double p_value(const Trig& g, double x, double y) {
  return g.T * (2.0 * x - 2.0) * (2.0 * y - 1.0);
}
double p_dx(const Trig& g, double y) { return 2.0 * g.T * (2.0 * y - 1.0); }
double p_dy(const Trig& g, double x) { return 4.0 * g.T * (x - 1.0); }

double B1_value(const Trig& g) { return g.T * g.Sx * g.Cy; }
double B2_value(const Trig& g) { return -g.T * g.Sy * g.Cx; }
double B1_dt(const Trig& g) { return g.dT * g.Sx * g.Cy; }
double B2_dt(const Trig& g) { return -g.dT * g.Sy * g.Cx; }
double B1_dx(const Trig& g) { return kPi * g.T * g.Cx * g.Cy; }
double B1_dy(const Trig& g) { return -kPi * g.T * g.Sx * g.Sy; }
double B2_dx(const Trig& g) { return kPi * g.T * g.Sx * g.Sy; }
double B2_dy(const Trig& g) { return -kPi * g.T * g.Cx * g.Cy; }
double curlB_value(const Trig& g) { return 2.0 * kPi * g.T * g.Sx * g.Sy; }
double curlB_dx(const Trig& g) { return 2.0 * kPi2 * g.T * g.Cx * g.Sy; }
double curlB_dy(const Trig& g) { return 2.0 * kPi2 * g.T * g.Sx * g.Cy; }

double omega_value(const Trig& g, double gamma) {
  const double p = phi_value(g);
  return -gamma * phi_lap(g) + (p * p * p - p) / gamma;
}
double omega_dx(const Trig& g, double gamma) {
  const double p = phi_value(g);
  return -gamma * phi_lap_dx(g) + (3.0 * p * p - 1.0) * phi_dx(g) / gamma;
}
double omega_dy(const Trig& g, double gamma) {
  const double p = phi_value(g);
  return -gamma * phi_lap_dy(g) + (3.0 * p * p - 1.0) * phi_dy(g) / gamma;
}
double omega_lap(const Trig& g, double gamma) {
  const double p = phi_value(g);
  const double px = phi_dx(g);
  const double py = phi_dy(g);
  return -gamma * phi_bilap(g) +
         ((3.0 * p * p - 1.0) * phi_lap(g) + 6.0 * p * (px * px + py * py)) / gamma;
}

struct Coefs {
  double gamma, lambda, mu;
  double M, nu, sigma;
};

double constant_of(const CoefficientModel& m, const char* name) {
  if (!m.is_constant())
    throw Error(std::string("exact_forcing: coefficient '") + name +
                "' must be constant; the reference solution has no closed-form "
                "force for phase-dependent coefficients");
  return m(0.0);
}

Coefs coefs_of(const Params& params) {
  params.validate();
  Coefs c;
  c.gamma = params.gamma;
  c.lambda = params.lambda;
  c.mu = params.mu;
  c.M = constant_of(params.mobility, "mobility");
  c.nu = constant_of(params.viscosity, "viscosity");
  c.sigma = constant_of(params.conductivity, "conductivity");
  return c;
}

// Component order: f_phi, f_u1, f_u2, f_B1, f_B2.
std::array<double, 5> forcing_values(double x, double y, double t, const Coefs& c) {
  const Trig g = trig(x, y, t);

  const double u1 = u1_value(g), u2 = u2_value(g);
  const double px = phi_dx(g), py = phi_dy(g);
  const double f_phi =
      phi_dt(g) + u1 * px + u2 * py - c.gamma * c.M * omega_lap(g, c.gamma);

  const double s = curlB_value(g);
  const double B1 = B1_value(g), B2 = B2_value(g);
  const double om = omega_value(g, c.gamma);
  const double f_u1 = u1_dt(g) + u1 * u1_dx(g) + u2 * u1_dy(g) - c.nu * u1_lap(g) +
                      p_dx(g, y) + (s / c.mu) * B2 - c.lambda * om * px;
  const double f_u2 = u2_dt(g) + u1 * u2_dx(g) + u2 * u2_dy(g) - c.nu * u2_lap(g) +
                      p_dy(g, x) - (s / c.mu) * B1 - c.lambda * om * py;

  // w = u x B (scalar in 2D); curl of a scalar a is (da/dy, -da/dx).
  const double w_dx = u1_dx(g) * B2 + u1 * B2_dx(g) - u2_dx(g) * B1 - u2 * B1_dx(g);
  const double w_dy = u1_dy(g) * B2 + u1 * B2_dy(g) - u2_dy(g) * B1 - u2 * B1_dy(g);
  const double f_B1 = B1_dt(g) + curlB_dy(g) / (c.mu * c.sigma) - w_dy;
  const double f_B2 = B2_dt(g) - curlB_dx(g) / (c.mu * c.sigma) + w_dx;

  return {f_phi, f_u1, f_u2, f_B1, f_B2};
}

} // namespace

ExactSolution exact_solution(double t, const Params& params) {
  params.validate();
  const double gamma = params.gamma;
  ExactSolution s;
  s.phi = [t](double x, double y) { return phi_value(trig(x, y, t)); };
  s.grad_phi = [t](double x, double y) -> std::array<double, 2> {
    const Trig g = trig(x, y, t);
    return {phi_dx(g), phi_dy(g)};
  };
  s.omega = [t, gamma](double x, double y) { return omega_value(trig(x, y, t), gamma); };
  s.grad_omega = [t, gamma](double x, double y) -> std::array<double, 2> {
    const Trig g = trig(x, y, t);
    return {omega_dx(g, gamma), omega_dy(g, gamma)};
  };
  s.u = [t](double x, double y) -> std::array<double, 2> {
    const Trig g = trig(x, y, t);
    return {u1_value(g), u2_value(g)};
  };
  s.grad_u = [t](double x, double y) -> std::array<double, 4> {
    const Trig g = trig(x, y, t);
    return {u1_dx(g), u1_dy(g), u2_dx(g), u2_dy(g)};
  };
  s.p = [t](double x, double y) { return p_value(trig(x, y, t), x, y); };
  s.grad_p = [t](double x, double y) -> std::array<double, 2> {
    const Trig g = trig(x, y, t);
    return {p_dx(g, y), p_dy(g, x)};
  };
  s.B = [t](double x, double y) -> std::array<double, 2> {
    const Trig g = trig(x, y, t);
    return {B1_value(g), B2_value(g)};
  };
  s.curl_B = [t](double x, double y) { return curlB_value(trig(x, y, t)); };
  return s;
}

ForcingSet exact_forcing(double t, const Params& params) {
  const Coefs c = coefs_of(params);
  ForcingSet f;
  f.phase = [t, c](double x, double y) { return forcing_values(x, y, t, c)[0]; };
  f.velocity = [t, c](double x, double y) -> std::array<double, 2> {
    const auto v = forcing_values(x, y, t, c);
    return {v[1], v[2]};
  };
  f.induction = [t, c](double x, double y) -> std::array<double, 2> {
    const auto v = forcing_values(x, y, t, c);
    return {v[3], v[4]};
  };
  return f;
}

BoundaryValues exact_boundary_values(const Spaces& spaces, double t) {
  BoundaryValues bv;
  const auto u_fn = [t](double x, double y) -> std::array<double, 2> {
    const Trig g = trig(x, y, t);
    return {u1_value(g), u2_value(g)};
  };
  const auto B_fn = [t](double x, double y) -> std::array<double, 2> {
    const Trig g = trig(x, y, t);
    return {B1_value(g), B2_value(g)};
  };
  bv.velocity = interpolate(spaces.velocity, u_fn).coeffs;
  bv.induction.assign(static_cast<size_t>(spaces.induction.n_dofs), 0.0);
  // Nedelec0 dofs are numbered by edge. Five Gauss points per edge keep the
  // boundary-moment error well below the discretization error at any n here.
  for (int e = 0; e < spaces.induction.n_dofs; ++e) {
    if (spaces.induction.constraint[e] == DofConstraint::dirichlet)
      bv.induction[e] = edge_moment(*spaces.mesh, e, B_fn, 5);
  }
  return bv;
}

ForcingAudit validate_forcing(const Params& params, int n_points, double tol,
                              std::uint64_t seed) {
  const Coefs c = coefs_of(params);
  if (n_points < 1) throw Error("validate_forcing: n_points must be positive");

  const double h = 1e-5;
  // First differences and the three-point/four-point second-difference
  // stencils below act on field *values* only; no closed-form derivative
  // enters the reconstruction.
  const auto d1x = [h](auto&& f, double x, double y) {
    return (f(x + h, y) - f(x - h, y)) / (2.0 * h);
  };
  const auto d1y = [h](auto&& f, double x, double y) {
    return (f(x, y + h) - f(x, y - h)) / (2.0 * h);
  };
  const auto d2xx = [h](auto&& f, double x, double y) {
    return (f(x + h, y) - 2.0 * f(x, y) + f(x - h, y)) / (h * h);
  };
  const auto d2yy = [h](auto&& f, double x, double y) {
    return (f(x, y + h) - 2.0 * f(x, y) + f(x, y - h)) / (h * h);
  };
  const auto d2xy = [h](auto&& f, double x, double y) {
    return (f(x + h, y + h) - f(x + h, y - h) - f(x - h, y + h) + f(x - h, y - h)) /
           (4.0 * h * h);
  };

  SplitMix64 rng(seed);
  std::vector<std::array<double, 5>> formula(static_cast<size_t>(n_points));
  std::vector<std::array<double, 5>> fd(static_cast<size_t>(n_points));

  for (int k = 0; k < n_points; ++k) {
    const double x = rng.uniform(0.05, 0.95);
    const double y = rng.uniform(0.05, 0.95);
    const double t = rng.uniform(0.0, 2.0);
    formula[k] = forcing_values(x, y, t, c);

    const auto phi = [t](double xx, double yy) { return phi_value(trig(xx, yy, t)); };
    const auto om = [t, &c](double xx, double yy) {
      return omega_value(trig(xx, yy, t), c.gamma);
    };
    const auto u1 = [t](double xx, double yy) { return u1_value(trig(xx, yy, t)); };
    const auto u2 = [t](double xx, double yy) { return u2_value(trig(xx, yy, t)); };
    const auto pr = [t](double xx, double yy) { return p_value(trig(xx, yy, t), xx, yy); };
    const auto B1 = [t](double xx, double yy) { return B1_value(trig(xx, yy, t)); };
    const auto B2 = [t](double xx, double yy) { return B2_value(trig(xx, yy, t)); };
    const auto cross = [&](double xx, double yy) {
      return u1(xx, yy) * B2(xx, yy) - u2(xx, yy) * B1(xx, yy);
    };
    const auto dt_of = [&](auto&& value_at) {
      return (value_at(t + h) - value_at(t - h)) / (2.0 * h);
    };

    const double phix = d1x(phi, x, y), phiy = d1y(phi, x, y);
    const double u1v = u1(x, y), u2v = u2(x, y);
    const double phit = dt_of([&](double tt) { return phi_value(trig(x, y, tt)); });
    fd[k][0] = phit + u1v * phix + u2v * phiy -
               c.gamma * c.M * (d2xx(om, x, y) + d2yy(om, x, y));

    const double B1v = B1(x, y), B2v = B2(x, y);
    const double s_fd = d1x(B2, x, y) - d1y(B1, x, y);
    const double omv = om(x, y);
    const double u1t = dt_of([&](double tt) { return u1_value(trig(x, y, tt)); });
    const double u2t = dt_of([&](double tt) { return u2_value(trig(x, y, tt)); });
    fd[k][1] = u1t + u1v * d1x(u1, x, y) + u2v * d1y(u1, x, y) -
               c.nu * (d2xx(u1, x, y) + d2yy(u1, x, y)) + d1x(pr, x, y) +
               (s_fd / c.mu) * B2v - c.lambda * omv * phix;
    fd[k][2] = u2t + u1v * d1x(u2, x, y) + u2v * d1y(u2, x, y) -
               c.nu * (d2xx(u2, x, y) + d2yy(u2, x, y)) + d1y(pr, x, y) -
               (s_fd / c.mu) * B1v - c.lambda * omv * phiy;

    // d(curl B)/dy = d2B2/dxdy - d2B1/dy2, and mirrored for d/dx.
    const double s_dy = d2xy(B2, x, y) - d2yy(B1, x, y);
    const double s_dx = d2xx(B2, x, y) - d2xy(B1, x, y);
    const double B1t = dt_of([&](double tt) { return B1_value(trig(x, y, tt)); });
    const double B2t = dt_of([&](double tt) { return B2_value(trig(x, y, tt)); });
    fd[k][3] = B1t + s_dy / (c.mu * c.sigma) - d1y(cross, x, y);
    fd[k][4] = B2t - s_dx / (c.mu * c.sigma) + d1x(cross, x, y);
  }

  ForcingAudit audit;
  audit.n_points = n_points;
  for (const auto& row : formula)
    for (int i = 0; i < 5; ++i) audit.scale[i] = std::max(audit.scale[i], std::abs(row[i]));
  for (int k = 0; k < n_points; ++k)
    for (int i = 0; i < 5; ++i)
      audit.max_diff[i] = std::max(audit.max_diff[i], std::abs(fd[k][i] - formula[k][i]));
  for (int i = 0; i < 5; ++i)
    audit.worst = std::max(audit.worst, audit.max_diff[i] / (1.0 + audit.scale[i]));
  audit.passed = audit.worst <= tol;
  return audit;
}

} // namespace chmhd
