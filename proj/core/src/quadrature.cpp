#include "chmhd/quadrature.hpp"

#include "chmhd/error.hpp"

#include <cmath>
#include <mutex>
#include <string>

namespace chmhd {

void gauss_legendre_01(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  if (n < 1) throw Error("gauss_legendre_01: need at least one node");
  nodes.resize(n);
  weights.resize(n);
  for (int i = 0; i < n; ++i) {
    // Newton iteration on P_n from the Chebyshev-like initial guess.
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    nodes[i] = 0.5 * (x + 1.0);
    weights[i] = 0.5 * w;
  }
}

namespace {

QuadratureRule centroid_rule() {
  QuadratureRule r;
  r.exact_degree = 1;
  r.points = {{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}};
  r.weights = {0.5};
  return r;
}

QuadratureRule three_point_rule() {
  QuadratureRule r;
  r.exact_degree = 2;
  const double a = 2.0 / 3.0, b = 1.0 / 6.0;
  r.points = {{a, b, b}, {b, a, b}, {b, b, a}};
  r.weights = {1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0};
  return r;
}

void push_orbit3(QuadratureRule& r, double a, double w) {
  const double c = 1.0 - 2.0 * a;
  r.points.push_back({c, a, a});
  r.points.push_back({a, c, a});
  r.points.push_back({a, a, c});
  r.weights.insert(r.weights.end(), 3, w);
}

void push_orbit6(QuadratureRule& r, double a, double b, double w) {
  const double c = 1.0 - a - b;
  r.points.push_back({a, b, c});
  r.points.push_back({a, c, b});
  r.points.push_back({b, a, c});
  r.points.push_back({b, c, a});
  r.points.push_back({c, a, b});
  r.points.push_back({c, b, a});
  r.weights.insert(r.weights.end(), 6, w);
}

QuadratureRule six_point_rule() { // degree 4
  QuadratureRule r;
  r.exact_degree = 4;
  push_orbit3(r, 0.445948490915965, 0.111690794839005);
  push_orbit3(r, 0.091576213509771, 0.054975871827661);
  return r;
}

QuadratureRule seven_point_rule() { // degree 5, closed-form coefficients
  QuadratureRule r;
  r.exact_degree = 5;
  const double s15 = std::sqrt(15.0);
  r.points.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
  r.weights.push_back(9.0 / 80.0);
  push_orbit3(r, (6.0 + s15) / 21.0, (155.0 + s15) / 2400.0);
  push_orbit3(r, (6.0 - s15) / 21.0, (155.0 - s15) / 2400.0);
  return r;
}

QuadratureRule twelve_point_rule() { // degree 6
  QuadratureRule r;
  r.exact_degree = 6;
  push_orbit3(r, 0.063089014491502, 0.025422453185103);
  push_orbit3(r, 0.249286745170910, 0.058393137863189);
  push_orbit6(r, 0.310352451033785, 0.053145049844816, 0.041425537809187);
  return r;
}

// Conical product: x = xi*(1-eta), y = eta with the extra (1-eta) Jacobian
// folded into the weights. m Gauss-Legendre points per direction give total
// degree 2m-2 on the triangle.
QuadratureRule conical_rule(int m) {
  QuadratureRule r;
  r.exact_degree = 2 * m - 2;
  std::vector<double> gx, gw;
  gauss_legendre_01(m, gx, gw);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      const double x = gx[i] * (1.0 - gx[j]);
      const double y = gx[j];
      r.points.push_back({1.0 - x - y, x, y});
      r.weights.push_back(gw[i] * gw[j] * (1.0 - gx[j]));
    }
  }
  return r;
}

} // namespace

const QuadratureRule& quadrature_rule(int degree) {
  if (degree < 0 || degree > 10)
    throw Error("quadrature_rule: degree " + std::to_string(degree) + " unsupported (max 10)");
  static std::once_flag once;
  static QuadratureRule rules[5];
  static QuadratureRule conical8, conical10;
  std::call_once(once, [] {
    rules[0] = centroid_rule();
    rules[1] = three_point_rule();
    rules[2] = six_point_rule();
    rules[3] = seven_point_rule();
    rules[4] = twelve_point_rule();
    conical8 = conical_rule(5);
    conical10 = conical_rule(6);
  });
  if (degree <= 1) return rules[0];
  if (degree == 2) return rules[1];
  if (degree <= 4) return rules[2];
  if (degree == 5) return rules[3];
  if (degree == 6) return rules[4];
  if (degree <= 8) return conical8;
  return conical10;
}

} // namespace chmhd
