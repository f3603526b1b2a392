#include <cmath>

#include "chmhd/error.hpp"
#include "chmhd/quadrature.hpp"
#include "doctest.h"

using namespace chmhd;

namespace {

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

// Exact integral of lambda1^a lambda2^b lambda3^c over the reference triangle
// of area 1/2: a! b! c! / (a+b+c+2)!.
double monomial_exact(int a, int b, int c) {
  return factorial(a) * factorial(b) * factorial(c) / factorial(a + b + c + 2);
}

double monomial_quad(const QuadratureRule& rule, int a, int b, int c) {
  double s = 0.0;
  for (int q = 0; q < rule.size(); ++q)
    s += rule.weights[q] * std::pow(rule.points[q][0], a) * std::pow(rule.points[q][1], b) *
         std::pow(rule.points[q][2], c);
  return s;
}

} // namespace

TEST_CASE("triangle rules integrate every barycentric monomial up to their degree") {
  for (int degree = 1; degree <= 10; ++degree) {
    const QuadratureRule& rule = quadrature_rule(degree);
    for (int a = 0; a <= degree; ++a)
      for (int b = 0; a + b <= degree; ++b) {
        const int c = degree - a - b;
        const double exact = monomial_exact(a, b, c);
        const double got = monomial_quad(rule, a, b, c);
        CHECK(std::fabs(got - exact) <= 1e-14 * (1.0 + std::fabs(exact)));
      }
  }
}

TEST_CASE("spot value: integral of lambda1^2 lambda2 is 1/60") {
  const QuadratureRule& rule = quadrature_rule(3);
  CHECK(monomial_quad(rule, 2, 1, 0) == doctest::Approx(1.0 / 60.0).epsilon(1e-14));
}

TEST_CASE("weights are positive and sum to the reference area") {
  for (int degree = 1; degree <= 10; ++degree) {
    const QuadratureRule& rule = quadrature_rule(degree);
    double s = 0.0;
    for (int q = 0; q < rule.size(); ++q) {
      CHECK(rule.weights[q] > 0.0);
      s += rule.weights[q];
    }
    CHECK(s == doctest::Approx(0.5).epsilon(1e-14));
    for (int q = 0; q < rule.size(); ++q) {
      double bl = 0.0;
      for (int i = 0; i < 3; ++i) {
        CHECK(rule.points[q][i] >= 0.0);
        bl += rule.points[q][i];
      }
      CHECK(bl == doctest::Approx(1.0).epsilon(1e-13));
    }
  }
}

TEST_CASE("requesting a rule beyond the stocked degrees throws") {
  CHECK_THROWS_AS(quadrature_rule(11), Error);
  // Low requests clamp to the smallest shipped rule instead of throwing.
  CHECK(quadrature_rule(0).size() >= 1);
}

TEST_CASE("gauss-legendre on [0,1] reproduces the tabulated 5-point abscissas") {
  std::vector<double> nodes, weights;
  gauss_legendre_01(5, nodes, weights);
  REQUIRE(nodes.size() == 5);

  // No ordering is promised; compare in ascending-node order.
  std::vector<int> idx{0, 1, 2, 3, 4};
  std::sort(idx.begin(), idx.end(), [&](int a, int b) { return nodes[a] < nodes[b]; });
  std::vector<double> ns(5), ws(5);
  for (int i = 0; i < 5; ++i) {
    ns[i] = nodes[idx[i]];
    ws[i] = weights[idx[i]];
  }
  nodes = ns;
  weights = ws;

  // Standard 5-point Gauss-Legendre nodes mapped from [-1,1] to [0,1].
  const double x5[5] = {0.5 - 0.5 * 0.9061798459386640, 0.5 - 0.5 * 0.5384693101056831, 0.5,
                        0.5 + 0.5 * 0.5384693101056831, 0.5 + 0.5 * 0.9061798459386640};
  const double w5[5] = {0.5 * 0.2369268850561891, 0.5 * 0.4786286704993665,
                        0.5 * 0.5688888888888889, 0.5 * 0.4786286704993665,
                        0.5 * 0.2369268850561891};
  for (int i = 0; i < 5; ++i) {
    CHECK(nodes[i] == doctest::Approx(x5[i]).epsilon(1e-14));
    CHECK(weights[i] == doctest::Approx(w5[i]).epsilon(1e-14));
  }
}

TEST_CASE("gauss-legendre integrates polynomials of degree 2n-1 exactly") {
  for (int n : {1, 2, 3, 5}) {
    std::vector<double> nodes, weights;
    gauss_legendre_01(n, nodes, weights);
    for (int p = 0; p <= 2 * n - 1; ++p) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += weights[i] * std::pow(nodes[i], p);
      CHECK(s == doctest::Approx(1.0 / (p + 1)).epsilon(1e-13));
    }
  }
}
