#pragma once

#include <array>
#include <vector>

namespace chmhd {

// Quadrature on the reference triangle {(0,0),(1,0),(0,1)}; points are stored
// in barycentric coordinates and weights sum to the reference area 1/2.
struct QuadratureRule {
  int exact_degree = 0;
  std::vector<std::array<double, 3>> points;
  std::vector<double> weights;

  int size() const { return static_cast<int>(weights.size()); }
};

// Smallest shipped rule that is exact at least to `degree`. Degrees up to 6
// use the classical symmetric triangle rules; 7..10 fall back to a conical
// product of Gauss-Legendre lines. Degrees above 10 are rejected.
const QuadratureRule& quadrature_rule(int degree);

// Gauss-Legendre nodes/weights on [0,1], computed to machine precision.
void gauss_legendre_01(int n, std::vector<double>& nodes, std::vector<double>& weights);

} // namespace chmhd
