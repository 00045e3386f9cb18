#pragma once

#include <array>
#include <vector>

namespace nsdarcy {

/// Symmetric triangle rule on the reference triangle (area 1/2).
struct TriangleRule {
  std::vector<std::array<double, 3>> points;  // barycentric
  std::vector<double> weights;               // sum to 1/2
  int degree = 0;                            // exactness degree
};

/// Gauss-Legendre rule on [0, 1].
struct EdgeRule {
  std::vector<double> points;
  std::vector<double> weights;  // sum to 1
  int degree = 0;               // 2*npts - 1
};

/// Triangle rule exact for polynomials of the requested degree, 2..8.
/// Throws UnsupportedDegree otherwise.
TriangleRule quad_rule_tri(int degree);

/// Gauss-Legendre rule with npts points, 2..6. Throws UnsupportedDegree otherwise.
EdgeRule quad_rule_edge(int npts);

}  // namespace nsdarcy
