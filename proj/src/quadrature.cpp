#include "nsdarcy/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "nsdarcy/errors.hpp"

namespace nsdarcy {

namespace {

// Dunavant rules. Weights below are normalized to unit area.
struct Builder {
  TriangleRule rule;

  void centroid(double w) {
    rule.points.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
    rule.weights.push_back(0.5 * w);
  }
  // Orbit of (a, a, 1-2a).
  void s21(double w, double a) {
    const double b = 1.0 - 2.0 * a;
    for (const auto& p : {std::array{a, a, b}, std::array{a, b, a}, std::array{b, a, a}}) {
      rule.points.push_back(p);
      rule.weights.push_back(0.5 * w);
    }
  }
  // Orbit of (a, b, 1-a-b).
  void s111(double w, double a, double b) {
    const double c = 1.0 - a - b;
    for (const auto& p : {std::array{a, b, c}, std::array{b, a, c}, std::array{a, c, b},
                          std::array{c, a, b}, std::array{b, c, a}, std::array{c, b, a}}) {
      rule.points.push_back(p);
      rule.weights.push_back(0.5 * w);
    }
  }
};

}  // namespace

TriangleRule quad_rule_tri(int degree) {
  Builder b;
  switch (degree) {
    case 2:
      b.s21(1.0 / 3.0, 1.0 / 6.0);
      b.rule.degree = 2;
      break;
    case 3:
    case 4:
      b.s21(0.22338158967801146570, 0.44594849091596488632);
      b.s21(0.10995174365532186764, 0.09157621350977074346);
      b.rule.degree = 4;
      break;
    case 5:
      b.centroid(0.225);
      b.s21(0.13239415278850618074, 0.47014206410511508977);
      b.s21(0.12593918054482715260, 0.10128650732345633880);
      b.rule.degree = 5;
      break;
    case 6:
      b.s21(0.11678627572637936603, 0.24928674517091042129);
      b.s21(0.050844906370206816921, 0.06308901449150222834);
      b.s111(0.082851075618373575194, 0.053145049844816947353, 0.31035245103378440542);
      b.rule.degree = 6;
      break;
    case 7:
    case 8:
      b.centroid(0.14431560767778716825);
      b.s21(0.095091634267284624794, 0.45929258829272315603);
      b.s21(0.10321737053471825028, 0.17056930775176020662);
      b.s21(0.032458497623198080311, 0.050547228317030975458);
      b.s111(0.027230314174434994265, 0.0083947774099576053372, 0.26311282963463811342);
      b.rule.degree = 8;
      break;
    default:
      throw UnsupportedDegree("triangle quadrature degree " + std::to_string(degree) +
                              " not in 2..8");
  }
  return b.rule;
}

EdgeRule quad_rule_edge(int npts) {
  if (npts < 2 || npts > 6)
    throw UnsupportedDegree("edge quadrature point count " + std::to_string(npts) +
                            " not in 2..6");
  EdgeRule rule;
  rule.degree = 2 * npts - 1;
  rule.points.resize(npts);
  rule.weights.resize(npts);
  // Newton on the Legendre polynomial from the Chebyshev-like initial guess.
  for (int i = 0; i < npts; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (npts + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= npts; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = npts * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Map [-1, 1] to [0, 1]; ascending order.
    rule.points[npts - 1 - i] = 0.5 * (x + 1.0);
    rule.weights[npts - 1 - i] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

}  // namespace nsdarcy
