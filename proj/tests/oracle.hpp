#pragma once

// Brute-force reference integrals built only on point evaluation of fields.

#include <functional>
#include <random>

#include "nsdarcy/fem.hpp"
#include "nsdarcy/sparse.hpp"
#include "nsdarcy/quadrature.hpp"

namespace oracle {

using namespace nsdarcy;

inline DiscreteField random_field(std::shared_ptr<const DofMap> map, std::mt19937& rng, bool zero_bubbles = false) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  DiscreteField f(map);
  const int base = map->size();
  for (int c = 0; c < map->components(); ++c)
    for (int d = 0; d < base; ++d) {
      const bool bubble = map->family().tag == Family::MiniVelocity && d >= map->mesh().num_vertices();
      f.coeffs[c * base + d] = (bubble && zero_bubbles) ? 0.0 : u(rng);
    }
  return f;
}

inline DiscreteField unit_field(std::shared_ptr<const DofMap> map, int index) {
  DiscreteField f(map);
  f.coeffs[index] = 1.0;
  return f;
}

/// sum over cells of the degree-`degree` rule applied to fn(cell, bary, x)
inline double cell_integral(const TriMesh& mesh, int degree,
                            const std::function<double(int, const std::array<double, 3>&, Point2)>& fn) {
  const auto rule = quad_rule_tri(degree);
  double total = 0.0;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const double jdet = std::abs(CellGeometry(mesh, c).det);
    for (std::size_t q = 0; q < rule.points.size(); ++q)
      total += rule.weights[q] * jdet * fn(c, rule.points[q], mesh.map(c, rule.points[q]));
  }
  return total;
}

/// int_0^1 fn(x, 1) dx, Gauss rule on each of n segments
inline double interface_integral(int n, const std::function<double(Point2)>& fn, int npts = 6) {
  const auto rule = quad_rule_edge(npts);
  double total = 0.0;
  for (int i = 0; i < n; ++i)
    for (std::size_t q = 0; q < rule.points.size(); ++q)
      total += rule.weights[q] / n * fn({(i + rule.points[q]) / n, 1.0});
  return total;
}

/// rho * int (a . grad) b . w with the three fields evaluated at physical points
inline double trilinear(const DiscreteField& a, const DiscreteField& b, const DiscreteField& w, double rho,
                        int degree) {
  return rho * cell_integral(w.mesh(), degree, [&](int c, const std::array<double, 3>& l, Point2 x) {
           const auto sa = &a.mesh() == &w.mesh() ? eval_field_in_cell(a, c, l) : eval_field(a, x);
           const auto sb = &b.mesh() == &w.mesh() ? eval_field_in_cell(b, c, l) : eval_field(b, x);
           const auto sw = eval_field_in_cell(w, c, l);
           double s = 0.0;
           for (int d = 0; d < 2; ++d) s += sw.value[d] * (sa.value[0] * sb.grad[d][0] + sa.value[1] * sb.grad[d][1]);
           return s;
         });
}

inline double weighted(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// uᵀ C φ + φᵀ D u evaluated entry by entry, pairing C(i,j) with D(j,i)
inline double skew_form(const nsdarcy::CsrMatrix& c, const nsdarcy::CsrMatrix& d, const std::vector<double>& u,
                        const std::vector<double>& phi) {
  double s = 0.0;
  for (int i = 0; i < c.rows(); ++i)
    for (int k = c.row_ptr()[i]; k < c.row_ptr()[i + 1]; ++k) {
      const int j = c.col_idx()[k];
      s += (u[i] * c.values()[k]) * phi[j] + (u[i] * d.at(j, i)) * phi[j];
    }
  for (int j = 0; j < d.rows(); ++j)
    for (int k = d.row_ptr()[j]; k < d.row_ptr()[j + 1]; ++k)
      if (c.at(d.col_idx()[k], j) == 0.0) s += phi[j] * d.values()[k] * u[d.col_idx()[k]];
  return s;
}

}  // namespace oracle
