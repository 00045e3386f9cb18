#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "nsdarcy/coupled.hpp"
#include "nsdarcy/errors.hpp"
#include "nsdarcy/mms.hpp"
#include "oracle.hpp"

using namespace nsdarcy;

namespace {

const double pi = std::numbers::pi;

// Collapsed Gauss product rule: exact to degree 2 * npts - 2 on the triangle.
double conical_integral(const TriMesh& mesh, int npts,
                        const std::function<double(int, const std::array<double, 3>&, Point2)>& fn) {
  const auto g = quad_rule_edge(npts);
  double total = 0.0;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const double jdet = std::abs(CellGeometry(mesh, c).det);
    for (std::size_t i = 0; i < g.points.size(); ++i)
      for (std::size_t j = 0; j < g.points.size(); ++j) {
        const double s = g.points[i], t = g.points[j] * (1.0 - s);
        const std::array<double, 3> l{1.0 - s - t, s, t};
        total += g.weights[i] * g.weights[j] * (1.0 - s) * jdet * fn(c, l, mesh.map(c, l));
      }
  }
  return total;
}

CoupledState interpolant(const CoupledMesh& m, int k, const ManufacturedProblem& mms) {
  auto sp = make_spaces(m, k);
  return {interpolate([&](Point2 x) { return mms.velocity(x); }, sp.velocity),
          interpolate([&](Point2 x) { return mms.pressure(x); }, sp.pressure),
          interpolate([&](Point2 x) { return mms.head(x); }, sp.head)};
}

}  // namespace

TEST_CASE("manufactured solution satisfies the interface conditions") {
  const ModelParams params;
  ManufacturedProblem mms(params);
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 20; ++i) {
    const Point2 x{u(rng), 1.0};
    const auto vel = mms.velocity(x);
    const auto g = mms.velocity_grad(x);
    const auto gphi = mms.head_grad(x);
    // u . n_f = K grad(phi) . n_p
    CHECK(std::abs(-vel[1] - params.conductivity * gphi[1]) <= 1e-12);
    // -n_f . (nu grad u - p I) n_f = rho g phi
    CHECK(std::abs(mms.pressure(x) - params.nu * g[1][1] - params.rho_g() * mms.head(x)) <= 1e-12);
    // -tau . (nu grad u) n_f = bjs u . tau
    CHECK(std::abs(params.nu * g[0][1] - params.bjs_coefficient() * vel[0]) <= 1e-12);
    CHECK(std::abs(mms.head(x) - (pi / 4) * std::cos(pi * x.x / 2)) < 1e-15);
    CHECK(std::abs(mms.pressure(x) - (pi / 4) * std::cos(pi * x.x / 2)) < 1e-15);
  }
}

TEST_CASE("forcings against finite differences") {
  ModelParams params;
  params.nu = 0.7;
  params.rho = 1.3;
  params.conductivity = 0.4;
  params.porosity = 0.8;
  ManufacturedProblem mms(params);
  std::mt19937 rng(32);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  const double h = 1e-4;
  auto vel = [&](double x, double y, int c) { return mms.velocity({x, y})[c]; };
  for (int i = 0; i < 100; ++i) {
    const double x = u(rng), yf = 1.0 + u(rng), yp = u(rng);
    std::array<double, 2> lap{}, gx{}, gy{};
    for (int c = 0; c < 2; ++c) {
      lap[c] = (vel(x + h, yf, c) + vel(x - h, yf, c) + vel(x, yf + h, c) + vel(x, yf - h, c) - 4 * vel(x, yf, c)) /
               (h * h);
      gx[c] = (vel(x + h, yf, c) - vel(x - h, yf, c)) / (2 * h);
      gy[c] = (vel(x, yf + h, c) - vel(x, yf - h, c)) / (2 * h);
    }
    const double px = (mms.pressure({x + h, yf}) - mms.pressure({x - h, yf})) / (2 * h);
    const double py = (mms.pressure({x, yf + h}) - mms.pressure({x, yf - h})) / (2 * h);
    const auto v = mms.velocity({x, yf});
    const auto f = mms.fluid_forcing({x, yf});
    CHECK(std::abs(f[0] - (-params.nu * lap[0] + px + params.rho * (v[0] * gx[0] + v[1] * gy[0]))) < 1e-6);
    CHECK(std::abs(f[1] - (-params.nu * lap[1] + py + params.rho * (v[0] * gx[1] + v[1] * gy[1]))) < 1e-6);
    CHECK(std::abs(gx[0] + gy[1]) < 1e-7);

    const auto g = mms.velocity_grad({x, yf});
    CHECK(std::abs(g[0][0] - gx[0]) < 1e-7);
    CHECK(std::abs(g[1][1] - gy[1]) < 1e-7);

    auto phi = [&](double a, double b) { return mms.head({a, b}); };
    const double lphi = (phi(x + h, yp) + phi(x - h, yp) + phi(x, yp + h) + phi(x, yp - h) - 4 * phi(x, yp)) / (h * h);
    CHECK(std::abs(mms.porous_source({x, yp}) + params.conductivity / params.porosity * lphi) < 1e-6);
    CHECK(std::abs(mms.head_laplacian({x, yp}) - lphi) < 1e-6);
  }
  ManufacturedProblem unit;
  CHECK(std::abs(unit.porous_source({0.2, 0.9}) - pi * pi * pi * 0.9 / 16 * std::cos(pi * 0.1)) < 1e-14);
}

TEST_CASE("error norms of the zero state") {
  ManufacturedProblem mms;
  auto m = build_coupled_mesh(4);
  auto sp = make_spaces(m, 2);
  CoupledState zero{DiscreteField(sp.velocity), DiscreteField(sp.pressure), DiscreteField(sp.head)};
  auto e = error_norms(zero, mms);
  CHECK(e.phi_l2 == doctest::Approx(std::sqrt(pi * pi / 96)).epsilon(1e-6));
  CHECK(e.phi_h1 == doctest::Approx(std::sqrt(std::pow(pi, 4) / 384 + pi * pi / 32)).epsilon(1e-6));
  CHECK(e.n == 4);
  CHECK_THROWS_AS(e.get(Variable::P, Norm::H1), std::invalid_argument);
  CHECK(e.get(Variable::Phi, Norm::L2) == e.phi_l2);
  CHECK(energy_norm(Variable::P) == Norm::L2);
  CHECK(energy_norm(Variable::U) == Norm::H1);
}

TEST_CASE("error norms agree with a higher-degree rule") {
  ManufacturedProblem mms;
  auto m = build_coupled_mesh(8);
  std::mt19937 rng(33);
  std::uniform_real_distribution<double> u(-1e-2, 1e-2);
  for (int k : {1, 2}) {
    auto s = interpolant(m, k, mms);
    for (double& c : s.head.coeffs) c += u(rng);
    for (double& c : s.velocity.coeffs) c += u(rng);
    auto e = error_norms(s, mms, 8);
    const double phi_l2 = std::sqrt(conical_integral(*m.porous, 6, [&](int c, const std::array<double, 3>& l, Point2 x) {
      const double d = eval_field_in_cell(s.head, c, l).value[0] - mms.head(x);
      return d * d;
    }));
    const double u_h1 = std::sqrt(conical_integral(*m.fluid, 6, [&](int c, const std::array<double, 3>& l, Point2 x) {
      const auto g = eval_field_in_cell(s.velocity, c, l).grad[0];
      const auto ge = mms.velocity_grad(x)[0];
      return (g[0] - ge[0]) * (g[0] - ge[0]) + (g[1] - ge[1]) * (g[1] - ge[1]);
    }));
    const double p_l2 = std::sqrt(conical_integral(*m.fluid, 6, [&](int c, const std::array<double, 3>& l, Point2 x) {
      const double d = eval_field_in_cell(s.pressure, c, l).value[0] - mms.pressure(x);
      return d * d;
    }));
    CHECK(std::abs(e.phi_l2 / phi_l2 - 1) < 1e-3);
    CHECK(std::abs(e.u_h1 / u_h1 - 1) < 1e-3);
    CHECK(std::abs(e.p_l2 / p_l2 - 1) < 1e-3);
    CHECK(std::abs(l2_error(s.head, 0, [&](Point2 x) { return mms.head(x); }) - e.phi_l2) < 1e-15);
  }
}

TEST_CASE("interpolation errors converge at the approximation orders") {
  ManufacturedProblem mms;
  for (int k : {1, 2}) {
    std::vector<ErrorReport> reports;
    for (int n : {8, 16, 32}) {
      auto m = build_coupled_mesh(n);
      reports.push_back(error_norms(interpolant(m, k, mms), mms));
    }
    auto table = rate_table(reports);
    for (Variable v : {Variable::Phi, Variable::U, Variable::V}) {
      CHECK(*table.rate(2, v, Norm::H1) == doctest::Approx(k).epsilon(0.1));
      CHECK(*table.rate(2, v, Norm::L2) == doctest::Approx(k + 1).epsilon(0.1));
    }
  }
}

TEST_CASE("rate table") {
  ErrorReport a, b;
  a.n = 8;
  b.n = 16;
  a.phi_l2 = 4e-2;
  b.phi_l2 = 1e-2;
  a.u_l2 = b.u_l2 = a.v_l2 = b.v_l2 = a.p_l2 = b.p_l2 = 1.0;
  a.phi_h1 = b.phi_h1 = a.u_h1 = b.u_h1 = a.v_h1 = b.v_h1 = 1.0;
  auto t = rate_table({a, b});
  CHECK(!t.rate(0, Variable::Phi, Norm::L2));
  CHECK(std::abs(*t.rate(1, Variable::Phi, Norm::L2) - 2.0) < 1e-14);
  CHECK(std::abs(*t.rate(1, Variable::U, Norm::L2)) < 1e-14);
  CHECK_THROWS_AS(rate_table({a}), InsufficientData);
  CHECK_THROWS_AS(rate_table({a, a}), InsufficientData);

  // Mini FE energy errors of the coupled solve at h = 1/8, 1/27, 1/64
  ErrorReport r8, r27, r64;
  r8.n = 8;
  r27.n = 27;
  r64.n = 64;
  r8.phi_h1 = 6.134e-2;
  r27.phi_h1 = 1.823e-2;
  r64.phi_h1 = 7.693e-3;
  for (auto* r : {&r8, &r27, &r64}) r->phi_l2 = r->u_l2 = r->v_l2 = r->p_l2 = r->u_h1 = r->v_h1 = 1.0;
  auto published = rate_table({r8, r27, r64});
  CHECK(std::abs(*published.rate(1, Variable::Phi, Norm::H1) - 1.0) < 0.2);
  CHECK(std::abs(*published.rate(2, Variable::Phi, Norm::H1) - 1.0) < 0.2);
}
