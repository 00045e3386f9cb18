#include "nsdarcy/mms.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "nsdarcy/errors.hpp"
#include "nsdarcy/parallel.hpp"
#include "nsdarcy/quadrature.hpp"

namespace nsdarcy {

namespace {
constexpr double pi = std::numbers::pi;
}

ManufacturedProblem::ManufacturedProblem(ModelParams params) : params_(params) { params_.validate(); }

ManufacturedProblem manufactured_problem(const ModelParams& params) { return ManufacturedProblem(params); }

std::array<double, 2> ManufacturedProblem::velocity(Point2 p) const {
  const double c = std::cos(pi * p.y / 2);
  return {c * c * std::sin(pi * p.x / 2), -std::cos(pi * p.x / 2) * (std::sin(pi * p.y) / 4 + pi * p.y / 4)};
}

std::array<std::array<double, 2>, 2> ManufacturedProblem::velocity_grad(Point2 p) const {
  const double c = std::cos(pi * p.y / 2);
  const double sx = std::sin(pi * p.x / 2), cx = std::cos(pi * p.x / 2);
  const double sy = std::sin(pi * p.y), cy = std::cos(pi * p.y);
  return {{{pi / 2 * c * c * cx, -pi / 2 * sy * sx},
           {pi / 2 * sx * (sy / 4 + pi * p.y / 4), -cx * (pi * cy / 4 + pi / 4)}}};
}

std::array<double, 2> ManufacturedProblem::velocity_laplacian(Point2 p) const {
  const double c = std::cos(pi * p.y / 2);
  const double sx = std::sin(pi * p.x / 2), cx = std::cos(pi * p.x / 2);
  const double sy = std::sin(pi * p.y), cy = std::cos(pi * p.y);
  return {-pi * pi / 4 * sx * (c * c + 2 * cy), pi * pi / 4 * cx * (1.25 * sy + pi * p.y / 4)};
}

double ManufacturedProblem::pressure(Point2 p) const {
  return pi / 4 * std::cos(pi * p.x / 2) * (p.y - 1 - std::cos(pi * p.y));
}

std::array<double, 2> ManufacturedProblem::pressure_grad(Point2 p) const {
  const double sx = std::sin(pi * p.x / 2), cx = std::cos(pi * p.x / 2);
  return {-pi * pi / 8 * sx * (p.y - 1 - std::cos(pi * p.y)), pi / 4 * cx * (1 + pi * std::sin(pi * p.y))};
}

double ManufacturedProblem::head(Point2 p) const { return pi * p.y / 4 * std::cos(pi * p.x / 2); }

std::array<double, 2> ManufacturedProblem::head_grad(Point2 p) const {
  return {-pi * pi * p.y / 8 * std::sin(pi * p.x / 2), pi / 4 * std::cos(pi * p.x / 2)};
}

double ManufacturedProblem::head_laplacian(Point2 p) const {
  return -pi * pi * pi * p.y / 16 * std::cos(pi * p.x / 2);
}

FieldSample ManufacturedProblem::velocity_sample(Point2 x) const {
  FieldSample s;
  s.value = velocity(x);
  s.grad = velocity_grad(x);
  return s;
}

FieldSample ManufacturedProblem::head_sample(Point2 x) const {
  FieldSample s;
  s.value = {head(x), 0.0};
  s.grad[0] = head_grad(x);
  return s;
}

std::array<double, 2> ManufacturedProblem::fluid_forcing(Point2 x) const {
  const auto u = velocity(x);
  const auto g = velocity_grad(x);
  const auto lap = velocity_laplacian(x);
  const auto gp = pressure_grad(x);
  std::array<double, 2> f{};
  for (int d = 0; d < 2; ++d)
    f[d] = -params_.nu * lap[d] + gp[d] + params_.rho * (u[0] * g[d][0] + u[1] * g[d][1]);
  return f;
}

double ManufacturedProblem::porous_source(Point2 x) const {
  return -params_.conductivity / params_.porosity * head_laplacian(x);
}

std::string to_string(Variable v) {
  switch (v) {
    case Variable::Phi: return "phi";
    case Variable::U: return "u";
    case Variable::V: return "v";
    case Variable::P: return "p";
  }
  return "?";
}

std::string to_string(Norm n) { return n == Norm::L2 ? "L2" : "H1"; }

Norm energy_norm(Variable v) { return v == Variable::P ? Norm::L2 : Norm::H1; }

double ErrorReport::get(Variable var, Norm norm) const {
  const bool l2 = norm == Norm::L2;
  switch (var) {
    case Variable::Phi: return l2 ? phi_l2 : phi_h1;
    case Variable::U: return l2 ? u_l2 : u_h1;
    case Variable::V: return l2 ? v_l2 : v_h1;
    case Variable::P:
      if (!l2) throw std::invalid_argument("pressure has no H1 error");
      return p_l2;
  }
  return 0.0;
}

namespace {

/// Cellwise integral in parallel, summed serially in cell order.
template <class Integrand>
double integrate_cells(const TriMesh& mesh, int quad_degree, Integrand&& f) {
  const TriangleRule rule = quad_rule_tri(quad_degree);
  std::vector<double> per_cell(mesh.num_cells(), 0.0);
  for_each_index(Exec::Parallel, mesh.num_cells(), [&](std::ptrdiff_t c) {
    const int cell = static_cast<int>(c);
    const double jdet = std::abs(CellGeometry(mesh, cell).det);
    double s = 0.0;
    for (std::size_t q = 0; q < rule.weights.size(); ++q)
      s += rule.weights[q] * f(cell, rule.points[q], mesh.map(cell, rule.points[q]));
    per_cell[c] = s * jdet;
  });
  double total = 0.0;
  for (double v : per_cell) total += v;
  return total;
}

}  // namespace

double l2_error(const DiscreteField& field, int component, const ScalarFunction& exact, int quad_degree) {
  const double s = integrate_cells(field.mesh(), quad_degree, [&](int cell, const auto& bary, Point2 x) {
    const double e = eval_field_in_cell(field, cell, bary).value[component] - exact(x);
    return e * e;
  });
  return std::sqrt(s);
}

double h1_error(const DiscreteField& field, int component,
                const std::function<std::array<double, 2>(Point2)>& exact_grad, int quad_degree) {
  const double s = integrate_cells(field.mesh(), quad_degree, [&](int cell, const auto& bary, Point2 x) {
    const auto g = eval_field_in_cell(field, cell, bary).grad[component];
    const auto ge = exact_grad(x);
    return (g[0] - ge[0]) * (g[0] - ge[0]) + (g[1] - ge[1]) * (g[1] - ge[1]);
  });
  return std::sqrt(s);
}

ErrorReport error_norms(const CoupledState& state, const ManufacturedProblem& mms, int quad_degree) {
  ErrorReport r;
  r.n = state.velocity.mesh().subdivisions();
  r.phi_l2 = l2_error(state.head, 0, [&](Point2 x) { return mms.head(x); }, quad_degree);
  r.phi_h1 = h1_error(state.head, 0, [&](Point2 x) { return mms.head_grad(x); }, quad_degree);
  for (int c = 0; c < 2; ++c) {
    const double l2 = l2_error(state.velocity, c, [&](Point2 x) { return mms.velocity(x)[c]; }, quad_degree);
    const double h1 = h1_error(state.velocity, c, [&](Point2 x) { return mms.velocity_grad(x)[c]; }, quad_degree);
    (c == 0 ? r.u_l2 : r.v_l2) = l2;
    (c == 0 ? r.u_h1 : r.v_h1) = h1;
  }
  r.p_l2 = l2_error(state.pressure, 0, [&](Point2 x) { return mms.pressure(x); }, quad_degree);
  return r;
}

std::optional<double> ConvergenceTable::rate(std::size_t row, Variable var, Norm norm) const {
  if (row >= rates.size() || !rates[row]) return std::nullopt;
  return rates[row]->get(var, norm);
}

ConvergenceTable rate_table(std::vector<ErrorReport> reports) {
  if (reports.size() < 2) throw InsufficientData("rate_table: need at least two error reports");
  ConvergenceTable t;
  t.rates.emplace_back();
  for (std::size_t i = 1; i < reports.size(); ++i) {
    const ErrorReport &a = reports[i - 1], &b = reports[i];
    if (a.n == b.n) throw InsufficientData("rate_table: consecutive reports on the same mesh");
    const double lh = std::log(a.h() / b.h());
    auto r = [&](double ea, double eb) { return std::log(ea / eb) / lh; };
    ErrorReport rr;
    rr.n = b.n;
    rr.stage = "rate";
    rr.phi_l2 = r(a.phi_l2, b.phi_l2);
    rr.phi_h1 = r(a.phi_h1, b.phi_h1);
    rr.u_l2 = r(a.u_l2, b.u_l2);
    rr.u_h1 = r(a.u_h1, b.u_h1);
    rr.v_l2 = r(a.v_l2, b.v_l2);
    rr.v_h1 = r(a.v_h1, b.v_h1);
    rr.p_l2 = r(a.p_l2, b.p_l2);
    t.rates.emplace_back(rr);
  }
  t.reports = std::move(reports);
  return t;
}

}  // namespace nsdarcy
