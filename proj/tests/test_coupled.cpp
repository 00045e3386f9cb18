#include <cmath>

#include "doctest.h"
#include "nsdarcy/coupled.hpp"
#include "nsdarcy/errors.hpp"
#include "nsdarcy/forms.hpp"

using namespace nsdarcy;

TEST_CASE("spaces") {
  auto m = build_coupled_mesh(2);
  auto s1 = make_spaces(m, 1);
  CHECK(s1.velocity->family().tag == Family::MiniVelocity);
  CHECK(s1.head->family().tag == Family::P1);
  auto s2 = make_spaces(m, 2);
  CHECK(s2.velocity->family().tag == Family::P2);
  CHECK(s2.head->family().tag == Family::P2);
  CHECK_THROWS_AS(make_spaces(m, 3), UnsupportedDegree);

  ManufacturedProblem mms;
  auto ev = velocity_dirichlet(*s1.velocity, mms);
  CHECK(ev.dofs.size() == 2 * s1.velocity->dirichlet_dofs().size());
  auto eh = head_dirichlet(*s1.head, mms);
  for (std::size_t i = 0; i < eh.dofs.size(); ++i) CHECK(eh.values[i] == mms.head(s1.head->location(eh.dofs[i])));
}

TEST_CASE("zero problem is a fixed point") {
  auto m = build_coupled_mesh(4);
  ZeroProblem zero;
  auto [state, report] = solve_coupled(m, 1, {}, zero);
  CHECK(report.converged);
  CHECK(report.iterations == 1);
  for (double v : state.velocity.coeffs) CHECK(v == 0.0);
  for (double v : state.head.coeffs) CHECK(v == 0.0);
}

TEST_CASE("coupled solve invariants") {
  const ModelParams params;
  ManufacturedProblem mms(params);
  for (int k : {1, 2}) {
    auto m = build_coupled_mesh(8);
    auto [state, report] = solve_coupled(m, k, params, mms);
    CHECK(report.converged);
    CHECK(report.iterations <= 10);
    CHECK(report.update_norms.back() < 1e-7);
    CHECK(report.factorizations == report.iterations);

    auto b = assemble_b(*state.velocity.dofmap, *state.pressure.dofmap);
    CHECK(norm_inf(spmv(b, state.velocity.coeffs)) <= 1e-9);
    CHECK(coupled_residual(m, state, params, mms) <= 1e-6);

    CoupledOptions iter;
    iter.solver.mode = SolverMode::Iterative;
    iter.solver.linear_tol = 1e-12;
    auto [istate, ireport] = solve_coupled(m, k, params, mms, iter);
    CHECK(ireport.converged);
    double diff = 0.0;
    for (std::size_t i = 0; i < state.velocity.coeffs.size(); ++i)
      diff = std::max(diff, std::abs(state.velocity.coeffs[i] - istate.velocity.coeffs[i]));
    for (std::size_t i = 0; i < state.pressure.coeffs.size(); ++i)
      diff = std::max(diff, std::abs(state.pressure.coeffs[i] - istate.pressure.coeffs[i]));
    for (std::size_t i = 0; i < state.head.coeffs.size(); ++i)
      diff = std::max(diff, std::abs(state.head.coeffs[i] - istate.head.coeffs[i]));
    CHECK(diff <= 1e-7);
    MESSAGE("k=" << k << " picard " << report.iterations << ", iterative diff " << diff);
  }
}

TEST_CASE("energy errors decrease under refinement") {
  ManufacturedProblem mms;
  for (int k : {1, 2}) {
    std::vector<ErrorReport> e;
    for (int n : {4, 8, 16}) {
      auto m = build_coupled_mesh(n);
      e.push_back(error_norms(solve_coupled(m, k, {}, mms).first, mms));
    }
    for (Variable v : kVariables)
      for (int i = 1; i < 3; ++i) CHECK(e[i].get(v, energy_norm(v)) < e[i - 1].get(v, energy_norm(v)));
  }
}

TEST_CASE("picard limits") {
  auto m = build_coupled_mesh(4);
  ManufacturedProblem mms;
  CoupledOptions starved;
  starved.maxit = 2;
  CHECK_THROWS_AS(solve_coupled(m, 1, {}, mms, starved), PicardDiverged);
}
