#include <cmath>

#include "doctest.h"
#include "nsdarcy/decoupled.hpp"
#include "nsdarcy/errors.hpp"

using namespace nsdarcy;

namespace {

double max_abs_diff(const DiscreteField& a, const DiscreteField& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.coeffs.size(); ++i) d = std::max(d, std::abs(a.coeffs[i] - b.coeffs[i]));
  return d;
}

std::vector<double> relative_gaps(const ErrorReport& a, const ErrorReport& b) {
  std::vector<double> out;
  for (Variable v : kVariables) out.push_back(std::abs(a.get(v, energy_norm(v)) / b.get(v, energy_norm(v)) - 1));
  return out;
}

}  // namespace

TEST_CASE("algorithm ids") {
  CHECK(parse_algorithm("C") == AlgorithmId::C);
  CHECK(to_string(AlgorithmId::D) == "D");
  CHECK_THROWS_AS(parse_algorithm("E"), ValidationError);
}

TEST_CASE("darcy step with exact flux converges") {
  ManufacturedProblem mms;
  auto exact = FieldSource::analytic([&](Point2 x) { return mms.velocity_sample(x); });
  for (int k : {1, 2}) {
    std::vector<double> errs;
    for (int n : {8, 16}) {
      auto m = build_coupled_mesh(n);
      auto sp = make_spaces(m, k);
      auto phi = solve_darcy_step(sp, {}, mms, exact);
      errs.push_back(h1_error(phi, 0, [&](Point2 x) { return mms.head_grad(x); }));
    }
    CHECK(std::log2(errs[0] / errs[1]) == doctest::Approx(k).epsilon(0.1));
  }

  auto m = build_coupled_mesh(4);
  auto sp = make_spaces(m, 1);
  ZeroProblem zero;
  DiscreteField u0(sp.velocity);
  auto phi = solve_darcy_step(sp, {}, zero, u0);
  for (double v : phi.coeffs) CHECK(v == 0.0);
}

TEST_CASE("ns step from the exact state") {
  ManufacturedProblem mms;
  auto exact_u = FieldSource::analytic([&](Point2 x) { return mms.velocity_sample(x); });
  auto exact_phi = FieldSource::analytic([&](Point2 x) { return mms.head_sample(x); });
  std::vector<double> errs;
  for (int n : {8, 16}) {
    auto m = build_coupled_mesh(n);
    auto sp = make_spaces(m, 2);
    auto [u, p] = solve_ns_step(sp, {}, mms, exact_u, exact_phi, NsRhs::Newton);
    errs.push_back(h1_error(u, 0, [&](Point2 x) { return mms.velocity_grad(x)[0]; }));
    auto coupled = solve_coupled(m, 2, {}, mms).first;
    const double fe = h1_error(coupled.velocity, 0, [&](Point2 x) { return mms.velocity_grad(x)[0]; });
    CHECK(errs.back() / fe == doctest::Approx(1.0).epsilon(0.1));
  }
  CHECK(std::log2(errs[0] / errs[1]) == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("newton step about zero is a stokes solve") {
  ManufacturedProblem mms;
  auto m = build_coupled_mesh(4);
  auto sp = make_spaces(m, 1);
  DiscreteField zero_u(sp.velocity);
  DiscreteField head(sp.head);
  for (std::size_t i = 0; i < head.coeffs.size(); ++i) head.coeffs[i] = 0.1 * static_cast<double>(i);
  // rho enters only through convection once rho g is held fixed
  ModelParams heavy;
  heavy.rho = 5.0;
  heavy.gravity = 0.2;
  auto [u1, p1] = solve_ns_step(sp, {}, mms, zero_u, head, NsRhs::Newton);
  auto [u2, p2] = solve_ns_step(sp, heavy, mms, zero_u, head, NsRhs::Newton);
  CHECK(max_abs_diff(u1, u2) < 1e-13);
  CHECK(max_abs_diff(p1, p2) < 1e-13);
  auto [u3, p3] = solve_ns_step(sp, heavy, mms, u1, head, NsRhs::Newton);
  CHECK(max_abs_diff(u1, u3) > 1e-6);
}

TEST_CASE("two-level runs") {
  ManufacturedProblem mms;
  const MeshSchedule sched({2, 8});
  auto fine = build_coupled_mesh(8);
  auto fe = error_norms(solve_coupled(fine, 1, {}, mms).first, mms);

  auto a = run_multilevel(AlgorithmId::A, sched, 1, {}, mms);
  auto b = run_multilevel(AlgorithmId::B, sched, 1, {}, mms);
  auto c = run_multilevel(AlgorithmId::C, sched, 1, {}, mms);
  auto d = run_multilevel(AlgorithmId::D, sched, 1, {}, mms);

  SUBCASE("accounting") {
    CHECK(a.levels.size() == 2);
    const auto& la = a.levels[1];
    CHECK(la.factorizations == 2);
    CHECK(la.solves == 4);
    CHECK(la.steps.size() == 4);
    CHECK(b.levels[1].factorizations == 2);
    CHECK(b.levels[1].solves == 4);
    CHECK(c.levels[1].factorizations == 2);
    CHECK(c.levels[1].solves == 2);
    CHECK(d.levels[1].factorizations == 2);
    CHECK(d.levels[1].solves == 3);
    CHECK(a.levels[1].intermediate.has_value());
    CHECK(!c.levels[1].intermediate.has_value());
  }

  SUBCASE("A and B track the coupled solve") {
    auto ea = level_errors(a, mms).back();
    auto eb = level_errors(b, mms).back();
    for (double g : relative_gaps(ea, fe)) CHECK(g < 0.02);
    for (double g : relative_gaps(eb, ea)) CHECK(g < 0.01);
    auto ia = level_errors(a, mms, true).back();
    CHECK(ia.phi_h1 > ea.phi_h1);
  }

  SUBCASE("C reuses the A and B intermediate steps") {
    auto ec = level_errors(c, mms).back();
    auto ia = level_errors(a, mms, true).back();
    auto ib = level_errors(b, mms, true).back();
    CHECK(ec.phi_h1 == doctest::Approx(ia.phi_h1).epsilon(1e-12));
    CHECK(ec.u_h1 == doctest::Approx(ib.u_h1).epsilon(1e-12));
    CHECK(ec.p_l2 == doctest::Approx(ib.p_l2).epsilon(1e-12));
  }

  SUBCASE("D keeps the intermediate head") {
    const auto& l = d.levels[1];
    REQUIRE(l.intermediate.has_value());
    CHECK(max_abs_diff(l.final.head, l.intermediate->head) == 0.0);
  }

  SUBCASE("identical runs compare to one") {
    auto rows = compare_runs(level_errors(a, mms), level_errors(a, mms));
    CHECK(rows.size() == 7);
    for (const auto& r : rows) CHECK(r.ratio == 1.0);
    std::vector<ErrorReport> wrong{fe};
    wrong[0].n = 9;
    CHECK_THROWS_AS(compare_runs(level_errors(a, mms), wrong), MeshMismatch);
  }
}

TEST_CASE("algorithm C does not depend on step order") {
  ManufacturedProblem mms;
  auto coarse = build_coupled_mesh(2);
  auto fine = build_coupled_mesh(8);
  auto prev = solve_coupled(coarse, 1, {}, mms).first;
  auto sp = make_spaces(fine, 1);
  SolverOptions opts;
  auto phi = solve_darcy_step(sp, {}, mms, prev.velocity, opts);
  auto [u, p] = solve_ns_step(sp, {}, mms, prev.velocity, prev.head, NsRhs::Newton, nullptr, opts);
  auto lvl = run_level(AlgorithmId::C, fine, 1, prev, {}, mms, opts);
  CHECK(max_abs_diff(lvl.final.head, phi) < 1e-13);
  CHECK(max_abs_diff(lvl.final.velocity, u) < 1e-13);
  CHECK(max_abs_diff(lvl.final.pressure, p) < 1e-13);
}

TEST_CASE("level on the same mesh as the previous state") {
  ManufacturedProblem mms;
  auto m = build_coupled_mesh(6);
  auto [state, rep] = solve_coupled(m, 1, {}, mms);
  for (AlgorithmId id : {AlgorithmId::A, AlgorithmId::B, AlgorithmId::C, AlgorithmId::D}) {
    auto lvl = run_level(id, m, 1, state, {}, mms, {});
    CHECK(max_abs_diff(lvl.final.velocity, state.velocity) < 1e-6);
    CHECK(max_abs_diff(lvl.final.pressure, state.pressure) < 1e-6);
    CHECK(max_abs_diff(lvl.final.head, state.head) < 1e-6);
  }
}

TEST_CASE("failures name the level and step") {
  ManufacturedProblem mms;
  MultilevelOptions opts;
  opts.coupled.maxit = 1;
  try {
    run_multilevel(AlgorithmId::A, MeshSchedule({2, 4}), 1, {}, mms, opts);
    FAIL("expected StepFailure");
  } catch (const StepFailure& e) {
    CHECK(e.level() == 0);
    CHECK(e.step() == "coupled");
  }
  MultilevelOptions starved;
  starved.solver.mode = SolverMode::Iterative;
  starved.solver.maxit = 1;
  starved.solver.droptol = 0.9;
  try {
    run_multilevel(AlgorithmId::A, MeshSchedule({2, 8}), 1, {}, mms, starved);
    FAIL("expected StepFailure");
  } catch (const StepFailure& e) {
    CHECK(e.level() == 1);
    CHECK(!e.step().empty());
  }
}
