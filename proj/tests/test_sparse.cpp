#include <cmath>
#include <random>

#include "doctest.h"
#include "nsdarcy/errors.hpp"
#include "nsdarcy/forms.hpp"
#include "nsdarcy/linear.hpp"
#include "nsdarcy/parallel.hpp"
#include "nsdarcy/solvers.hpp"
#include "nsdarcy/sparse.hpp"

using namespace nsdarcy;

namespace {

using Dense = std::vector<std::vector<double>>;

Dense random_sparse(int n, double fill, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> p(0.0, 1.0);
  Dense a(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (p(rng) < fill) a[i][j] = u(rng);
  return a;
}

Dense random_spd(int n, std::mt19937& rng) {
  Dense b = random_sparse(n, 0.2, rng);
  Dense a(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) a[i][j] += b[k][i] * b[k][j];
    }
  for (int i = 0; i < n; ++i) a[i][i] += 1.0;
  return a;
}

std::vector<double> dense_mv(const Dense& a, const std::vector<double>& x) {
  std::vector<double> y(a.size(), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < x.size(); ++j) y[i] += a[i][j] * x[j];
  return y;
}

// Gaussian elimination with partial pivoting.
std::vector<double> dense_solve(Dense a, std::vector<double> b) {
  const int n = static_cast<int>(b.size());
  for (int k = 0; k < n; ++k) {
    int piv = k;
    for (int i = k + 1; i < n; ++i)
      if (std::abs(a[i][k]) > std::abs(a[piv][k])) piv = i;
    std::swap(a[k], a[piv]);
    std::swap(b[k], b[piv]);
    for (int i = k + 1; i < n; ++i) {
      double f = a[i][k] / a[k][k];
      for (int j = k; j < n; ++j) a[i][j] -= f * a[k][j];
      b[i] -= f * b[k];
    }
  }
  std::vector<double> x(n);
  for (int i = n - 1; i >= 0; --i) {
    double s = b[i];
    for (int j = i + 1; j < n; ++j) s -= a[i][j] * x[j];
    x[i] = s / a[i][i];
  }
  return x;
}

Dense dense_cholesky(const Dense& a) {
  const int n = static_cast<int>(a.size());
  Dense l(n, std::vector<double>(n, 0.0));
  for (int j = 0; j < n; ++j) {
    double s = a[j][j];
    for (int k = 0; k < j; ++k) s -= l[j][k] * l[j][k];
    l[j][j] = std::sqrt(s);
    for (int i = j + 1; i < n; ++i) {
      double t = a[i][j];
      for (int k = 0; k < j; ++k) t -= l[i][k] * l[j][k];
      l[i][j] = t / l[j][j];
    }
  }
  return l;
}

double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

CsrMatrix laplacian_1d(int n) {
  TripletList t;
  for (int i = 0; i < n; ++i) {
    t.add(i, i, 2.0);
    if (i > 0) t.add(i, i - 1, -1.0);
    if (i + 1 < n) t.add(i, i + 1, -1.0);
  }
  return CsrMatrix::from_triplets(n, n, t);
}

}  // namespace

TEST_CASE("csr basics") {
  auto id = CsrMatrix::identity(5);
  std::vector<double> x{1, -2, 3, 0.5, 7};
  CHECK(spmv(id, x) == x);

  auto d = CsrMatrix::from_dense({{1, 0, 0}, {0, 2, 0}, {0, 0, 3}});
  CHECK(spmv(d, std::vector<double>{1, 1, 1}) == std::vector<double>{1, 2, 3});

  TripletList t;
  t.add(0, 1, 1.0);
  t.add(0, 1, 2.5);
  t.add(1, 0, -1.0);
  auto m = CsrMatrix::from_triplets(2, 2, t);
  CHECK(m.nnz() == 2);
  CHECK(m.at(0, 1) == 3.5);
  CHECK(m.at(1, 1) == 0.0);
  CHECK(m.transpose().at(1, 0) == 3.5);
  CHECK(asymmetry(m) == 4.5);
  CHECK(asymmetry(symmetric_part(m)) == 0.0);
}

TEST_CASE("spmv against dense") {
  std::mt19937 rng(1);
  auto dense = random_sparse(50, 0.1, rng);
  auto a = CsrMatrix::from_dense(dense);
  std::vector<double> x(50);
  std::uniform_real_distribution<double> u(-1, 1);
  for (double& v : x) v = u(rng);
  CHECK(max_diff(spmv(a, x), dense_mv(dense, x)) < 1e-13);
  CHECK(max_diff(spmv_serial(a, x), dense_mv(dense, x)) < 1e-13);

  auto sub = submatrix(a, 10, 5, 20, 7);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 7; ++j) CHECK(sub.at(i, j) == dense[10 + i][20 + j]);

  auto sum = add(a, a.transpose(), 2.0, -1.0);
  for (int i = 0; i < 50; ++i)
    for (int j = 0; j < 50; ++j) CHECK(std::abs(sum.at(i, j) - (2 * dense[i][j] - dense[j][i])) < 1e-15);
}

TEST_CASE("parallel spmv is bit-identical") {
  std::mt19937 rng(2);
  auto a = CsrMatrix::from_dense(random_sparse(300, 0.05, rng));
  std::vector<double> x(300);
  std::uniform_real_distribution<double> u(-1, 1);
  for (double& v : x) v = u(rng);
  int saved = assembly_threads();
  set_assembly_threads(4);
  auto par = spmv(a, x);
  set_assembly_threads(saved);
  CHECK(par == spmv_serial(a, x));
}

TEST_CASE("symmetric elimination") {
  auto a = CsrMatrix::from_dense({{4, 1, 0}, {1, 4, 1}, {0, 1, 4}});
  std::vector<int> fixed{0};
  std::vector<double> vals{2.0};
  EliminatedSystem sys(a, fixed, vals);
  CHECK(asymmetry(sys.matrix()) == 0.0);
  CHECK(sys.matrix().at(0, 0) == 1.0);
  CHECK(sys.matrix().at(1, 0) == 0.0);
  auto rhs = sys.rhs(std::vector<double>{0, 6, 5});
  CHECK(rhs == std::vector<double>{2, 4, 5});
  auto x = direct_solve(sys.matrix(), rhs);
  auto full = spmv(a, x);
  CHECK(x[0] == doctest::Approx(2.0));
  CHECK(std::abs(full[1] - 6) < 1e-13);
  CHECK(std::abs(full[2] - 5) < 1e-13);
}

TEST_CASE("incomplete cholesky") {
  SUBCASE("diagonal is exact") {
    auto d = CsrMatrix::from_dense({{4, 0, 0}, {0, 9, 0}, {0, 0, 1}});
    IncompleteCholesky ic(d, 0.5);
    CHECK(ic.lower().at(0, 0) == 2.0);
    CHECK(ic.lower().at(1, 1) == 3.0);
    CHECK(ic.lower().nnz() == 3);
  }

  SUBCASE("droptol zero reproduces A") {
    std::mt19937 rng(5);
    auto dense = random_spd(20, rng);
    auto a = CsrMatrix::from_dense(dense);
    IncompleteCholesky ic(a, 0.0);
    CHECK(ic.pivot_shifts() == 0);
    auto l = ic.lower().to_dense();
    auto ref = dense_cholesky(dense);
    double err = 0.0;
    for (int i = 0; i < 20; ++i)
      for (int j = 0; j < 20; ++j) {
        double s = 0.0;
        for (int k = 0; k < 20; ++k) s += l[i][k] * l[j][k];
        err = std::max(err, std::abs(s - dense[i][j]));
        CHECK(std::abs(l[i][j] - ref[i][j]) < 1e-12);
      }
    CHECK(err < 1e-12);
  }

  SUBCASE("tridiagonal has no fill") {
    auto a = laplacian_1d(30);
    IncompleteCholesky ic(a, 1e-3);
    auto l = ic.lower().to_dense();
    auto ref = dense_cholesky(a.to_dense());
    for (int i = 0; i < 30; ++i)
      for (int j = 0; j < 30; ++j) CHECK(std::abs(l[i][j] - ref[i][j]) < 1e-13);
  }

  SUBCASE("rejects nonsymmetric input") {
    auto a = CsrMatrix::from_dense({{2, 1}, {0, 2}});
    CHECK_THROWS_AS(IncompleteCholesky(a, 1e-3), NotSymmetric);
  }
}

TEST_CASE("pcg") {
  auto id = CsrMatrix::identity(10);
  std::vector<double> b(10, 1.0);
  IdentityPreconditioner none;
  auto [x1, r1] = pcg(id, b, none);
  CHECK(r1.iterations == 1);
  CHECK(x1 == b);

  std::mt19937 rng(9);
  auto dense = random_spd(30, rng);
  auto a = CsrMatrix::from_dense(dense);
  std::vector<double> rhs(30);
  std::uniform_real_distribution<double> u(-1, 1);
  for (double& v : rhs) v = u(rng);
  auto ref = dense_solve(dense, rhs);
  auto ic = ichol(a, 1e-3);
  auto [x2, r2] = pcg(a, rhs, *ic, {1e-12, 1000, 0});
  CHECK(r2.converged);
  CHECK(max_diff(x2, ref) < 1e-8);

  auto lap = laplacian_1d(100);
  std::vector<double> ones(100, 1.0);
  auto [xa, plain] = pcg(lap, ones, none, {1e-9, 1000, 0});
  auto [xb, prec] = pcg(lap, ones, *ichol(lap, 1e-3), {1e-9, 1000, 0});
  CHECK(plain.converged);
  CHECK(prec.converged);
  CHECK(prec.iterations < plain.iterations);
  CHECK(max_diff(xa, xb) < 1e-5);
}

TEST_CASE("pcg on the darcy stiffness") {
  auto m = build_coupled_mesh(64);
  auto map = build_dofmap(m.porous, {Family::P1, 1});
  auto a = assemble_ap(*map, {});
  auto fixed = map->dirichlet_dofs();
  std::vector<double> vals(fixed.size(), 0.0);
  EliminatedSystem sys(a, fixed, vals);
  std::vector<double> load(map->size(), 1.0 / (64.0 * 64.0));
  auto rhs = sys.rhs(load);
  auto [x, rep] = pcg(sys.matrix(), rhs, *ichol(sys.matrix(), 1e-3), {1e-9, 1000, 0});
  CHECK(rep.converged);
  CHECK(rep.iterations < 280);
  MESSAGE("pcg iterations on n=64 a_p: " << rep.iterations);
}

TEST_CASE("gmres") {
  auto id = CsrMatrix::identity(8);
  std::vector<double> b{1, 2, 3, 4, 5, 6, 7, 8};
  IdentityPreconditioner none;
  auto [x1, r1] = gmres(id, b, none);
  CHECK(r1.iterations == 1);
  CHECK(max_diff(x1, b) < 1e-14);

  std::mt19937 rng(13);
  auto dense = random_sparse(40, 0.2, rng);
  for (int i = 0; i < 40; ++i) dense[i][i] += 4.0;
  auto a = CsrMatrix::from_dense(dense);
  std::vector<double> rhs(40);
  std::uniform_real_distribution<double> u(-1, 1);
  for (double& v : rhs) v = u(rng);
  auto ref = dense_solve(dense, rhs);
  JacobiPreconditioner jac(a);
  auto [x2, r2] = gmres(a, rhs, jac, {1e-12, 1000, 30});
  CHECK(r2.converged);
  CHECK(max_diff(x2, ref) < 1e-8);

  auto saddle = CsrMatrix::from_dense({{2, 1}, {1, 0}});
  auto [x3, r3] = gmres(saddle, std::vector<double>{3, 1}, none);
  CHECK(r3.converged);
  CHECK(std::abs(x3[0] - 1) < 1e-12);
  CHECK(std::abs(x3[1] - 1) < 1e-12);
}

TEST_CASE("direct solver") {
  auto id = CsrMatrix::identity(4);
  std::vector<double> b{1, 2, 3, 4};
  CHECK(direct_solve(id, b) == b);

  auto perm = CsrMatrix::from_dense({{0, 1, 0, 0}, {0, 0, 0, 1}, {1, 0, 0, 0}, {0, 0, 1, 0}});
  // P x = b  =>  x = P^T b
  auto x = direct_solve(perm, b);
  CHECK(x == std::vector<double>{3, 1, 4, 2});

  DirectSolver lu(CsrMatrix::from_dense({{2, 1}, {1, 0}}));
  auto s = lu.solve(std::vector<double>{3, 1});
  CHECK(std::abs(s[0] - 1) < 1e-15);
  CHECK(std::abs(s[1] - 1) < 1e-15);
  auto s2 = lu.solve(std::vector<double>{0, 1});
  CHECK(std::abs(s2[0] - 1) < 1e-15);
  CHECK(std::abs(s2[1] + 2) < 1e-15);

  CHECK_THROWS_AS(DirectSolver(CsrMatrix::from_dense({{1, 1}, {1, 1}})), Singular);
}

TEST_CASE("block triangular preconditioner") {
  // [A B^T; B 0] with a diagonal pressure scaling
  auto a = CsrMatrix::from_dense({{4, 1, 1}, {1, 4, 0}, {1, 0, -0.5}});
  auto id2 = std::make_shared<DirectSolver>(submatrix(a, 0, 2, 0, 2));
  BlockTriangularPreconditioner p(a, {{0, 2, id2, {}}, {2, 1, nullptr, {-2.0}}});
  std::vector<double> r{1, 2, 3}, z(3);
  p.apply(r, z);
  CHECK(z[2] == doctest::Approx(-6.0));
  // top block: A00 z0 = r0 - A01 z1
  auto top = dense_solve({{4, 1}, {1, 4}}, {1 - 1 * -6.0, 2});
  CHECK(z[0] == doctest::Approx(top[0]));
  CHECK(z[1] == doctest::Approx(top[1]));

  auto [x, rep] = gmres(a, r, p, {1e-12, 100, 10});
  CHECK(rep.converged);
  CHECK(max_diff(x, dense_solve(a.to_dense(), r)) < 1e-10);
}

TEST_CASE("linear solver facade") {
  auto lap = laplacian_1d(50);
  std::vector<double> b(50, 1.0);
  SolverOptions direct;
  SolverOptions iter;
  iter.mode = SolverMode::Iterative;
  auto xd = LinearSolver::spd(lap, direct).solve(b);
  SolveReport rep;
  auto xi = LinearSolver::spd(lap, iter).solve(b, &rep);
  CHECK(rep.converged);
  CHECK(max_diff(xd, xi) < 1e-7);

  SolverOptions starved = iter;
  starved.maxit = 1;
  starved.droptol = 0.9;
  CHECK_THROWS_AS(LinearSolver::spd(lap, starved).solve(b), NotConverged);
}
