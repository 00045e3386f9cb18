#include "nsdarcy/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "nsdarcy/errors.hpp"

namespace nsdarcy {

void IdentityPreconditioner::apply(std::span<const double> r, std::span<double> z) const {
  std::copy(r.begin(), r.end(), z.begin());
}

JacobiPreconditioner::JacobiPreconditioner(const CsrMatrix& a) : inv_diag_(a.diagonal()) {
  for (double& d : inv_diag_) {
    if (d == 0.0) throw Singular("Jacobi: zero diagonal entry");
    d = 1.0 / d;
  }
}

void JacobiPreconditioner::apply(std::span<const double> r, std::span<double> z) const {
  for (std::size_t i = 0; i < r.size(); ++i) z[i] = inv_diag_[i] * r[i];
}

IncompleteCholesky::IncompleteCholesky(const CsrMatrix& a, double droptol) : droptol_(droptol) {
  if (a.rows() != a.cols()) throw DimensionMismatch("ichol: matrix not square");
  double amax = 0.0;
  for (double v : a.values()) amax = std::max(amax, std::abs(v));
  if (asymmetry(a) > 1e-12 * std::max(1.0, amax)) throw NotSymmetric("ichol: matrix is not symmetric");

  const int n = a.rows();
  const auto rp = a.row_ptr();
  const auto ci = a.col_idx();
  const auto av = a.values();
  const std::vector<double> adiag = a.diagonal();

  // Columns of L computed so far: col_rows[k] / col_vals[k] hold l_jk, j > k.
  std::vector<std::vector<int>> col_rows(n);
  std::vector<std::vector<double>> col_vals(n);
  std::vector<double> ldiag(n, 0.0);
  std::vector<double> work(n, 0.0);
  std::vector<char> used(n, 0);
  TripletList lt;

  for (int i = 0; i < n; ++i) {
    std::priority_queue<int, std::vector<int>, std::greater<>> pending;
    double wdiag = 0.0;
    for (int k = rp[i]; k < rp[i + 1]; ++k) {
      const int j = ci[k];
      if (j < i) {
        work[j] = av[k];
        used[j] = 1;
        pending.push(j);
      } else if (j == i) {
        wdiag = av[k];
      }
    }
    std::vector<std::pair<int, double>> kept;
    while (!pending.empty()) {
      const int k = pending.top();
      pending.pop();
      if (!used[k]) continue;
      used[k] = 0;
      const double lik = work[k] / ldiag[k];
      work[k] = 0.0;
      if (std::abs(lik) < droptol * std::sqrt(std::abs(adiag[i]))) continue;
      kept.emplace_back(k, lik);
      wdiag -= lik * lik;
      for (std::size_t q = 0; q < col_rows[k].size(); ++q) {
        const int j = col_rows[k][q];
        if (j >= i) continue;
        if (!used[j]) {
          used[j] = 1;
          work[j] = 0.0;
          pending.push(j);
        }
        work[j] -= lik * col_vals[k][q];
      }
    }
    if (!(wdiag > 0.0)) {
      wdiag = std::abs(adiag[i]) > 0.0 ? std::abs(adiag[i]) : 1.0;
      ++pivot_shifts_;
    }
    ldiag[i] = std::sqrt(wdiag);
    for (const auto& [k, v] : kept) {
      lt.add(i, k, v);
      col_rows[k].push_back(i);
      col_vals[k].push_back(v);
    }
    lt.add(i, i, ldiag[i]);
  }
  lower_ = CsrMatrix::from_triplets(n, n, lt);
  upper_ = lower_.transpose();
}

void IncompleteCholesky::apply(std::span<const double> r, std::span<double> z) const {
  const int n = lower_.rows();
  {
    const auto rp = lower_.row_ptr();
    const auto ci = lower_.col_idx();
    const auto v = lower_.values();
    for (int i = 0; i < n; ++i) {
      double s = r[i];
      const int last = rp[i + 1] - 1;  // diagonal is the last entry
      for (int k = rp[i]; k < last; ++k) s -= v[k] * z[ci[k]];
      z[i] = s / v[last];
    }
  }
  const auto rp = upper_.row_ptr();
  const auto ci = upper_.col_idx();
  const auto v = upper_.values();
  for (int i = n - 1; i >= 0; --i) {
    double s = z[i];
    const int first = rp[i];  // diagonal is the first entry
    for (int k = first + 1; k < rp[i + 1]; ++k) s -= v[k] * z[ci[k]];
    z[i] = s / v[first];
  }
}

std::unique_ptr<IncompleteCholesky> ichol(const CsrMatrix& a, double droptol) {
  return std::make_unique<IncompleteCholesky>(a, droptol);
}

BlockTriangularPreconditioner::BlockTriangularPreconditioner(const CsrMatrix& system, std::vector<Block> blocks)
    : blocks_(std::move(blocks)) {
  int expected = 0;
  for (const Block& b : blocks_) {
    if (b.offset != expected) throw DimensionMismatch("BlockTriangular: blocks must tile the system");
    if (!b.solver && static_cast<int>(b.inv_diag.size()) != b.size)
      throw DimensionMismatch("BlockTriangular: block needs a solver or a diagonal");
    expected += b.size;
  }
  if (expected != system.rows() || system.rows() != system.cols())
    throw DimensionMismatch("BlockTriangular: blocks do not cover the system");
  const auto rp = system.row_ptr();
  const auto ci = system.col_idx();
  const auto v = system.values();
  for (const Block& b : blocks_) {
    const int end = b.offset + b.size;
    TripletList t;
    for (int r = b.offset; r < end; ++r)
      for (int k = rp[r]; k < rp[r + 1]; ++k)
        if (ci[k] >= end) t.add(r - b.offset, ci[k], v[k]);
    upper_rows_.push_back(CsrMatrix::from_triplets(b.size, system.cols(), t));
  }
}

void BlockTriangularPreconditioner::apply(std::span<const double> r, std::span<double> z) const {
  std::fill(z.begin(), z.end(), 0.0);
  for (std::size_t bi = blocks_.size(); bi-- > 0;) {
    const Block& b = blocks_[bi];
    std::vector<double> t(r.begin() + b.offset, r.begin() + b.offset + b.size);
    const std::vector<double> u = spmv(upper_rows_[bi], std::span<const double>(z.data(), z.size()));
    for (int i = 0; i < b.size; ++i) t[i] -= u[i];
    std::span<double> zb = z.subspan(b.offset, b.size);
    if (b.solver) {
      b.solver->apply(t, zb);
    } else {
      for (int i = 0; i < b.size; ++i) zb[i] = b.inv_diag[i] * t[i];
    }
  }
}

namespace {

void check_square(const CsrMatrix& a, std::size_t nb, const char* who) {
  if (a.rows() != a.cols() || static_cast<int>(nb) != a.rows())
    throw DimensionMismatch(std::string(who) + ": dimensions do not match");
}

}  // namespace

std::pair<std::vector<double>, SolveReport> pcg(const CsrMatrix& a, std::span<const double> b,
                                                const Preconditioner& m, IterativeControl ctl) {
  check_square(a, b.size(), "pcg");
  const std::size_t n = b.size();
  std::vector<double> x(n, 0.0), r(b.begin(), b.end()), z(n), p(n), q(n);
  SolveReport rep;
  const double bnorm = norm2(b);
  const double target = ctl.tol * (bnorm > 0.0 ? bnorm : 1.0);
  double rnorm = bnorm;
  if (rnorm <= target) {
    rep.converged = true;
    rep.final_residual = bnorm > 0.0 ? rnorm / bnorm : rnorm;
    return {x, rep};
  }
  m.apply(r, z);
  p = z;
  double rz = dot(r, z);
  for (int it = 1; it <= ctl.maxit; ++it) {
    spmv(a, p, q);
    const double pq = dot(p, q);
    if (!(pq > 0.0)) throw NotSymmetric("pcg: matrix is not positive definite");
    const double alpha = rz / pq;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * q[i];
    }
    rnorm = norm2(r);
    rep.iterations = it;
    if (rnorm <= target) {
      rep.converged = true;
      break;
    }
    m.apply(r, z);
    const double rz_new = dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  rep.final_residual = bnorm > 0.0 ? rnorm / bnorm : rnorm;
  return {x, rep};
}

std::pair<std::vector<double>, SolveReport> gmres(const CsrMatrix& a, std::span<const double> b,
                                                  const Preconditioner& m, IterativeControl ctl) {
  check_square(a, b.size(), "gmres");
  const std::size_t n = b.size();
  const int restart = std::max(1, ctl.restart);
  std::vector<double> x(n, 0.0);
  SolveReport rep;
  const double r0 = norm2(b);
  if (r0 == 0.0) {
    rep.converged = true;
    return {x, rep};
  }
  const double target = ctl.tol * r0;
  std::vector<double> r(b.begin(), b.end()), w(n), z(n);
  double beta = r0;
  int total = 0;
  while (total < ctl.maxit) {
    std::vector<std::vector<double>> v(1, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i) v[0][i] = r[i] / beta;
    std::vector<std::vector<double>> h;
    std::vector<double> cs, sn, g{beta};
    int j = 0;
    double res = beta;
    for (; j < restart && total < ctl.maxit; ++j) {
      ++total;
      m.apply(v[j], z);
      spmv(a, z, w);
      std::vector<double> hj(j + 2, 0.0);
      for (int i = 0; i <= j; ++i) {  // modified Gram-Schmidt
        hj[i] = dot(w, v[i]);
        for (std::size_t k = 0; k < n; ++k) w[k] -= hj[i] * v[i][k];
      }
      hj[j + 1] = norm2(w);
      if (hj[j + 1] > 0.0) {
        v.emplace_back(n);
        for (std::size_t k = 0; k < n; ++k) v[j + 1][k] = w[k] / hj[j + 1];
      }
      for (int i = 0; i < j; ++i) {
        const double t = cs[i] * hj[i] + sn[i] * hj[i + 1];
        hj[i + 1] = -sn[i] * hj[i] + cs[i] * hj[i + 1];
        hj[i] = t;
      }
      const double d = std::hypot(hj[j], hj[j + 1]);
      const double c = d > 0.0 ? hj[j] / d : 1.0, s = d > 0.0 ? hj[j + 1] / d : 0.0;
      cs.push_back(c);
      sn.push_back(s);
      hj[j] = d;
      hj[j + 1] = 0.0;
      g.push_back(-s * g[j]);
      g[j] *= c;
      h.push_back(std::move(hj));
      res = std::abs(g[j + 1]);
      if (res < target || static_cast<int>(v.size()) == j + 1) {
        ++j;
        break;
      }
    }
    // Back substitution for y, then x += M^{-1} V y.
    std::vector<double> y(j, 0.0);
    for (int i = j - 1; i >= 0; --i) {
      double s = g[i];
      for (int k = i + 1; k < j; ++k) s -= h[k][i] * y[k];
      y[i] = s / h[i][i];
    }
    std::fill(w.begin(), w.end(), 0.0);
    for (int i = 0; i < j; ++i)
      for (std::size_t k = 0; k < n; ++k) w[k] += y[i] * v[i][k];
    m.apply(w, z);
    for (std::size_t k = 0; k < n; ++k) x[k] += z[k];
    spmv(a, x, w);
    for (std::size_t k = 0; k < n; ++k) r[k] = b[k] - w[k];
    beta = norm2(r);
    rep.iterations = total;
    rep.final_residual = beta / r0;
    if (beta < target) {
      rep.converged = true;
      break;
    }
  }
  return {x, rep};
}

}  // namespace nsdarcy
