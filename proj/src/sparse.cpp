#include "nsdarcy/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "nsdarcy/errors.hpp"
#include "nsdarcy/parallel.hpp"

namespace nsdarcy {

CsrMatrix::CsrMatrix(int rows, int cols, std::vector<int> row_ptr, std::vector<int> col_idx,
                     std::vector<double> values)
    : rows_(rows), cols_(cols), row_ptr_(std::move(row_ptr)), col_idx_(std::move(col_idx)),
      values_(std::move(values)) {
  if (static_cast<int>(row_ptr_.size()) != rows_ + 1 || row_ptr_.front() != 0 ||
      row_ptr_.back() != static_cast<int>(col_idx_.size()) || col_idx_.size() != values_.size())
    throw DimensionMismatch("CsrMatrix: inconsistent storage");
  for (int r = 0; r < rows_; ++r)
    for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      if (col_idx_[k] < 0 || col_idx_[k] >= cols_) throw DimensionMismatch("CsrMatrix: column out of range");
      if (k > row_ptr_[r] && col_idx_[k] <= col_idx_[k - 1])
        throw DimensionMismatch("CsrMatrix: columns not sorted and unique");
    }
}

CsrMatrix CsrMatrix::identity(int n) {
  std::vector<int> rp(n + 1), ci(n);
  std::iota(rp.begin(), rp.end(), 0);
  std::iota(ci.begin(), ci.end(), 0);
  return CsrMatrix(n, n, std::move(rp), std::move(ci), std::vector<double>(n, 1.0));
}

CsrMatrix CsrMatrix::from_triplets(int rows, int cols, const TripletList& t) {
  const std::size_t m = t.size();
  // Stable bucket by row, then stable sort each row by column; duplicates are
  // summed in insertion order so the result is independent of how the list
  // was produced as long as its order is.
  std::vector<int> count(rows + 1, 0);
  for (std::size_t k = 0; k < m; ++k) {
    if (t.rows[k] < 0 || t.rows[k] >= rows || t.cols[k] < 0 || t.cols[k] >= cols)
      throw DimensionMismatch("from_triplets: index out of range");
    ++count[t.rows[k] + 1];
  }
  std::partial_sum(count.begin(), count.end(), count.begin());
  std::vector<int> order(m);
  {
    std::vector<int> next(count.begin(), count.end() - 1);
    for (std::size_t k = 0; k < m; ++k) order[next[t.rows[k]]++] = static_cast<int>(k);
  }
  std::vector<int> rp(rows + 1, 0), ci;
  std::vector<double> vals;
  ci.reserve(m / 2);
  vals.reserve(m / 2);
  for (int r = 0; r < rows; ++r) {
    auto first = order.begin() + count[r], last = order.begin() + count[r + 1];
    std::stable_sort(first, last, [&](int a, int b) { return t.cols[a] < t.cols[b]; });
    for (auto it = first; it != last;) {
      const int c = t.cols[*it];
      double v = 0.0;
      for (; it != last && t.cols[*it] == c; ++it) v += t.vals[*it];
      ci.push_back(c);
      vals.push_back(v);
    }
    rp[r + 1] = static_cast<int>(ci.size());
  }
  return CsrMatrix(rows, cols, std::move(rp), std::move(ci), std::move(vals));
}

CsrMatrix CsrMatrix::from_dense(const std::vector<std::vector<double>>& dense, double drop) {
  const int r = static_cast<int>(dense.size());
  const int c = r == 0 ? 0 : static_cast<int>(dense[0].size());
  TripletList t;
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j)
      if (std::abs(dense[i][j]) > drop) t.add(i, j, dense[i][j]);
  return from_triplets(r, c, t);
}

double CsrMatrix::at(int r, int c) const {
  const auto first = col_idx_.begin() + row_ptr_[r], last = col_idx_.begin() + row_ptr_[r + 1];
  const auto it = std::lower_bound(first, last, c);
  return (it != last && *it == c) ? values_[it - col_idx_.begin()] : 0.0;
}

std::vector<double> CsrMatrix::diagonal() const {
  std::vector<double> d(std::min(rows_, cols_), 0.0);
  for (int r = 0; r < static_cast<int>(d.size()); ++r) d[r] = at(r, r);
  return d;
}

CsrMatrix CsrMatrix::transpose() const {
  std::vector<int> rp(cols_ + 1, 0);
  for (int c : col_idx_) ++rp[c + 1];
  std::partial_sum(rp.begin(), rp.end(), rp.begin());
  std::vector<int> next(rp.begin(), rp.end() - 1), ci(values_.size());
  std::vector<double> vals(values_.size());
  for (int r = 0; r < rows_; ++r)
    for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      const int dst = next[col_idx_[k]]++;
      ci[dst] = r;
      vals[dst] = values_[k];
    }
  return CsrMatrix(cols_, rows_, std::move(rp), std::move(ci), std::move(vals));
}

std::vector<std::vector<double>> CsrMatrix::to_dense() const {
  std::vector<std::vector<double>> d(rows_, std::vector<double>(cols_, 0.0));
  for (int r = 0; r < rows_; ++r)
    for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) d[r][col_idx_[k]] = values_[k];
  return d;
}

void CsrMatrix::append_to(TripletList& t, int row_offset, int col_offset, double scale) const {
  t.reserve(t.size() + values_.size());
  for (int r = 0; r < rows_; ++r)
    for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
      t.add(r + row_offset, col_idx_[k] + col_offset, scale * values_[k]);
}

namespace {

inline double row_dot(const CsrMatrix& a, int r, std::span<const double> x) {
  const auto rp = a.row_ptr();
  const auto ci = a.col_idx();
  const auto v = a.values();
  double s = 0.0;
  for (int k = rp[r]; k < rp[r + 1]; ++k) s += v[k] * x[ci[k]];
  return s;
}

void check_spmv(const CsrMatrix& a, std::size_t nx, std::size_t ny) {
  if (static_cast<int>(nx) != a.cols() || static_cast<int>(ny) != a.rows())
    throw DimensionMismatch("spmv: dimensions do not match");
}

}  // namespace

void spmv(const CsrMatrix& a, std::span<const double> x, std::span<double> y) {
  check_spmv(a, x.size(), y.size());
  for_each_index(Exec::Parallel, a.rows(), [&](std::ptrdiff_t r) { y[r] = row_dot(a, static_cast<int>(r), x); });
}

std::vector<double> spmv(const CsrMatrix& a, std::span<const double> x) {
  std::vector<double> y(a.rows());
  spmv(a, x, y);
  return y;
}

std::vector<double> spmv_serial(const CsrMatrix& a, std::span<const double> x) {
  check_spmv(a, x.size(), a.rows());
  std::vector<double> y(a.rows());
  for (int r = 0; r < a.rows(); ++r) y[r] = row_dot(a, r, x);
  return y;
}

CsrMatrix add(const CsrMatrix& a, const CsrMatrix& b, double alpha, double beta) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionMismatch("add: shapes differ");
  TripletList t;
  a.append_to(t, 0, 0, alpha);
  b.append_to(t, 0, 0, beta);
  return CsrMatrix::from_triplets(a.rows(), a.cols(), t);
}

CsrMatrix submatrix(const CsrMatrix& a, int r0, int nr, int c0, int nc) {
  if (r0 < 0 || c0 < 0 || r0 + nr > a.rows() || c0 + nc > a.cols()) throw DimensionMismatch("submatrix: range");
  const auto rp = a.row_ptr();
  const auto ci = a.col_idx();
  const auto v = a.values();
  std::vector<int> nrp(nr + 1, 0), nci;
  std::vector<double> nv;
  for (int r = 0; r < nr; ++r) {
    const auto first = ci.begin() + rp[r0 + r], last = ci.begin() + rp[r0 + r + 1];
    for (auto it = std::lower_bound(first, last, c0); it != last && *it < c0 + nc; ++it) {
      nci.push_back(*it - c0);
      nv.push_back(v[it - ci.begin()]);
    }
    nrp[r + 1] = static_cast<int>(nci.size());
  }
  return CsrMatrix(nr, nc, std::move(nrp), std::move(nci), std::move(nv));
}

CsrMatrix symmetric_part(const CsrMatrix& a) {
  return add(a, a.transpose(), 0.5, 0.5);
}

double asymmetry(const CsrMatrix& a) {
  if (a.rows() != a.cols()) throw DimensionMismatch("asymmetry: matrix not square");
  const CsrMatrix d = add(a, a.transpose(), 1.0, -1.0);
  double m = 0.0;
  for (double v : d.values()) m = std::max(m, std::abs(v));
  return m;
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionMismatch("dot: lengths differ");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double norm_inf(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

EliminatedSystem::EliminatedSystem(const CsrMatrix& a, std::span<const int> fixed,
                                   std::span<const double> values)
    : lift_(a.rows(), 0.0), fixed_(fixed.begin(), fixed.end()), values_(values.begin(), values.end()) {
  if (a.rows() != a.cols()) throw DimensionMismatch("EliminatedSystem: matrix not square");
  if (fixed.size() != values.size()) throw DimensionMismatch("EliminatedSystem: value count");
  std::vector<double> g(a.rows(), 0.0);
  std::vector<char> is_fixed(a.rows(), 0);
  for (std::size_t k = 0; k < fixed.size(); ++k) {
    is_fixed[fixed[k]] = 1;
    g[fixed[k]] = values[k];
  }
  const auto rp = a.row_ptr();
  const auto ci = a.col_idx();
  const auto v = a.values();
  std::vector<int> nrp(a.rows() + 1, 0), nci;
  std::vector<double> nv;
  nci.reserve(v.size());
  nv.reserve(v.size());
  for (int r = 0; r < a.rows(); ++r) {
    if (is_fixed[r]) {
      nci.push_back(r);
      nv.push_back(1.0);
    } else {
      for (int k = rp[r]; k < rp[r + 1]; ++k) {
        if (is_fixed[ci[k]]) {
          lift_[r] += v[k] * g[ci[k]];
        } else {
          nci.push_back(ci[k]);
          nv.push_back(v[k]);
        }
      }
    }
    nrp[r + 1] = static_cast<int>(nci.size());
  }
  matrix_ = CsrMatrix(a.rows(), a.cols(), std::move(nrp), std::move(nci), std::move(nv));
}

std::vector<double> EliminatedSystem::rhs(std::span<const double> load) const {
  if (static_cast<int>(load.size()) != matrix_.rows()) throw DimensionMismatch("EliminatedSystem::rhs");
  std::vector<double> r(load.begin(), load.end());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= lift_[i];
  for (std::size_t k = 0; k < fixed_.size(); ++k) r[fixed_[k]] = values_[k];
  return r;
}

}  // namespace nsdarcy
