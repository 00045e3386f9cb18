#pragma once

#include <span>
#include <vector>

namespace nsdarcy {

/// Coordinate-format accumulator. Duplicates are summed, in insertion order,
/// when converted to CSR.
struct TripletList {
  std::vector<int> rows;
  std::vector<int> cols;
  std::vector<double> vals;

  void reserve(std::size_t n) {
    rows.reserve(n);
    cols.reserve(n);
    vals.reserve(n);
  }
  void add(int r, int c, double v) {
    rows.push_back(r);
    cols.push_back(c);
    vals.push_back(v);
  }
  std::size_t size() const { return vals.size(); }
};

/// Compressed sparse row matrix with sorted, duplicate-free column indices.
class CsrMatrix {
 public:
  CsrMatrix() = default;
  CsrMatrix(int rows, int cols, std::vector<int> row_ptr, std::vector<int> col_idx,
            std::vector<double> values);

  static CsrMatrix identity(int n);
  static CsrMatrix from_triplets(int rows, int cols, const TripletList& t);
  static CsrMatrix from_dense(const std::vector<std::vector<double>>& dense, double drop = 0.0);

  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  int nnz() const noexcept { return static_cast<int>(values_.size()); }

  std::span<const int> row_ptr() const noexcept { return row_ptr_; }
  std::span<const int> col_idx() const noexcept { return col_idx_; }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }

  /// Entry (r, c), zero if not stored.
  double at(int r, int c) const;
  std::vector<double> diagonal() const;
  CsrMatrix transpose() const;
  std::vector<std::vector<double>> to_dense() const;

  /// Append this matrix, scaled and shifted, to a triplet list.
  void append_to(TripletList& t, int row_offset, int col_offset, double scale = 1.0) const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<int> row_ptr_{0};
  std::vector<int> col_idx_;
  std::vector<double> values_;
};

/// y = A x, rows split over the assembly threads.
std::vector<double> spmv(const CsrMatrix& a, std::span<const double> x);
void spmv(const CsrMatrix& a, std::span<const double> x, std::span<double> y);
/// Single-threaded reference for spmv.
std::vector<double> spmv_serial(const CsrMatrix& a, std::span<const double> x);

/// alpha*A + beta*B (same shape).
CsrMatrix add(const CsrMatrix& a, const CsrMatrix& b, double alpha = 1.0, double beta = 1.0);
/// Rows [r0, r0+nr) and columns [c0, c0+nc) as a new matrix.
CsrMatrix submatrix(const CsrMatrix& a, int r0, int nr, int c0, int nc);
/// (A + A^T) / 2.
CsrMatrix symmetric_part(const CsrMatrix& a);
/// Largest |a_ij - a_ji|.
double asymmetry(const CsrMatrix& a);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
double norm_inf(std::span<const double> a);

/// A system with essential values imposed by symmetric elimination: fixed
/// rows and columns are replaced by the identity, and the removed column
/// contributions are moved into a lifting vector.
class EliminatedSystem {
 public:
  EliminatedSystem(const CsrMatrix& a, std::span<const int> fixed, std::span<const double> values);

  const CsrMatrix& matrix() const noexcept { return matrix_; }
  /// load - lift, with fixed entries overwritten by their values.
  std::vector<double> rhs(std::span<const double> load) const;

 private:
  CsrMatrix matrix_;
  std::vector<double> lift_;
  std::vector<int> fixed_;
  std::vector<double> values_;
};

}  // namespace nsdarcy
