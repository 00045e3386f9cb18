#include <umfpack.h>

#include <cmath>
#include <string>

#include "nsdarcy/errors.hpp"
#include "nsdarcy/solvers.hpp"

namespace nsdarcy {

namespace {

std::string umfpack_status(int status) {
  switch (status) {
    case UMFPACK_WARNING_singular_matrix: return "matrix is singular";
    case UMFPACK_ERROR_out_of_memory: return "out of memory";
    case UMFPACK_ERROR_invalid_matrix: return "invalid matrix";
    default: return "status " + std::to_string(status);
  }
}

}  // namespace

DirectSolver::DirectSolver(const CsrMatrix& a) : n_(a.rows()) {
  if (a.rows() != a.cols()) throw DimensionMismatch("DirectSolver: matrix not square");
  // CSR storage of A is CSC storage of A^T; solves use UMFPACK_At.
  col_ptr_.assign(a.row_ptr().begin(), a.row_ptr().end());
  row_idx_.assign(a.col_idx().begin(), a.col_idx().end());
  values_.assign(a.values().begin(), a.values().end());
  double control[UMFPACK_CONTROL];
  umfpack_di_defaults(control);
  void* symbolic = nullptr;
  int status = umfpack_di_symbolic(n_, n_, col_ptr_.data(), row_idx_.data(), values_.data(), &symbolic,
                                   control, nullptr);
  if (status != UMFPACK_OK) {
    umfpack_di_free_symbolic(&symbolic);
    throw Singular("DirectSolver: symbolic analysis failed: " + umfpack_status(status));
  }
  status = umfpack_di_numeric(col_ptr_.data(), row_idx_.data(), values_.data(), symbolic, &numeric_, control,
                              nullptr);
  umfpack_di_free_symbolic(&symbolic);
  if (status != UMFPACK_OK) {
    umfpack_di_free_numeric(&numeric_);
    numeric_ = nullptr;
    throw Singular("DirectSolver: factorization failed: " + umfpack_status(status));
  }
}

DirectSolver::~DirectSolver() {
  if (numeric_ != nullptr) umfpack_di_free_numeric(&numeric_);
}

std::vector<double> DirectSolver::solve(std::span<const double> b) const {
  if (static_cast<int>(b.size()) != n_) throw DimensionMismatch("DirectSolver::solve: rhs length");
  std::vector<double> x(n_, 0.0);
  double control[UMFPACK_CONTROL];
  umfpack_di_defaults(control);
  const int status = umfpack_di_solve(UMFPACK_At, col_ptr_.data(), row_idx_.data(), values_.data(), x.data(),
                                      b.data(), numeric_, control, nullptr);
  if (status != UMFPACK_OK) throw Singular("DirectSolver::solve: " + umfpack_status(status));
  for (double v : x)
    if (!std::isfinite(v)) throw Singular("DirectSolver::solve: non-finite solution");
  return x;
}

void DirectSolver::apply(std::span<const double> r, std::span<double> z) const {
  const std::vector<double> x = solve(r);
  std::copy(x.begin(), x.end(), z.begin());
}

std::vector<double> direct_solve(const CsrMatrix& a, std::span<const double> b) {
  return DirectSolver(a).solve(b);
}

}  // namespace nsdarcy
