#pragma once

#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "nsdarcy/sparse.hpp"

namespace nsdarcy {

struct SolveReport {
  int iterations = 0;
  double final_residual = 0.0;  // relative, as used by the stopping test
  bool converged = false;
};

enum class PreconditionerKind { None, Jacobi, IChol, BlockTriangular, Direct };

/// A linear map z = M^{-1} r.
class Preconditioner {
 public:
  virtual ~Preconditioner() = default;
  virtual void apply(std::span<const double> r, std::span<double> z) const = 0;
  virtual PreconditionerKind kind() const = 0;
};

class IdentityPreconditioner final : public Preconditioner {
 public:
  void apply(std::span<const double> r, std::span<double> z) const override;
  PreconditionerKind kind() const override { return PreconditionerKind::None; }
};

class JacobiPreconditioner final : public Preconditioner {
 public:
  explicit JacobiPreconditioner(const CsrMatrix& a);
  void apply(std::span<const double> r, std::span<double> z) const override;
  PreconditionerKind kind() const override { return PreconditionerKind::Jacobi; }

 private:
  std::vector<double> inv_diag_;
};

/// Threshold incomplete Cholesky A ~ L L^T, computed row by row. An
/// off-diagonal l_ij is dropped when |l_ij| < droptol * sqrt(a_ii);
/// non-positive pivots are replaced by sqrt(|a_ii|) and counted.
class IncompleteCholesky final : public Preconditioner {
 public:
  IncompleteCholesky(const CsrMatrix& a, double droptol);

  void apply(std::span<const double> r, std::span<double> z) const override;
  PreconditionerKind kind() const override { return PreconditionerKind::IChol; }

  /// Lower factor including the diagonal.
  const CsrMatrix& lower() const noexcept { return lower_; }
  int pivot_shifts() const noexcept { return pivot_shifts_; }
  double droptol() const noexcept { return droptol_; }

 private:
  CsrMatrix lower_;
  CsrMatrix upper_;  // L^T
  int pivot_shifts_ = 0;
  double droptol_;
};

std::unique_ptr<IncompleteCholesky> ichol(const CsrMatrix& a, double droptol = 1e-3);

/// Sparse LU with partial pivoting (UMFPACK). The factorization is kept so
/// repeated right-hand sides cost one triangular solve pair each.
class DirectSolver final : public Preconditioner {
 public:
  explicit DirectSolver(const CsrMatrix& a);
  ~DirectSolver() override;
  DirectSolver(const DirectSolver&) = delete;
  DirectSolver& operator=(const DirectSolver&) = delete;

  std::vector<double> solve(std::span<const double> b) const;
  void apply(std::span<const double> r, std::span<double> z) const override;
  PreconditionerKind kind() const override { return PreconditionerKind::Direct; }
  int size() const noexcept { return n_; }

 private:
  int n_ = 0;
  std::vector<int> col_ptr_;
  std::vector<int> row_idx_;
  std::vector<double> values_;
  void* numeric_ = nullptr;
};

/// One-shot factor and solve. Throws Singular.
std::vector<double> direct_solve(const CsrMatrix& a, std::span<const double> b);

/// Block upper-triangular preconditioner for block systems whose diagonal
/// blocks are given by sub-preconditioners (or diagonal scalings) and whose
/// strictly upper blocks are taken from the system matrix. Applied by block
/// back substitution, last block first.
class BlockTriangularPreconditioner final : public Preconditioner {
 public:
  struct Block {
    int offset = 0;
    int size = 0;
    std::shared_ptr<const Preconditioner> solver;  // used when set
    std::vector<double> inv_diag;                  // otherwise z = inv_diag .* r
  };

  BlockTriangularPreconditioner(const CsrMatrix& system, std::vector<Block> blocks);
  void apply(std::span<const double> r, std::span<double> z) const override;
  PreconditionerKind kind() const override { return PreconditionerKind::BlockTriangular; }

 private:
  std::vector<Block> blocks_;
  std::vector<CsrMatrix> upper_rows_;  // block row i restricted to columns of blocks > i
};

struct IterativeControl {
  double tol = 1e-9;
  int maxit = 10000;
  int restart = 200;  // GMRES only
};

/// Preconditioned conjugate gradients from x0 = 0. Stops when
/// ||b - Ax|| <= tol ||b|| (absolute when b = 0).
std::pair<std::vector<double>, SolveReport> pcg(const CsrMatrix& a, std::span<const double> b,
                                                const Preconditioner& m, IterativeControl ctl = {});

/// Right-preconditioned restarted GMRES from x0 = 0. Stops when
/// ||r_q|| < tol ||r_0||.
std::pair<std::vector<double>, SolveReport> gmres(const CsrMatrix& a, std::span<const double> b,
                                                  const Preconditioner& m, IterativeControl ctl = {});

}  // namespace nsdarcy
