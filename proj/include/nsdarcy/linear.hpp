#pragma once

#include <memory>
#include <span>
#include <vector>

#include "nsdarcy/solvers.hpp"
#include "nsdarcy/sparse.hpp"

namespace nsdarcy {

enum class SolverMode { Direct, Iterative };

struct SolverOptions {
  SolverMode mode = SolverMode::Direct;
  double linear_tol = 1e-9;
  double droptol = 1e-3;
  int restart = 200;
  int maxit = 20000;
};

/// One diagonal block of a blocked system. An empty inv_diag selects an
/// incomplete Cholesky factor of the block's symmetric part.
struct BlockSpec {
  int size = 0;
  std::vector<double> inv_diag;
};

/// A matrix prepared for repeated solves: factored once (direct mode) or
/// preconditioned once (iterative mode).
class LinearSolver {
 public:
  /// SPD system: sparse LU, or PCG with incomplete Cholesky.
  static LinearSolver spd(const CsrMatrix& a, const SolverOptions& opts);
  /// Blocked saddle-type system: sparse LU, or GMRES with a block upper
  /// triangular preconditioner built from `blocks`.
  static LinearSolver blocked(const CsrMatrix& a, const std::vector<BlockSpec>& blocks, const SolverOptions& opts);

  /// Throws NotConverged when an iterative solve misses its tolerance.
  std::vector<double> solve(std::span<const double> b, SolveReport* report = nullptr) const;

 private:
  enum class Kind { Direct, Pcg, Gmres };
  Kind kind_ = Kind::Direct;
  std::shared_ptr<const CsrMatrix> matrix_;
  std::shared_ptr<const Preconditioner> prec_;
  IterativeControl ctl_;
};

}  // namespace nsdarcy
