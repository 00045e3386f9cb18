#include "nsdarcy/linear.hpp"

#include "nsdarcy/errors.hpp"

namespace nsdarcy {

namespace {

IterativeControl control(const SolverOptions& o) { return {o.linear_tol, o.maxit, o.restart}; }

}  // namespace

LinearSolver LinearSolver::spd(const CsrMatrix& a, const SolverOptions& opts) {
  LinearSolver s;
  if (opts.mode == SolverMode::Direct) {
    s.kind_ = Kind::Direct;
    s.prec_ = std::make_shared<DirectSolver>(a);
  } else {
    s.kind_ = Kind::Pcg;
    s.matrix_ = std::make_shared<CsrMatrix>(a);
    s.prec_ = ichol(a, opts.droptol);
    s.ctl_ = control(opts);
  }
  return s;
}

LinearSolver LinearSolver::blocked(const CsrMatrix& a, const std::vector<BlockSpec>& blocks,
                                   const SolverOptions& opts) {
  LinearSolver s;
  if (opts.mode == SolverMode::Direct) {
    s.kind_ = Kind::Direct;
    s.prec_ = std::make_shared<DirectSolver>(a);
    return s;
  }
  s.kind_ = Kind::Gmres;
  s.matrix_ = std::make_shared<CsrMatrix>(a);
  s.ctl_ = control(opts);
  std::vector<BlockTriangularPreconditioner::Block> bt;
  int offset = 0;
  for (const BlockSpec& spec : blocks) {
    BlockTriangularPreconditioner::Block b;
    b.offset = offset;
    b.size = spec.size;
    if (spec.inv_diag.empty()) {
      b.solver = ichol(symmetric_part(submatrix(a, offset, spec.size, offset, spec.size)), opts.droptol);
    } else {
      b.inv_diag = spec.inv_diag;
    }
    bt.push_back(std::move(b));
    offset += spec.size;
  }
  s.prec_ = std::make_shared<BlockTriangularPreconditioner>(a, std::move(bt));
  return s;
}

std::vector<double> LinearSolver::solve(std::span<const double> b, SolveReport* report) const {
  if (kind_ == Kind::Direct) {
    if (report != nullptr) *report = {1, 0.0, true};
    return static_cast<const DirectSolver&>(*prec_).solve(b);
  }
  auto [x, rep] = kind_ == Kind::Pcg ? pcg(*matrix_, b, *prec_, ctl_) : gmres(*matrix_, b, *prec_, ctl_);
  if (report != nullptr) *report = rep;
  if (!rep.converged)
    throw NotConverged((kind_ == Kind::Pcg ? std::string("pcg") : std::string("gmres")) +
                       " did not reach the tolerance; relative residual " + std::to_string(rep.final_residual));
  return x;
}

}  // namespace nsdarcy
