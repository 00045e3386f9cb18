#pragma once

#include <memory>
#include <utility>
#include <vector>

#include "nsdarcy/fem.hpp"
#include "nsdarcy/forms.hpp"
#include "nsdarcy/linear.hpp"
#include "nsdarcy/mesh.hpp"
#include "nsdarcy/mms.hpp"
#include "nsdarcy/state.hpp"

namespace nsdarcy {

/// Velocity, pressure and head spaces for order k: Mini/P1/P1 (k = 1) or
/// P2/P1/P2 (k = 2).
struct CoupledSpaces {
  int order = 1;
  std::shared_ptr<const DofMap> velocity;
  std::shared_ptr<const DofMap> pressure;
  std::shared_ptr<const DofMap> head;
};

/// Throws UnsupportedDegree unless order is 1 or 2.
CoupledSpaces make_spaces(const CoupledMesh& mesh, int order);

/// Essential values: global indices into a coefficient vector and the values.
struct Essential {
  std::vector<int> dofs;
  std::vector<double> values;
};

/// Both components of every velocity dof on the outer fluid boundary.
Essential velocity_dirichlet(const DofMap& velocity, const CoupledProblem& problem);
/// Head dofs on the outer porous boundary.
Essential head_dirichlet(const DofMap& head, const CoupledProblem& problem);

struct CoupledOptions {
  double picard_tol = 1e-7;
  int maxit = 50;
  SolverOptions solver;
};

struct PicardReport {
  int iterations = 0;
  bool converged = false;
  std::vector<double> update_norms;  // ||U^{m+1} - U^m||_2 over (u, p, phi)
  std::vector<SolveReport> linear;
  int factorizations = 0;
};

/// Picard iteration for the monolithic problem from U^0 = 0. Throws
/// PicardDiverged when maxit is reached or the update norm grows three
/// times in a row.
std::pair<CoupledState, PicardReport> solve_coupled(const CoupledMesh& mesh, int order, const ModelParams& params,
                                                    const CoupledProblem& problem, const CoupledOptions& opts = {});

/// l2 norm of the nonlinear residual of the discrete coupled problem at
/// `state`, over the dofs without essential conditions.
double coupled_residual(const CoupledMesh& mesh, const CoupledState& state, const ModelParams& params,
                        const CoupledProblem& problem);

}  // namespace nsdarcy
