#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nsdarcy/coupled.hpp"

namespace nsdarcy {

enum class AlgorithmId { A, B, C, D };

std::string to_string(AlgorithmId id);
/// "A".."D"; throws ValidationError("algorithm", ...) otherwise.
AlgorithmId parse_algorithm(const std::string& s);

/// Bookkeeping of one fine-level subproblem solve.
struct StepRecord {
  std::string name;  // e.g. "darcy", "ns-newton", "darcy-correct", "ns-correct"
  double seconds = 0.0;
  SolveReport linear;
  bool factored = false;  // false when the step reused an earlier factorization
};

struct LevelSolution {
  int level = 0;
  int n = 0;
  std::optional<CoupledState> intermediate;
  CoupledState final;
  std::vector<StepRecord> steps;
  int factorizations = 0;
  int solves = 0;
  double seconds = 0.0;
};

struct MultilevelOptions {
  CoupledOptions coupled;  // coarse solve
  SolverOptions solver;    // fine-level solves
};

struct MultilevelRun {
  AlgorithmId algorithm = AlgorithmId::A;
  MeshSchedule schedule;
  int order = 1;
  std::vector<CoupledMesh> meshes;
  std::vector<LevelSolution> levels;  // levels[0] is the coupled coarse solve
  PicardReport coarse;
  double seconds = 0.0;
};

/// Darcy subproblem on a fixed mesh. The stiffness matrix is factored once
/// and reused for every interface velocity.
class DarcyStep {
 public:
  DarcyStep(const CoupledSpaces& spaces, const ModelParams& params, const CoupledProblem& problem,
            const SolverOptions& opts);
  /// a_p(phi, psi) = rho g (f_p, psi) + rho g (psi, u_src . n_f)
  DiscreteField solve(const FieldSource& velocity_source, SolveReport* report = nullptr) const;

 private:
  std::shared_ptr<const DofMap> head_;
  ModelParams params_;
  std::vector<double> volume_;
  std::unique_ptr<EliminatedSystem> system_;
  LinearSolver solver_;
};

enum class NsRhs { Newton, Correction };

/// Navier-Stokes subproblem linearized about a fixed state a: matrix
/// A_f + N1(a) + N2(a) with the divergence constraint, factored once.
class NsStep {
 public:
  NsStep(const CoupledSpaces& spaces, const ModelParams& params, const CoupledProblem& problem,
         const FieldSource& linearization, const SolverOptions& opts);

  /// Newton: f + c(a, a, v) - rho g (phi_src, v . n_f).
  /// Correction: f + c(a, s, v) + c(s, a - s, v) - rho g (phi_src, v . n_f).
  std::pair<DiscreteField, DiscreteField> solve(NsRhs mode, const FieldSource& head_source,
                                                const DiscreteField* intermediate = nullptr,
                                                SolveReport* report = nullptr) const;

 private:
  CoupledSpaces spaces_;
  ModelParams params_;
  FieldSource a_;
  std::vector<double> volume_;  // (f, v) plus c(a, a, v)
  std::vector<double> newton_load_;
  std::unique_ptr<EliminatedSystem> system_;
  LinearSolver solver_;
  int nu_ = 0;
  int np_ = 0;
};

/// One-shot forms of the two steps.
DiscreteField solve_darcy_step(const CoupledSpaces& spaces, const ModelParams& params, const CoupledProblem& problem,
                               const FieldSource& velocity_source, const SolverOptions& opts = {});
std::pair<DiscreteField, DiscreteField> solve_ns_step(const CoupledSpaces& spaces, const ModelParams& params,
                                                      const CoupledProblem& problem, const FieldSource& linearization,
                                                      const FieldSource& head_source, NsRhs mode,
                                                      const DiscreteField* intermediate = nullptr,
                                                      const SolverOptions& opts = {});

/// One fine level of an algorithm, driven by the previous level's final state.
LevelSolution run_level(AlgorithmId algorithm, const CoupledMesh& mesh, int order, const CoupledState& previous,
                        const ModelParams& params, const CoupledProblem& problem, const SolverOptions& opts,
                        int level = 1);

/// Coupled coarse solve on schedule[0], then one run_level per fine
/// level. Failures are rethrown as StepFailure naming the level and step.
MultilevelRun run_multilevel(AlgorithmId algorithm, const MeshSchedule& schedule, int order, const ModelParams& params,
                             const CoupledProblem& problem, const MultilevelOptions& opts = {});

/// Errors of each fine level's final (or intermediate) state.
std::vector<ErrorReport> level_errors(const MultilevelRun& run, const ManufacturedProblem& mms,
                                      bool intermediate = false);

struct RatioRow {
  int level = 0;
  int n = 0;
  Variable variable = Variable::U;
  Norm norm = Norm::L2;
  double ratio = 0.0;  // run error / reference error
};

/// Per fine level and variable, the ratio of the run's final error to the
/// reference error on the same mesh. Throws MeshMismatch when a fine level
/// has no reference with the same n.
std::vector<RatioRow> compare_runs(const std::vector<ErrorReport>& run_errors,
                                   const std::vector<ErrorReport>& reference);

}  // namespace nsdarcy
