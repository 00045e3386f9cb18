#include "nsdarcy/decoupled.hpp"

#include <algorithm>
#include <chrono>

#include "nsdarcy/errors.hpp"

namespace nsdarcy {

std::string to_string(AlgorithmId id) {
  switch (id) {
    case AlgorithmId::A: return "A";
    case AlgorithmId::B: return "B";
    case AlgorithmId::C: return "C";
    case AlgorithmId::D: return "D";
  }
  return "?";
}

AlgorithmId parse_algorithm(const std::string& s) {
  if (s == "A") return AlgorithmId::A;
  if (s == "B") return AlgorithmId::B;
  if (s == "C") return AlgorithmId::C;
  if (s == "D") return AlgorithmId::D;
  throw ValidationError("algorithm", "expected A, B, C or D, got '" + s + "'");
}

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

void add_to(std::vector<double>& a, const std::vector<double>& b) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
}

}  // namespace

DarcyStep::DarcyStep(const CoupledSpaces& spaces, const ModelParams& params, const CoupledProblem& problem,
                     const SolverOptions& opts)
    : head_(spaces.head), params_(params) {
  volume_ = assemble_volume_load(*head_, [&](Point2 x) { return problem.porous_source(x); }, params.rho_g());
  const Essential e = head_dirichlet(*head_, problem);
  system_ = std::make_unique<EliminatedSystem>(assemble_ap(*head_, params), e.dofs, e.values);
  solver_ = LinearSolver::spd(system_->matrix(), opts);
}

DiscreteField DarcyStep::solve(const FieldSource& velocity_source, SolveReport* report) const {
  std::vector<double> load = volume_;
  add_to(load, assemble_interface_load_darcy(*head_, velocity_source, params_));
  return DiscreteField(head_, solver_.solve(system_->rhs(load), report));
}

NsStep::NsStep(const CoupledSpaces& spaces, const ModelParams& params, const CoupledProblem& problem,
               const FieldSource& linearization, const SolverOptions& opts)
    : spaces_(spaces), params_(params), a_(linearization) {
  const DofMap &vel = *spaces.velocity, &pre = *spaces.pressure;
  nu_ = vel.vector_size();
  np_ = pre.size();
  volume_ = assemble_volume_load(vel, [&](Point2 x) { return problem.fluid_forcing(x); });
  Convection conv = assemble_convection(vel, linearization, ConvectionMode::Newton, params);
  newton_load_ = std::move(conv.load);
  const CsrMatrix b = assemble_b(vel, pre);
  TripletList t;
  assemble_af(vel, params).append_to(t, 0, 0);
  conv.matrix.append_to(t, 0, 0);
  b.transpose().append_to(t, 0, nu_);
  b.append_to(t, nu_, 0);
  const CsrMatrix k = CsrMatrix::from_triplets(nu_ + np_, nu_ + np_, t);
  const Essential e = velocity_dirichlet(vel, problem);
  system_ = std::make_unique<EliminatedSystem>(k, e.dofs, e.values);
  std::vector<double> inv;
  for (double d : assemble_mass(pre).diagonal()) inv.push_back(-params.nu / d);
  solver_ = LinearSolver::blocked(system_->matrix(), {{nu_, {}}, {np_, std::move(inv)}}, opts);
}

std::pair<DiscreteField, DiscreteField> NsStep::solve(NsRhs mode, const FieldSource& head_source,
                                                      const DiscreteField* intermediate, SolveReport* report) const {
  std::vector<double> load = volume_;
  if (mode == NsRhs::Newton) {
    add_to(load, newton_load_);
  } else {
    if (intermediate == nullptr) throw Error("NsStep: correction needs the intermediate velocity");
    add_to(load, assemble_correction_load(*spaces_.velocity, a_, *intermediate, params_));
  }
  add_to(load, assemble_interface_load_ns(*spaces_.velocity, head_source, params_));
  load.resize(nu_ + np_, 0.0);
  const std::vector<double> x = solver_.solve(system_->rhs(load), report);
  return {DiscreteField(spaces_.velocity, std::vector<double>(x.begin(), x.begin() + nu_)),
          DiscreteField(spaces_.pressure, std::vector<double>(x.begin() + nu_, x.end()))};
}

DiscreteField solve_darcy_step(const CoupledSpaces& spaces, const ModelParams& params, const CoupledProblem& problem,
                               const FieldSource& velocity_source, const SolverOptions& opts) {
  return DarcyStep(spaces, params, problem, opts).solve(velocity_source);
}

std::pair<DiscreteField, DiscreteField> solve_ns_step(const CoupledSpaces& spaces, const ModelParams& params,
                                                      const CoupledProblem& problem, const FieldSource& linearization,
                                                      const FieldSource& head_source, NsRhs mode,
                                                      const DiscreteField* intermediate, const SolverOptions& opts) {
  return NsStep(spaces, params, problem, linearization, opts).solve(mode, head_source, intermediate);
}

namespace {

/// Runs the fine-level steps, recording time, solver reports and whether a
/// factorization was performed.
class LevelRunner {
 public:
  LevelRunner(const CoupledSpaces& spaces, const CoupledState& prev, const ModelParams& params,
              const CoupledProblem& problem, const SolverOptions& opts, LevelSolution& out)
      : spaces_(spaces), prev_(prev), params_(params), problem_(problem), opts_(opts), out_(out) {}

  template <class F>
  auto step(const std::string& name, F&& body) {
    const auto t0 = Clock::now();
    StepRecord rec;
    rec.name = name;
    try {
      auto result = body(rec);
      rec.seconds = since(t0);
      out_.factorizations += rec.factored ? 1 : 0;
      ++out_.solves;
      out_.steps.push_back(rec);
      return result;
    } catch (const StepFailure&) {
      throw;
    } catch (const std::exception& e) {
      throw StepFailure(out_.level, name, e.what());
    }
  }


  DiscreteField darcy(const std::string& name, const FieldSource& velocity) {
    return step(name, [&](StepRecord& rec) {
      if (!darcy_) {
        darcy_ = std::make_unique<DarcyStep>(spaces_, params_, problem_, opts_);
        rec.factored = true;
      }
      return darcy_->solve(velocity, &rec.linear);
    });
  }

  std::pair<DiscreteField, DiscreteField> ns(const std::string& name, NsRhs mode, const FieldSource& head,
                                             const DiscreteField* intermediate = nullptr) {
    return step(name, [&](StepRecord& rec) {
      if (!ns_) {
        ns_ = std::make_unique<NsStep>(spaces_, params_, problem_, prev_.velocity, opts_);
        rec.factored = true;
      }
      return ns_->solve(mode, head, intermediate, &rec.linear);
    });
  }

 private:
  const CoupledSpaces& spaces_;
  const CoupledState& prev_;
  const ModelParams& params_;
  const CoupledProblem& problem_;
  const SolverOptions& opts_;
  LevelSolution& out_;
  std::unique_ptr<DarcyStep> darcy_;
  std::unique_ptr<NsStep> ns_;
};

}  // namespace

LevelSolution run_level(AlgorithmId algorithm, const CoupledMesh& mesh, int order, const CoupledState& previous,
                        const ModelParams& params, const CoupledProblem& problem, const SolverOptions& opts,
                        int level) {
  const auto t0 = Clock::now();
  LevelSolution out;
  out.level = level;
  out.n = mesh.subdivisions();
  const CoupledSpaces spaces = make_spaces(mesh, order);
  LevelRunner run(spaces, previous, params, problem, opts, out);
  const DiscreteField& u_prev = previous.velocity;
  const DiscreteField& phi_prev = previous.head;
  switch (algorithm) {
    case AlgorithmId::A: {
      DiscreteField phi_s = run.darcy("darcy", u_prev);
      auto [u_s, p_s] = run.ns("ns-newton", NsRhs::Newton, phi_s);
      DiscreteField phi_h = run.darcy("darcy-correct", u_s);
      auto [u_h, p_h] = run.ns("ns-correct", NsRhs::Correction, phi_h, &u_s);
      out.intermediate = CoupledState{std::move(u_s), std::move(p_s), std::move(phi_s)};
      out.final = CoupledState{std::move(u_h), std::move(p_h), std::move(phi_h)};
      break;
    }
    case AlgorithmId::B: {
      auto [u_s, p_s] = run.ns("ns-newton", NsRhs::Newton, phi_prev);
      DiscreteField phi_s = run.darcy("darcy", u_s);
      auto [u_h, p_h] = run.ns("ns-correct", NsRhs::Correction, phi_s, &u_s);
      DiscreteField phi_h = run.darcy("darcy-correct", u_h);
      out.intermediate = CoupledState{std::move(u_s), std::move(p_s), std::move(phi_s)};
      out.final = CoupledState{std::move(u_h), std::move(p_h), std::move(phi_h)};
      break;
    }
    case AlgorithmId::C: {
      auto [u_h, p_h] = run.ns("ns-newton", NsRhs::Newton, phi_prev);
      DiscreteField phi_h = run.darcy("darcy", u_prev);
      out.final = CoupledState{std::move(u_h), std::move(p_h), std::move(phi_h)};
      break;
    }
    case AlgorithmId::D: {
      DiscreteField phi_s = run.darcy("darcy", u_prev);
      auto [u_s, p_s] = run.ns("ns-newton", NsRhs::Newton, phi_s);
      auto [u_h, p_h] = run.ns("ns-correct", NsRhs::Correction, phi_s, &u_s);
      out.final = CoupledState{std::move(u_h), std::move(p_h), phi_s};
      out.intermediate = CoupledState{std::move(u_s), std::move(p_s), std::move(phi_s)};
      break;
    }
  }
  out.seconds = since(t0);
  return out;
}

MultilevelRun run_multilevel(AlgorithmId algorithm, const MeshSchedule& schedule, int order, const ModelParams& params,
                             const CoupledProblem& problem, const MultilevelOptions& opts) {
  if (schedule.levels() < 2) throw ValidationError("schedule", "a multilevel run needs a coarse and a fine level");
  if (order != 1 && order != 2) throw UnsupportedDegree("order must be 1 or 2, got " + std::to_string(order));
  params.validate();
  const auto t0 = Clock::now();
  MultilevelRun run;
  run.algorithm = algorithm;
  run.schedule = schedule;
  run.order = order;
  for (int n : schedule.subdivisions()) run.meshes.push_back(build_coupled_mesh(n));

  LevelSolution coarse;
  coarse.level = 0;
  coarse.n = schedule[0];
  try {
    auto [state, rep] = solve_coupled(run.meshes[0], order, params, problem, opts.coupled);
    coarse.final = std::move(state);
    run.coarse = rep;
    coarse.factorizations = rep.factorizations;
    coarse.solves = rep.iterations;
  } catch (const std::exception& e) {
    throw StepFailure(0, "coupled", e.what());
  }
  coarse.seconds = since(t0);
  run.levels.push_back(std::move(coarse));
  for (int l = 1; l < schedule.levels(); ++l)
    run.levels.push_back(
        run_level(algorithm, run.meshes[l], order, run.levels[l - 1].final, params, problem, opts.solver, l));
  run.seconds = since(t0);
  return run;
}

std::vector<ErrorReport> level_errors(const MultilevelRun& run, const ManufacturedProblem& mms, bool intermediate) {
  std::vector<ErrorReport> out;
  for (std::size_t l = 1; l < run.levels.size(); ++l) {
    const LevelSolution& ls = run.levels[l];
    if (intermediate && !ls.intermediate) continue;
    ErrorReport r = error_norms(intermediate ? *ls.intermediate : ls.final, mms);
    r.level = ls.level;
    r.stage = intermediate ? "intermediate" : "final";
    r.algorithm = to_string(run.algorithm);
    out.push_back(r);
  }
  return out;
}

std::vector<RatioRow> compare_runs(const std::vector<ErrorReport>& run_errors,
                                   const std::vector<ErrorReport>& reference) {
  std::vector<RatioRow> rows;
  for (const ErrorReport& r : run_errors) {
    const auto it = std::find_if(reference.begin(), reference.end(), [&](const ErrorReport& f) { return f.n == r.n; });
    if (it == reference.end())
      throw MeshMismatch("compare_runs: no reference solve on n = " + std::to_string(r.n));
    for (Variable v : kVariables)
      for (Norm nm : {Norm::L2, Norm::H1}) {
        if (v == Variable::P && nm == Norm::H1) continue;
        rows.push_back({r.level, r.n, v, nm, r.get(v, nm) / it->get(v, nm)});
      }
  }
  return rows;
}

}  // namespace nsdarcy
