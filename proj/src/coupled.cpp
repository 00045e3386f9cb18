#include "nsdarcy/coupled.hpp"

#include <cmath>
#include <string>

#include "nsdarcy/errors.hpp"

namespace nsdarcy {

CoupledSpaces make_spaces(const CoupledMesh& mesh, int order) {
  CoupledSpaces s;
  s.order = order;
  if (order == 1) {
    s.velocity = build_dofmap(mesh.fluid, {Family::MiniVelocity, 2});
    s.head = build_dofmap(mesh.porous, {Family::P1, 1});
  } else if (order == 2) {
    s.velocity = build_dofmap(mesh.fluid, {Family::P2, 2});
    s.head = build_dofmap(mesh.porous, {Family::P2, 1});
  } else {
    throw UnsupportedDegree("order must be 1 or 2, got " + std::to_string(order));
  }
  s.pressure = build_dofmap(mesh.fluid, {Family::P1, 1});
  return s;
}

Essential velocity_dirichlet(const DofMap& velocity, const CoupledProblem& problem) {
  Essential e;
  const std::vector<int> scalar = velocity.dirichlet_dofs();
  for (int c = 0; c < 2; ++c)
    for (int d : scalar) {
      e.dofs.push_back(c * velocity.size() + d);
      e.values.push_back(problem.velocity_trace(velocity.location(d))[c]);
    }
  return e;
}

Essential head_dirichlet(const DofMap& head, const CoupledProblem& problem) {
  Essential e;
  e.dofs = head.dirichlet_dofs();
  for (int d : e.dofs) e.values.push_back(problem.head_trace(head.location(d)));
  return e;
}

namespace {

/// Parts of the monolithic system that do not change between iterations.
struct Monolithic {
  CoupledSpaces spaces;
  int nu = 0, np = 0, nphi = 0;
  CsrMatrix af, b, bt, ap;
  InterfaceCoupling gamma;
  std::vector<double> load;
  Essential essential;
  std::vector<double> pressure_inv_diag;

  Monolithic(const CoupledMesh& mesh, int order, const ModelParams& params, const CoupledProblem& problem)
      : spaces(make_spaces(mesh, order)) {
    const DofMap &vel = *spaces.velocity, &pre = *spaces.pressure, &phi = *spaces.head;
    nu = vel.vector_size();
    np = pre.size();
    nphi = phi.size();
    af = assemble_af(vel, params);
    b = assemble_b(vel, pre);
    bt = b.transpose();
    ap = assemble_ap(phi, params);
    gamma = assemble_interface_coupling(mesh, vel, phi, params);
    load.assign(size(), 0.0);
    const auto ff = assemble_volume_load(vel, [&](Point2 x) { return problem.fluid_forcing(x); });
    const auto fp = assemble_volume_load(phi, [&](Point2 x) { return problem.porous_source(x); }, params.rho_g());
    std::copy(ff.begin(), ff.end(), load.begin());
    std::copy(fp.begin(), fp.end(), load.begin() + nu + np);
    essential = velocity_dirichlet(vel, problem);
    const Essential he = head_dirichlet(phi, problem);
    for (std::size_t k = 0; k < he.dofs.size(); ++k) {
      essential.dofs.push_back(nu + np + he.dofs[k]);
      essential.values.push_back(he.values[k]);
    }
    const std::vector<double> md = assemble_mass(pre).diagonal();
    for (double d : md) pressure_inv_diag.push_back(-params.nu / d);
  }

  int size() const { return nu + np + nphi; }

  CsrMatrix matrix(const CsrMatrix& convection) const {
    TripletList t;
    t.reserve(af.nnz() + convection.nnz() + 2 * b.nnz() + gamma.c_vphi.nnz() + gamma.c_phiu.nnz() + ap.nnz());
    af.append_to(t, 0, 0);
    convection.append_to(t, 0, 0);
    bt.append_to(t, 0, nu);
    gamma.c_vphi.append_to(t, 0, nu + np);
    b.append_to(t, nu, 0);
    gamma.c_phiu.append_to(t, nu + np, 0);
    ap.append_to(t, nu + np, nu + np);
    return CsrMatrix::from_triplets(size(), size(), t);
  }

  CoupledState split(const std::vector<double>& x) const {
    CoupledState s;
    s.velocity = DiscreteField(spaces.velocity, std::vector<double>(x.begin(), x.begin() + nu));
    s.pressure = DiscreteField(spaces.pressure, std::vector<double>(x.begin() + nu, x.begin() + nu + np));
    s.head = DiscreteField(spaces.head, std::vector<double>(x.begin() + nu + np, x.end()));
    return s;
  }
};

}  // namespace

std::pair<CoupledState, PicardReport> solve_coupled(const CoupledMesh& mesh, int order, const ModelParams& params,
                                                    const CoupledProblem& problem, const CoupledOptions& opts) {
  params.validate();
  const Monolithic sys(mesh, order, params, problem);
  PicardReport rep;
  std::vector<double> x(sys.size(), 0.0);
  DiscreteField u(sys.spaces.velocity);
  int growth = 0;
  for (int m = 1; m <= opts.maxit; ++m) {
    const Convection conv = assemble_convection(*sys.spaces.velocity, u, ConvectionMode::Plain, params);
    const EliminatedSystem es(sys.matrix(conv.matrix), sys.essential.dofs, sys.essential.values);
    const LinearSolver solver = LinearSolver::blocked(
        es.matrix(), {{sys.nu, {}}, {sys.np, sys.pressure_inv_diag}, {sys.nphi, {}}}, opts.solver);
    ++rep.factorizations;
    SolveReport lr;
    const std::vector<double> xn = solver.solve(es.rhs(sys.load), &lr);
    rep.linear.push_back(lr);
    double diff = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) diff += (xn[i] - x[i]) * (xn[i] - x[i]);
    diff = std::sqrt(diff);
    x = xn;
    std::copy(x.begin(), x.begin() + sys.nu, u.coeffs.begin());
    rep.iterations = m;
    if (!rep.update_norms.empty() && diff > rep.update_norms.back()) {
      if (++growth >= 3) throw PicardDiverged("Picard update norm grew three times in a row");
    } else {
      growth = 0;
    }
    rep.update_norms.push_back(diff);
    if (!std::isfinite(diff)) throw PicardDiverged("Picard update is not finite");
    if (diff < opts.picard_tol) {
      rep.converged = true;
      return {sys.split(x), rep};
    }
  }
  throw PicardDiverged("Picard iteration did not converge in " + std::to_string(opts.maxit) + " iterations");
}

double coupled_residual(const CoupledMesh& mesh, const CoupledState& state, const ModelParams& params,
                        const CoupledProblem& problem) {
  const Monolithic sys(mesh, state.velocity.dofmap->family().tag == Family::P2 ? 2 : 1, params, problem);
  const Convection conv = assemble_convection(*sys.spaces.velocity, state.velocity, ConvectionMode::Plain, params);
  std::vector<double> x = state.velocity.coeffs;
  x.insert(x.end(), state.pressure.coeffs.begin(), state.pressure.coeffs.end());
  x.insert(x.end(), state.head.coeffs.begin(), state.head.coeffs.end());
  if (static_cast<int>(x.size()) != sys.size()) throw MeshMismatch("coupled_residual: state does not fit the mesh");
  std::vector<double> r = spmv(sys.matrix(conv.matrix), x);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= sys.load[i];
  for (int d : sys.essential.dofs) r[d] = 0.0;
  return norm2(r);
}

}  // namespace nsdarcy
