#include "nsdarcy/forms.hpp"

#include <algorithm>
#include <cmath>

#include "nsdarcy/errors.hpp"
#include "nsdarcy/parallel.hpp"
#include "nsdarcy/quadrature.hpp"

namespace nsdarcy {

void ModelParams::validate() const {
  const std::pair<const char*, double> fields[] = {{"nu", nu},
                                                   {"rho", rho},
                                                   {"gravity", gravity},
                                                   {"porosity", porosity},
                                                   {"conductivity", conductivity},
                                                   {"alpha_bjs", alpha_bjs}};
  for (const auto& [name, v] : fields)
    if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError(name, "must be a positive number");
}

double ModelParams::bjs_coefficient() const { return nu * alpha_bjs / std::sqrt(nu * conductivity); }

FieldSource FieldSource::analytic(Analytic f) {
  FieldSource s;
  s.analytic_ = std::move(f);
  return s;
}

namespace {

bool same_grid(const TriMesh& a, const TriMesh& b) {
  return &a == &b || (a.subdivisions() == b.subdivisions() && a.rect().lo == b.rect().lo &&
                      a.rect().hi == b.rect().hi);
}

}  // namespace

FieldSample FieldSource::at(const TriMesh& target, int cell, const std::array<double, 3>& bary, Point2 x) const {
  if (field_ == nullptr) return analytic_(x);
  if (same_grid(field_->mesh(), target)) return eval_field_in_cell(*field_, cell, bary);
  return eval_field(*field_, x);
}

FieldSample FieldSource::at(Point2 x) const {
  if (field_ == nullptr) return analytic_(x);
  return eval_field(*field_, x);
}

int assembly_degree(const DofMap& dofmap) { return dofmap.family().tag == Family::P2 ? 6 : 5; }

namespace {

constexpr int kMaxVec = 2 * kMaxLocal;

/// Dense element contribution scattered into global triplets / loads.
struct Local {
  int nr = 0;
  int nc = 0;
  std::array<int, kMaxVec> rows{};
  std::array<int, kMaxVec> cols{};
  std::array<double, kMaxVec * kMaxVec> m{};
  std::array<double, kMaxVec> v{};

  void reset(int r, int c) {
    nr = r;
    nc = c;
    std::fill(m.begin(), m.begin() + r * c, 0.0);
    std::fill(v.begin(), v.begin() + r, 0.0);
  }
  double& at(int i, int j) { return m[i * nc + j]; }
};

/// Global dof indices of a cell, component-major for vector maps.
int fill_dofs(const DofMap& map, int cell, std::array<int, kMaxVec>& out) {
  const auto dofs = map.cell_dofs(cell);
  const int nl = map.local_count();
  for (int c = 0; c < map.components(); ++c)
    for (int a = 0; a < nl; ++a) out[c * nl + a] = c * map.size() + dofs[a];
  return nl * map.components();
}

/// Element kernels run in parallel chunks; scatter is serial in cell order,
/// so the assembled result does not depend on the thread count.
template <class Kernel>
void cell_loop(int ncells, TripletList* t, std::vector<double>* load, Kernel&& kernel) {
  constexpr int kChunk = 2048;
  std::vector<Local> buf(std::min(kChunk, std::max(ncells, 1)));
  for (int start = 0; start < ncells; start += kChunk) {
    const int cnt = std::min(kChunk, ncells - start);
    for_each_index(Exec::Parallel, cnt, [&](std::ptrdiff_t i) { kernel(start + static_cast<int>(i), buf[i]); });
    for (int i = 0; i < cnt; ++i) {
      const Local& l = buf[i];
      if (t != nullptr)
        for (int r = 0; r < l.nr; ++r)
          for (int c = 0; c < l.nc; ++c) t->add(l.rows[r], l.cols[c], l.m[r * l.nc + c]);
      if (load != nullptr)
        for (int r = 0; r < l.nr; ++r) (*load)[l.rows[r]] += l.v[r];
    }
  }
}

/// Reference basis tables at the points of a triangle rule.
struct BasisTable {
  TriangleRule rule;
  std::vector<BasisEval> basis;

  BasisTable(Family family, int degree) : rule(quad_rule_tri(degree)) {
    for (const auto& p : rule.points) basis.push_back(ref_basis(family, p));
  }
};

struct PhysBasis {
  int count = 0;
  std::array<double, kMaxLocal> val{};
  std::array<std::array<double, 2>, kMaxLocal> grad{};
};

PhysBasis to_physical(const BasisEval& b, const CellGeometry& g) {
  PhysBasis p;
  p.count = b.count;
  for (int i = 0; i < b.count; ++i) {
    p.val[i] = b.values[i];
    p.grad[i] = g.physical_grad(b.grads[i]);
  }
  return p;
}

/// A boundary edge seen from the cell that contains it.
struct EdgeInCell {
  int cell = -1;
  int la = 0;  // local index of the edge's first vertex
  int lb = 0;  // local index of the edge's second vertex
  Point2 a;
  Point2 b;

  double length() const { return std::hypot(b.x - a.x, b.y - a.y); }
  Point2 point(double t) const { return {a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)}; }
  std::array<double, 3> bary(double t) const {
    std::array<double, 3> l{0.0, 0.0, 0.0};
    l[la] = 1.0 - t;
    l[lb] = t;
    return l;
  }
  /// Edge parameter of a point known to lie on the edge.
  double param(Point2 p) const {
    const double dx = b.x - a.x, dy = b.y - a.y;
    return ((p.x - a.x) * dx + (p.y - a.y) * dy) / (dx * dx + dy * dy);
  }
};

/// Cells attached to every boundary edge, indexed like boundary_edges().
std::vector<EdgeInCell> attach_boundary_edges(const TriMesh& mesh) {
  std::vector<int> owner(mesh.num_edges(), -1);
  const auto ce = mesh.cell_edges();
  for (int c = 0; c < mesh.num_cells(); ++c)
    for (int k = 0; k < 3; ++k)
      if (owner[ce[c][k]] < 0) owner[ce[c][k]] = c;
  std::vector<EdgeInCell> out;
  const auto be = mesh.boundary_edges();
  const auto ids = mesh.boundary_edge_ids();
  for (std::size_t b = 0; b < be.size(); ++b) {
    EdgeInCell e;
    e.cell = owner[ids[b]];
    const auto& tri = mesh.cell(e.cell);
    for (int k = 0; k < 3; ++k) {
      if (tri[k] == be[b].vertices[0]) e.la = k;
      if (tri[k] == be[b].vertices[1]) e.lb = k;
    }
    e.a = mesh.vertex(be[b].vertices[0]);
    e.b = mesh.vertex(be[b].vertices[1]);
    out.push_back(e);
  }
  return out;
}

std::vector<int> interface_edges(const TriMesh& mesh) {
  std::vector<int> out;
  const auto be = mesh.boundary_edges();
  for (std::size_t b = 0; b < be.size(); ++b)
    if (be[b].tag == BoundaryTag::Interface) out.push_back(static_cast<int>(b));
  return out;
}

void require_vector(const DofMap& m, const char* who) {
  if (m.components() != 2) throw DimensionMismatch(std::string(who) + ": expected a vector velocity space");
}

void require_scalar(const DofMap& m, const char* who) {
  if (m.components() != 1) throw DimensionMismatch(std::string(who) + ": expected a scalar space");
}

/// Scalar stiffness, coefficient * int grad psi_i . grad psi_j, replicated
/// on the diagonal blocks of a vector map.
void stiffness_kernel(const DofMap& map, const BasisTable& tab, double coef, int cell, Local& l) {
  const int nl = map.local_count();
  const int n = fill_dofs(map, cell, l.rows);
  l.cols = l.rows;
  l.reset(n, n);
  const CellGeometry g(map.mesh(), cell);
  const double jdet = std::abs(g.det);
  for (std::size_t q = 0; q < tab.rule.weights.size(); ++q) {
    const PhysBasis pb = to_physical(tab.basis[q], g);
    const double w = coef * tab.rule.weights[q] * jdet;
    for (int i = 0; i < nl; ++i)
      for (int j = 0; j < nl; ++j) {
        const double s = w * (pb.grad[i][0] * pb.grad[j][0] + pb.grad[i][1] * pb.grad[j][1]);
        for (int c = 0; c < map.components(); ++c) l.at(c * nl + i, c * nl + j) += s;
      }
  }
}

}  // namespace

CsrMatrix assemble_ap(const DofMap& phi, const ModelParams& params) {
  require_scalar(phi, "assemble_ap");
  const BasisTable tab(phi.family().tag, assembly_degree(phi));
  const double coef = params.rho_g() / params.porosity * params.conductivity;
  TripletList t;
  cell_loop(phi.mesh().num_cells(), &t, nullptr,
            [&](int cell, Local& l) { stiffness_kernel(phi, tab, coef, cell, l); });
  return CsrMatrix::from_triplets(phi.vector_size(), phi.vector_size(), t);
}

CsrMatrix assemble_af(const DofMap& velocity, const ModelParams& params) {
  require_vector(velocity, "assemble_af");
  const BasisTable tab(velocity.family().tag, assembly_degree(velocity));
  TripletList t;
  cell_loop(velocity.mesh().num_cells(), &t, nullptr,
            [&](int cell, Local& l) { stiffness_kernel(velocity, tab, params.nu, cell, l); });

  // Slip term: coefficient * int_Gamma (u . tau)(v . tau), tau = (1, 0).
  const TriMesh& mesh = velocity.mesh();
  const auto attached = attach_boundary_edges(mesh);
  const EdgeRule er = quad_rule_edge(kInterfacePoints);
  const double coef = params.bjs_coefficient();
  const int nl = velocity.local_count();
  for (int b : interface_edges(mesh)) {
    const EdgeInCell& e = attached[b];
    const auto dofs = velocity.cell_dofs(e.cell);
    const double len = e.length();
    for (std::size_t q = 0; q < er.points.size(); ++q) {
      const BasisEval be = ref_basis(velocity.family().tag, e.bary(er.points[q]));
      const double w = coef * er.weights[q] * len;
      for (int i = 0; i < nl; ++i)
        for (int j = 0; j < nl; ++j)
          for (int c = 0; c < 2; ++c) {
            const double tt = kInterfaceTangent[c] * kInterfaceTangent[c];
            if (tt != 0.0)
              t.add(c * velocity.size() + dofs[i], c * velocity.size() + dofs[j], w * tt * (be.values[i] * be.values[j]));
          }
    }
  }
  return CsrMatrix::from_triplets(velocity.vector_size(), velocity.vector_size(), t);
}

CsrMatrix assemble_b(const DofMap& velocity, const DofMap& pressure) {
  require_vector(velocity, "assemble_b");
  require_scalar(pressure, "assemble_b");
  if (velocity.mesh_ptr() != pressure.mesh_ptr()) throw MeshMismatch("assemble_b: spaces on different meshes");
  const BasisTable vt(velocity.family().tag, assembly_degree(velocity));
  const BasisTable pt(pressure.family().tag, assembly_degree(velocity));
  const int nlv = velocity.local_count(), nlp = pressure.local_count();
  TripletList t;
  cell_loop(velocity.mesh().num_cells(), &t, nullptr, [&](int cell, Local& l) {
    const int nr = fill_dofs(pressure, cell, l.rows);
    const int nc = fill_dofs(velocity, cell, l.cols);
    l.reset(nr, nc);
    const CellGeometry g(velocity.mesh(), cell);
    const double jdet = std::abs(g.det);
    for (std::size_t q = 0; q < vt.rule.weights.size(); ++q) {
      const PhysBasis pv = to_physical(vt.basis[q], g);
      const double w = vt.rule.weights[q] * jdet;
      for (int i = 0; i < nlp; ++i)
        for (int j = 0; j < nlv; ++j)
          for (int c = 0; c < 2; ++c) l.at(i, c * nlv + j) -= w * pt.basis[q].values[i] * pv.grad[j][c];
    }
  });
  return CsrMatrix::from_triplets(pressure.size(), velocity.vector_size(), t);
}

CsrMatrix assemble_mass(const DofMap& scalar) {
  require_scalar(scalar, "assemble_mass");
  const BasisTable tab(scalar.family().tag, assembly_degree(scalar));
  const int nl = scalar.local_count();
  TripletList t;
  cell_loop(scalar.mesh().num_cells(), &t, nullptr, [&](int cell, Local& l) {
    const int n = fill_dofs(scalar, cell, l.rows);
    l.cols = l.rows;
    l.reset(n, n);
    const double jdet = std::abs(CellGeometry(scalar.mesh(), cell).det);
    for (std::size_t q = 0; q < tab.rule.weights.size(); ++q) {
      const double w = tab.rule.weights[q] * jdet;
      for (int i = 0; i < nl; ++i)
        for (int j = 0; j < nl; ++j) l.at(i, j) += w * tab.basis[q].values[i] * tab.basis[q].values[j];
    }
  });
  return CsrMatrix::from_triplets(scalar.size(), scalar.size(), t);
}

Convection assemble_convection(const DofMap& velocity, const FieldSource& state, ConvectionMode mode,
                               const ModelParams& params) {
  require_vector(velocity, "assemble_convection");
  const BasisTable tab(velocity.family().tag, assembly_degree(velocity));
  const TriMesh& mesh = velocity.mesh();
  const int nl = velocity.local_count();
  const bool newton = mode == ConvectionMode::Newton;
  TripletList t;
  Convection out;
  if (newton) out.load.assign(velocity.vector_size(), 0.0);
  cell_loop(mesh.num_cells(), &t, newton ? &out.load : nullptr, [&](int cell, Local& l) {
    const int n = fill_dofs(velocity, cell, l.rows);
    l.cols = l.rows;
    l.reset(n, n);
    const CellGeometry g(mesh, cell);
    const double jdet = std::abs(g.det);
    for (std::size_t q = 0; q < tab.rule.weights.size(); ++q) {
      const auto& bary = tab.rule.points[q];
      const FieldSample a = state.at(mesh, cell, bary, mesh.map(cell, bary));
      const PhysBasis pb = to_physical(tab.basis[q], g);
      const double w = params.rho * tab.rule.weights[q] * jdet;
      for (int i = 0; i < nl; ++i) {
        for (int j = 0; j < nl; ++j) {
          const double adv = w * pb.val[i] * (a.value[0] * pb.grad[j][0] + a.value[1] * pb.grad[j][1]);
          for (int c = 0; c < 2; ++c) l.at(c * nl + i, c * nl + j) += adv;
          if (newton) {
            const double m = w * pb.val[i] * pb.val[j];
            for (int d = 0; d < 2; ++d)
              for (int c = 0; c < 2; ++c) l.at(d * nl + i, c * nl + j) += m * a.grad[d][c];
          }
        }
        if (newton)
          for (int d = 0; d < 2; ++d)
            l.v[d * nl + i] += w * pb.val[i] * (a.value[0] * a.grad[d][0] + a.value[1] * a.grad[d][1]);
      }
    }
  });
  out.matrix = CsrMatrix::from_triplets(velocity.vector_size(), velocity.vector_size(), t);
  return out;
}

InterfaceCoupling assemble_interface_coupling(const CoupledMesh& mesh, const DofMap& velocity, const DofMap& phi,
                                              const ModelParams& params) {
  require_vector(velocity, "assemble_interface_coupling");
  require_scalar(phi, "assemble_interface_coupling");
  if (velocity.mesh_ptr() != mesh.fluid || phi.mesh_ptr() != mesh.porous)
    throw MeshMismatch("assemble_interface_coupling: spaces not on the coupled mesh");
  const auto fe = attach_boundary_edges(*mesh.fluid);
  const auto pe = attach_boundary_edges(*mesh.porous);
  const EdgeRule er = quad_rule_edge(kInterfacePoints);
  const int nlv = velocity.local_count(), nlp = phi.local_count();
  TripletList tv, tp;
  for (const InterfacePair& pair : mesh.interface_pairs) {
    const EdgeInCell& f = fe[pair.fluid_edge];
    const EdgeInCell& p = pe[pair.porous_edge];
    const auto vd = velocity.cell_dofs(f.cell);
    const auto pd = phi.cell_dofs(p.cell);
    const double len = f.length();
    for (std::size_t q = 0; q < er.points.size(); ++q) {
      const double tf = er.points[q];
      const Point2 x = f.point(tf);
      const BasisEval bv = ref_basis(velocity.family().tag, f.bary(tf));
      const BasisEval bp = ref_basis(phi.family().tag, p.bary(p.param(x)));
      const double w = params.rho_g() * er.weights[q] * len;
      for (int c = 0; c < 2; ++c) {
        if (kInterfaceNormal[c] == 0.0) continue;
        for (int i = 0; i < nlv; ++i)
          for (int j = 0; j < nlp; ++j) {
            const double s = w * kInterfaceNormal[c] * bv.values[i] * bp.values[j];
            tv.add(c * velocity.size() + vd[i], pd[j], s);
            tp.add(pd[j], c * velocity.size() + vd[i], -s);
          }
      }
    }
  }
  return {CsrMatrix::from_triplets(velocity.vector_size(), phi.size(), tv),
          CsrMatrix::from_triplets(phi.size(), velocity.vector_size(), tp)};
}

std::vector<double> assemble_interface_load_darcy(const DofMap& phi, const FieldSource& velocity_source,
                                                  const ModelParams& params) {
  require_scalar(phi, "assemble_interface_load_darcy");
  const TriMesh& mesh = phi.mesh();
  const auto attached = attach_boundary_edges(mesh);
  const EdgeRule er = quad_rule_edge(kInterfacePoints);
  std::vector<double> load(phi.size(), 0.0);
  for (int b : interface_edges(mesh)) {
    const EdgeInCell& e = attached[b];
    const auto dofs = phi.cell_dofs(e.cell);
    const double len = e.length();
    for (std::size_t q = 0; q < er.points.size(); ++q) {
      const Point2 x = e.point(er.points[q]);
      const FieldSample u = velocity_source.at(x);
      const double un = u.value[0] * kInterfaceNormal[0] + u.value[1] * kInterfaceNormal[1];
      const BasisEval be = ref_basis(phi.family().tag, e.bary(er.points[q]));
      const double w = params.rho_g() * er.weights[q] * len * un;
      for (int i = 0; i < phi.local_count(); ++i) load[dofs[i]] += w * be.values[i];
    }
  }
  return load;
}

std::vector<double> assemble_interface_load_ns(const DofMap& velocity, const FieldSource& head_source,
                                               const ModelParams& params) {
  require_vector(velocity, "assemble_interface_load_ns");
  const TriMesh& mesh = velocity.mesh();
  const auto attached = attach_boundary_edges(mesh);
  const EdgeRule er = quad_rule_edge(kInterfacePoints);
  std::vector<double> load(velocity.vector_size(), 0.0);
  for (int b : interface_edges(mesh)) {
    const EdgeInCell& e = attached[b];
    const auto dofs = velocity.cell_dofs(e.cell);
    const double len = e.length();
    for (std::size_t q = 0; q < er.points.size(); ++q) {
      const Point2 x = e.point(er.points[q]);
      const double head = head_source.at(x).value[0];
      const BasisEval be = ref_basis(velocity.family().tag, e.bary(er.points[q]));
      const double w = -params.rho_g() * er.weights[q] * len * head;
      for (int c = 0; c < 2; ++c) {
        if (kInterfaceNormal[c] == 0.0) continue;
        for (int i = 0; i < velocity.local_count(); ++i)
          load[c * velocity.size() + dofs[i]] += w * kInterfaceNormal[c] * be.values[i];
      }
    }
  }
  return load;
}

std::vector<double> assemble_volume_load(const DofMap& scalar, const ScalarFunction& f, double weight,
                                         int quad_degree) {
  require_scalar(scalar, "assemble_volume_load");
  const BasisTable tab(scalar.family().tag, quad_degree > 0 ? quad_degree : assembly_degree(scalar));
  const TriMesh& mesh = scalar.mesh();
  std::vector<double> load(scalar.size(), 0.0);
  cell_loop(mesh.num_cells(), nullptr, &load, [&](int cell, Local& l) {
    const int n = fill_dofs(scalar, cell, l.rows);
    l.reset(n, 0);
    const double jdet = std::abs(CellGeometry(mesh, cell).det);
    for (std::size_t q = 0; q < tab.rule.weights.size(); ++q) {
      const double w = weight * tab.rule.weights[q] * jdet * f(mesh.map(cell, tab.rule.points[q]));
      for (int i = 0; i < n; ++i) l.v[i] += w * tab.basis[q].values[i];
    }
  });
  return load;
}

std::vector<double> assemble_volume_load(const DofMap& velocity, const VectorFunction& f, double weight,
                                         int quad_degree) {
  require_vector(velocity, "assemble_volume_load");
  const BasisTable tab(velocity.family().tag, quad_degree > 0 ? quad_degree : assembly_degree(velocity));
  const TriMesh& mesh = velocity.mesh();
  const int nl = velocity.local_count();
  std::vector<double> load(velocity.vector_size(), 0.0);
  cell_loop(mesh.num_cells(), nullptr, &load, [&](int cell, Local& l) {
    const int n = fill_dofs(velocity, cell, l.rows);
    l.reset(n, 0);
    const double jdet = std::abs(CellGeometry(mesh, cell).det);
    for (std::size_t q = 0; q < tab.rule.weights.size(); ++q) {
      const auto fx = f(mesh.map(cell, tab.rule.points[q]));
      const double w = weight * tab.rule.weights[q] * jdet;
      for (int i = 0; i < nl; ++i)
        for (int c = 0; c < 2; ++c) l.v[c * nl + i] += w * fx[c] * tab.basis[q].values[i];
    }
  });
  return load;
}

std::vector<double> assemble_correction_load(const DofMap& velocity, const FieldSource& a, const FieldSource& s,
                                             const ModelParams& params) {
  require_vector(velocity, "assemble_correction_load");
  const BasisTable tab(velocity.family().tag, assembly_degree(velocity));
  const TriMesh& mesh = velocity.mesh();
  const int nl = velocity.local_count();
  std::vector<double> load(velocity.vector_size(), 0.0);
  cell_loop(mesh.num_cells(), nullptr, &load, [&](int cell, Local& l) {
    const int n = fill_dofs(velocity, cell, l.rows);
    l.reset(n, 0);
    const double jdet = std::abs(CellGeometry(mesh, cell).det);
    for (std::size_t q = 0; q < tab.rule.weights.size(); ++q) {
      const auto& bary = tab.rule.points[q];
      const Point2 x = mesh.map(cell, bary);
      const FieldSample av = a.at(mesh, cell, bary, x);
      const FieldSample sv = s.at(mesh, cell, bary, x);
      const double w = params.rho * tab.rule.weights[q] * jdet;
      for (int d = 0; d < 2; ++d) {
        // (a . grad) s_d + (s . grad)(a_d - s_d)
        const double conv = av.value[0] * sv.grad[d][0] + av.value[1] * sv.grad[d][1] +
                            sv.value[0] * (av.grad[d][0] - sv.grad[d][0]) +
                            sv.value[1] * (av.grad[d][1] - sv.grad[d][1]);
        for (int i = 0; i < nl; ++i) l.v[d * nl + i] += w * conv * tab.basis[q].values[i];
      }
    }
  });
  return load;
}

double trilinear(const DiscreteField& a, const DiscreteField& b, const DiscreteField& w, const ModelParams& params) {
  const TriMesh& mesh = w.mesh();
  const TriangleRule rule = quad_rule_tri(8);
  const FieldSource as(a), bs(b);
  double sum = 0.0;
  for (int cell = 0; cell < mesh.num_cells(); ++cell) {
    const double jdet = std::abs(CellGeometry(mesh, cell).det);
    for (std::size_t q = 0; q < rule.weights.size(); ++q) {
      const auto& bary = rule.points[q];
      const Point2 x = mesh.map(cell, bary);
      const FieldSample av = as.at(mesh, cell, bary, x);
      const FieldSample bv = bs.at(mesh, cell, bary, x);
      const FieldSample wv = eval_field_in_cell(w, cell, bary);
      double s = 0.0;
      for (int d = 0; d < 2; ++d) s += (av.value[0] * bv.grad[d][0] + av.value[1] * bv.grad[d][1]) * wv.value[d];
      sum += params.rho * rule.weights[q] * jdet * s;
    }
  }
  return sum;
}

}  // namespace nsdarcy
