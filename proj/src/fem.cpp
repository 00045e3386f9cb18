#include "nsdarcy/fem.hpp"

#include <algorithm>
#include <cassert>

#include "nsdarcy/errors.hpp"

namespace nsdarcy {

int ElementFamily::local_count() const {
  switch (tag) {
    case Family::P1: return 3;
    case Family::P2: return 6;
    case Family::MiniVelocity: return 4;
  }
  return 0;
}

BasisEval ref_basis(Family family, const std::array<double, 3>& bary) {
  const double l0 = bary[0], l1 = bary[1], l2 = bary[2];
  // d(l0, l1, l2)/d(xi, eta)
  constexpr std::array<std::array<double, 2>, 3> dl{{{-1.0, -1.0}, {1.0, 0.0}, {0.0, 1.0}}};
  BasisEval b;
  switch (family) {
    case Family::P1:
      b.count = 3;
      for (int i = 0; i < 3; ++i) {
        b.values[i] = bary[i];
        b.grads[i] = dl[i];
      }
      break;
    case Family::MiniVelocity: {
      b.count = 4;
      for (int i = 0; i < 3; ++i) {
        b.values[i] = bary[i];
        b.grads[i] = dl[i];
      }
      b.values[3] = 27.0 * l0 * l1 * l2;
      for (int d = 0; d < 2; ++d)
        b.grads[3][d] = 27.0 * (dl[0][d] * l1 * l2 + l0 * dl[1][d] * l2 + l0 * l1 * dl[2][d]);
      break;
    }
    case Family::P2: {
      b.count = 6;
      for (int i = 0; i < 3; ++i) {
        b.values[i] = bary[i] * (2.0 * bary[i] - 1.0);
        for (int d = 0; d < 2; ++d) b.grads[i][d] = (4.0 * bary[i] - 1.0) * dl[i][d];
      }
      for (int k = 0; k < 3; ++k) {
        const int a = (k + 1) % 3, c = (k + 2) % 3;
        b.values[3 + k] = 4.0 * bary[a] * bary[c];
        for (int d = 0; d < 2; ++d) b.grads[3 + k][d] = 4.0 * (dl[a][d] * bary[c] + bary[a] * dl[c][d]);
      }
      break;
    }
  }
  return b;
}

CellGeometry::CellGeometry(const TriMesh& mesh, int cell) {
  const auto& t = mesh.cell(cell);
  const Point2 &a = mesh.vertex(t[0]), &b = mesh.vertex(t[1]), &c = mesh.vertex(t[2]);
  jac = {{{b.x - a.x, c.x - a.x}, {b.y - a.y, c.y - a.y}}};
  det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
  const double inv = 1.0 / det;
  // inverse transpose of J
  inv_jac_t = {{{jac[1][1] * inv, -jac[1][0] * inv}, {-jac[0][1] * inv, jac[0][0] * inv}}};
}

DofMap::DofMap(std::shared_ptr<const TriMesh> mesh, ElementFamily family)
    : mesh_(std::move(mesh)), family_(family), local_(family.local_count()) {
  const TriMesh& m = *mesh_;
  const int nv = m.num_vertices(), ne = m.num_edges(), nc = m.num_cells();
  switch (family_.tag) {
    case Family::P1: ndofs_ = nv; break;
    case Family::P2: ndofs_ = nv + ne; break;
    case Family::MiniVelocity: ndofs_ = nv + nc; break;
  }
  cell_dofs_.resize(static_cast<std::size_t>(nc) * local_);
  for (int c = 0; c < nc; ++c) {
    int* out = cell_dofs_.data() + static_cast<std::size_t>(c) * local_;
    for (int k = 0; k < 3; ++k) out[k] = m.cell(c)[k];
    if (family_.tag == Family::P2)
      for (int k = 0; k < 3; ++k) out[3 + k] = nv + m.cell_edges()[c][k];
    if (family_.tag == Family::MiniVelocity) out[3] = nv + c;
  }

  locations_.assign(m.vertices().begin(), m.vertices().end());
  if (family_.tag == Family::P2) {
    for (const auto& e : m.edges()) {
      const Point2 &a = m.vertex(e[0]), &b = m.vertex(e[1]);
      locations_.push_back({0.5 * (a.x + b.x), 0.5 * (a.y + b.y)});
    }
  } else if (family_.tag == Family::MiniVelocity) {
    for (int c = 0; c < nc; ++c) locations_.push_back(m.centroid(c));
  }

  tags_.assign(ndofs_, BoundaryTag::None);
  auto mark = [&](int dof, BoundaryTag t) {
    if (tags_[dof] == BoundaryTag::None || tags_[dof] == BoundaryTag::Interface) tags_[dof] = t;
  };
  const auto bedges = m.boundary_edges();
  for (std::size_t b = 0; b < bedges.size(); ++b) {
    const BoundaryTag t = bedges[b].tag;
    mark(bedges[b].vertices[0], t);
    mark(bedges[b].vertices[1], t);
    if (family_.tag == Family::P2) mark(nv + m.boundary_edge_ids()[b], t);
  }
  for (int d = 0; d < ndofs_; ++d)
    if (tags_[d] != BoundaryTag::None) boundary_dofs_.push_back(d);
}

std::vector<int> DofMap::dirichlet_dofs() const {
  std::vector<int> out;
  for (int d : boundary_dofs_)
    if (tags_[d] == BoundaryTag::OuterFluid || tags_[d] == BoundaryTag::OuterPorous) out.push_back(d);
  return out;
}

std::vector<int> DofMap::boundary_edge_dofs(int boundary_edge) const {
  const auto& be = mesh_->boundary_edges()[boundary_edge];
  std::vector<int> out{be.vertices[0], be.vertices[1]};
  if (family_.tag == Family::P2) out.push_back(mesh_->num_vertices() + mesh_->boundary_edge_ids()[boundary_edge]);
  return out;
}

std::shared_ptr<const DofMap> build_dofmap(std::shared_ptr<const TriMesh> mesh, ElementFamily family) {
  return std::make_shared<const DofMap>(std::move(mesh), family);
}

DiscreteField::DiscreteField(std::shared_ptr<const DofMap> map, std::vector<double> c)
    : dofmap(std::move(map)), coeffs(std::move(c)) {
  if (static_cast<int>(coeffs.size()) != dofmap->vector_size())
    throw DimensionMismatch("DiscreteField: coefficient length does not match dof map");
}

FieldSample eval_field_in_cell(const DiscreteField& field, int cell, const std::array<double, 3>& bary) {
  const DofMap& dm = *field.dofmap;
  const BasisEval b = ref_basis(dm.family().tag, bary);
  const CellGeometry geo(dm.mesh(), cell);
  const auto dofs = dm.cell_dofs(cell);
  const int nd = dm.size();
  FieldSample s;
  for (int c = 0; c < dm.components(); ++c) {
    const double* coef = field.coeffs.data() + static_cast<std::size_t>(c) * nd;
    std::array<double, 2> ref_grad{0.0, 0.0};
    for (int i = 0; i < b.count; ++i) {
      const double w = coef[dofs[i]];
      s.value[c] += w * b.values[i];
      ref_grad[0] += w * b.grads[i][0];
      ref_grad[1] += w * b.grads[i][1];
    }
    s.grad[c] = geo.physical_grad(ref_grad);
  }
  return s;
}

FieldSample eval_field(const DiscreteField& field, Point2 p) {
  const Location loc = field.mesh().locate(p);
  return eval_field_in_cell(field, loc.cell, loc.bary);
}

DiscreteField interpolate(const ScalarFunction& f, std::shared_ptr<const DofMap> dofmap) {
  DiscreteField out(std::move(dofmap));
  const DofMap& dm = *out.dofmap;
  const int limit = dm.family().tag == Family::MiniVelocity ? dm.mesh().num_vertices() : dm.size();
  for (int c = 0; c < dm.components(); ++c)
    for (int d = 0; d < limit; ++d) out.coeffs[static_cast<std::size_t>(c) * dm.size() + d] = f(dm.location(d));
  return out;
}

DiscreteField interpolate(const VectorFunction& f, std::shared_ptr<const DofMap> dofmap) {
  DiscreteField out(std::move(dofmap));
  const DofMap& dm = *out.dofmap;
  if (dm.components() != 2) throw DimensionMismatch("interpolate: vector function needs a 2-component map");
  const int limit = dm.family().tag == Family::MiniVelocity ? dm.mesh().num_vertices() : dm.size();
  for (int d = 0; d < limit; ++d) {
    const auto v = f(dm.location(d));
    out.coeffs[d] = v[0];
    out.coeffs[static_cast<std::size_t>(dm.size()) + d] = v[1];
  }
  return out;
}

}  // namespace nsdarcy
