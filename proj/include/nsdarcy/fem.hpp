#pragma once

#include <array>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "nsdarcy/mesh.hpp"

namespace nsdarcy {

enum class Family : std::uint8_t { P1, P2, MiniVelocity };

/// Scalar or vector Lagrange family. MiniVelocity is P1 plus the cubic
/// bubble 27*l0*l1*l2 in every component.
struct ElementFamily {
  Family tag = Family::P1;
  int components = 1;

  int local_count() const;  // shape functions per component per cell
  friend bool operator==(const ElementFamily&, const ElementFamily&) = default;
};

inline constexpr int kMaxLocal = 6;

/// Shape-function values and gradients with respect to the reference
/// coordinates (xi, eta), where l1 = xi, l2 = eta, l0 = 1 - xi - eta.
struct BasisEval {
  int count = 0;
  std::array<double, kMaxLocal> values{};
  std::array<std::array<double, 2>, kMaxLocal> grads{};
};

/// Local shape functions at a barycentric point. P1: one per vertex. P2:
/// vertices then the midpoint of the edge opposite each vertex. Mini: the P1
/// functions then the bubble.
BasisEval ref_basis(Family family, const std::array<double, 3>& bary);

/// Affine map data of one cell: x = v0 + J * (xi, eta).
struct CellGeometry {
  std::array<std::array<double, 2>, 2> jac{};      // columns v1-v0, v2-v0
  std::array<std::array<double, 2>, 2> inv_jac_t{};
  double det = 0.0;

  CellGeometry(const TriMesh& mesh, int cell);

  std::array<double, 2> physical_grad(const std::array<double, 2>& ref_grad) const {
    return {inv_jac_t[0][0] * ref_grad[0] + inv_jac_t[0][1] * ref_grad[1],
            inv_jac_t[1][0] * ref_grad[0] + inv_jac_t[1][1] * ref_grad[1]};
  }
};

/// Degree-of-freedom numbering for one scalar family on one mesh: vertices,
/// then edges (P2), then cells (Mini bubbles). Vector fields store component
/// c of scalar dof d at index c*size()+d.
class DofMap {
 public:
  DofMap(std::shared_ptr<const TriMesh> mesh, ElementFamily family);

  const ElementFamily& family() const noexcept { return family_; }
  const TriMesh& mesh() const noexcept { return *mesh_; }
  const std::shared_ptr<const TriMesh>& mesh_ptr() const noexcept { return mesh_; }

  /// Scalar dof count (per component).
  int size() const noexcept { return ndofs_; }
  int components() const noexcept { return family_.components; }
  /// Length of a coefficient vector on this map.
  int vector_size() const noexcept { return ndofs_ * family_.components; }
  int local_count() const noexcept { return local_; }

  std::span<const int> cell_dofs(int cell) const {
    return {cell_dofs_.data() + static_cast<std::size_t>(cell) * local_, static_cast<std::size_t>(local_)};
  }
  const Point2& location(int dof) const { return locations_[dof]; }
  std::span<const Point2> locations() const noexcept { return locations_; }
  BoundaryTag tag(int dof) const { return tags_[dof]; }

  /// Every dof on a tagged boundary, once, ascending. Corner dofs shared by
  /// the interface and an outer side carry the outer tag.
  std::span<const int> boundary_dofs() const noexcept { return boundary_dofs_; }

  /// Scalar dofs carrying an essential (outer) condition, ascending.
  std::vector<int> dirichlet_dofs() const;

  /// Scalar dofs on the closure of one boundary edge (2 for P1/Mini, 3 for
  /// P2: endpoints then midpoint).
  std::vector<int> boundary_edge_dofs(int boundary_edge) const;

 private:
  std::shared_ptr<const TriMesh> mesh_;
  ElementFamily family_;
  int ndofs_ = 0;
  int local_ = 0;
  std::vector<int> cell_dofs_;
  std::vector<Point2> locations_;
  std::vector<BoundaryTag> tags_;
  std::vector<int> boundary_dofs_;
};

std::shared_ptr<const DofMap> build_dofmap(std::shared_ptr<const TriMesh> mesh, ElementFamily family);

/// Point value and gradient of a scalar or 2-vector field. For scalars only
/// index 0 is meaningful; grad[c] is the gradient of component c.
struct FieldSample {
  std::array<double, 2> value{};
  std::array<std::array<double, 2>, 2> grad{};
};

/// Coefficients over a dof map. Fields share their (immutable) dof map.
struct DiscreteField {
  std::shared_ptr<const DofMap> dofmap;
  std::vector<double> coeffs;

  DiscreteField() = default;
  explicit DiscreteField(std::shared_ptr<const DofMap> map)
      : dofmap(std::move(map)), coeffs(static_cast<std::size_t>(dofmap->vector_size()), 0.0) {}
  DiscreteField(std::shared_ptr<const DofMap> map, std::vector<double> c);

  int components() const { return dofmap->components(); }
  const TriMesh& mesh() const { return dofmap->mesh(); }
};

/// Evaluate inside a known cell at barycentric coordinates.
FieldSample eval_field_in_cell(const DiscreteField& field, int cell, const std::array<double, 3>& bary);

/// Locate p and evaluate. Throws OutOfDomain if p is outside the mesh.
FieldSample eval_field(const DiscreteField& field, Point2 p);

using ScalarFunction = std::function<double(Point2)>;
using VectorFunction = std::function<std::array<double, 2>(Point2)>;

/// Nodal interpolation. Mini bubble coefficients are set to zero.
DiscreteField interpolate(const ScalarFunction& f, std::shared_ptr<const DofMap> dofmap);
DiscreteField interpolate(const VectorFunction& f, std::shared_ptr<const DofMap> dofmap);

}  // namespace nsdarcy
