#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace nsdarcy {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

enum class Subdomain : std::uint8_t { Fluid, Porous };

enum class BoundaryTag : std::uint8_t { None, OuterFluid, OuterPorous, Interface };

/// Which side of the rectangle carries the interface.
enum class Side : std::uint8_t { Bottom, Right, Top, Left };

struct Rect {
  Point2 lo;
  Point2 hi;
};

struct BoundaryEdge {
  std::array<int, 2> vertices;
  BoundaryTag tag = BoundaryTag::None;
};

/// Cell and barycentric coordinates of a located point.
struct Location {
  int cell = -1;
  std::array<double, 3> bary{};
};

/// Structured triangulation of a rectangle: an n-by-n grid of squares, each
/// split by its lower-left to upper-right diagonal.
///
/// Vertex (i, j) has id j*(n+1)+i. Square (i, j) holds cells 2*(j*n+i)
/// (lower-right triangle) and 2*(j*n+i)+1 (upper-left triangle). Every cell is
/// counter-clockwise. Edges are numbered in order of first appearance while
/// sweeping cells; local edge k of a cell is the edge opposite local vertex k.
class TriMesh {
 public:
  TriMesh(int n, Rect rect, Subdomain subdomain, Side interface_side);

  int subdivisions() const noexcept { return n_; }
  double h() const noexcept { return 1.0 / n_; }
  const Rect& rect() const noexcept { return rect_; }
  Subdomain subdomain() const noexcept { return subdomain_; }
  Side interface_side() const noexcept { return interface_side_; }

  int num_vertices() const noexcept { return static_cast<int>(vertices_.size()); }
  int num_cells() const noexcept { return static_cast<int>(cells_.size()); }
  int num_edges() const noexcept { return static_cast<int>(edges_.size()); }

  std::span<const Point2> vertices() const noexcept { return vertices_; }
  std::span<const std::array<int, 3>> cells() const noexcept { return cells_; }
  std::span<const std::array<int, 2>> edges() const noexcept { return edges_; }
  std::span<const std::array<int, 3>> cell_edges() const noexcept { return cell_edges_; }
  std::span<const BoundaryEdge> boundary_edges() const noexcept { return boundary_edges_; }
  /// Mesh-edge id of each boundary edge, parallel to boundary_edges().
  std::span<const int> boundary_edge_ids() const noexcept { return boundary_edge_ids_; }

  const Point2& vertex(int v) const { return vertices_[v]; }
  const std::array<int, 3>& cell(int c) const { return cells_[c]; }

  /// Signed area (positive for every cell of a valid mesh).
  double cell_area(int c) const;
  Point2 centroid(int c) const;

  /// Point location by grid arithmetic. Points on shared edges or vertices
  /// resolve to the lowest cell id containing them. Throws OutOfDomain if p
  /// lies outside the rectangle by more than 1e-12.
  Location locate(Point2 p) const;

  /// Affine image of barycentric coordinates in cell c.
  Point2 map(int c, const std::array<double, 3>& bary) const;

 private:
  int n_;
  Rect rect_;
  Subdomain subdomain_;
  Side interface_side_;
  std::vector<Point2> vertices_;
  std::vector<std::array<int, 3>> cells_;
  std::vector<std::array<int, 2>> edges_;
  std::vector<std::array<int, 3>> cell_edges_;
  std::vector<BoundaryEdge> boundary_edges_;
  std::vector<int> boundary_edge_ids_;
};

/// Free-function form of TriMesh::locate.
Location locate_point(const TriMesh& mesh, Point2 p);

struct InterfacePair {
  int fluid_edge;   // index into fluid->boundary_edges()
  int porous_edge;  // index into porous->boundary_edges()
};

/// Fluid mesh on (0,1)x(1,2) and porous mesh on (0,1)x(0,1), matching on y = 1.
struct CoupledMesh {
  std::shared_ptr<const TriMesh> fluid;
  std::shared_ptr<const TriMesh> porous;
  std::vector<InterfacePair> interface_pairs;

  int subdivisions() const { return fluid->subdivisions(); }
};

CoupledMesh build_coupled_mesh(int n);

/// Strictly increasing list of subdivision counts, coarse to fine.
class MeshSchedule {
 public:
  MeshSchedule() = default;
  explicit MeshSchedule(std::vector<int> subdivisions);

  std::span<const int> subdivisions() const noexcept { return n_; }
  int levels() const noexcept { return static_cast<int>(n_.size()); }
  int operator[](int l) const { return n_[l]; }

  friend bool operator==(const MeshSchedule&, const MeshSchedule&) = default;

 private:
  std::vector<int> n_;
};

enum class ScheduleKind { Square, CubeThenSquare, PairList };

struct ScheduleSpec {
  ScheduleKind kind = ScheduleKind::Square;
  int n0 = 2;
  int levels = 2;  // number of fine levels L
  std::vector<std::vector<int>> lists;  // PairList only
  int cap = 1024;
};

/// Resolve a ScheduleSpec. Square and CubeThenSquare yield one schedule;
/// PairList yields one schedule per explicit list.
std::vector<MeshSchedule> make_schedule(const ScheduleSpec& spec);

}  // namespace nsdarcy
