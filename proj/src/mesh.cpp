#include "nsdarcy/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_map>

#include "nsdarcy/errors.hpp"

namespace nsdarcy {

namespace {

constexpr double kLocateTol = 1e-12;

// Grid interval holding t (t in units of h), preferring the lower interval
// when t sits on a grid line. Returns the interval and the local coordinate.
std::pair<int, double> grid_interval(double t, int n) {
  const double r = std::round(t);
  if (std::abs(t - r) < 1e-13 * std::max(1.0, std::abs(t))) t = r;
  int i = (t == r) ? static_cast<int>(r) - 1 : static_cast<int>(std::floor(t));
  i = std::clamp(i, 0, n - 1);
  double local = std::clamp(t - i, 0.0, 1.0);
  return {i, local};
}

}  // namespace

TriMesh::TriMesh(int n, Rect rect, Subdomain subdomain, Side interface_side)
    : n_(n), rect_(rect), subdomain_(subdomain), interface_side_(interface_side) {
  if (n < 1) throw Error("TriMesh: subdivision count must be >= 1");
  const double wx = rect.hi.x - rect.lo.x;
  const double wy = rect.hi.y - rect.lo.y;
  vertices_.reserve(static_cast<std::size_t>(n + 1) * (n + 1));
  for (int j = 0; j <= n; ++j) {
    const double y = (j == n) ? rect.hi.y : rect.lo.y + wy * j / n;
    for (int i = 0; i <= n; ++i) {
      const double x = (i == n) ? rect.hi.x : rect.lo.x + wx * i / n;
      vertices_.push_back({x, y});
    }
  }
  auto vid = [n](int i, int j) { return j * (n + 1) + i; };
  cells_.reserve(2 * static_cast<std::size_t>(n) * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int v00 = vid(i, j), v10 = vid(i + 1, j), v01 = vid(i, j + 1), v11 = vid(i + 1, j + 1);
      cells_.push_back({v00, v10, v11});
      cells_.push_back({v00, v11, v01});
    }
  }

  std::unordered_map<long long, int> edge_index;
  edge_index.reserve(cells_.size() * 2);
  cell_edges_.resize(cells_.size());
  for (std::size_t c = 0; c < cells_.size(); ++c) {
    const auto& t = cells_[c];
    for (int k = 0; k < 3; ++k) {
      int a = t[(k + 1) % 3], b = t[(k + 2) % 3];
      if (a > b) std::swap(a, b);
      const long long key = static_cast<long long>(a) * vertices_.size() + b;
      auto [it, inserted] = edge_index.try_emplace(key, static_cast<int>(edges_.size()));
      if (inserted) edges_.push_back({a, b});
      cell_edges_[c][k] = it->second;
    }
  }

  const BoundaryTag outer =
      subdomain == Subdomain::Fluid ? BoundaryTag::OuterFluid : BoundaryTag::OuterPorous;
  auto tag_for = [&](Side s) { return s == interface_side ? BoundaryTag::Interface : outer; };
  auto add_edge = [&](int a, int b, Side s) {
    boundary_edges_.push_back({{a, b}, tag_for(s)});
    const long long key = static_cast<long long>(std::min(a, b)) * vertices_.size() + std::max(a, b);
    boundary_edge_ids_.push_back(edge_index.at(key));
  };
  for (int i = 0; i < n; ++i) add_edge(vid(i, 0), vid(i + 1, 0), Side::Bottom);
  for (int j = 0; j < n; ++j) add_edge(vid(n, j), vid(n, j + 1), Side::Right);
  for (int i = n; i > 0; --i) add_edge(vid(i, n), vid(i - 1, n), Side::Top);
  for (int j = n; j > 0; --j) add_edge(vid(0, j), vid(0, j - 1), Side::Left);
}

double TriMesh::cell_area(int c) const {
  const auto& t = cells_[c];
  const Point2 &a = vertices_[t[0]], &b = vertices_[t[1]], &d = vertices_[t[2]];
  return 0.5 * ((b.x - a.x) * (d.y - a.y) - (d.x - a.x) * (b.y - a.y));
}

Point2 TriMesh::centroid(int c) const {
  return map(c, {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
}

Point2 TriMesh::map(int c, const std::array<double, 3>& bary) const {
  const auto& t = cells_[c];
  Point2 p{0.0, 0.0};
  for (int k = 0; k < 3; ++k) {
    p.x += bary[k] * vertices_[t[k]].x;
    p.y += bary[k] * vertices_[t[k]].y;
  }
  return p;
}

Location TriMesh::locate(Point2 p) const {
  const double wx = rect_.hi.x - rect_.lo.x;
  const double wy = rect_.hi.y - rect_.lo.y;
  if (p.x < rect_.lo.x - kLocateTol || p.x > rect_.hi.x + kLocateTol ||
      p.y < rect_.lo.y - kLocateTol || p.y > rect_.hi.y + kLocateTol || !std::isfinite(p.x) ||
      !std::isfinite(p.y)) {
    std::ostringstream os;
    os << "point (" << p.x << ", " << p.y << ") outside mesh rectangle";
    throw OutOfDomain(os.str());
  }
  const auto [i, xi] = grid_interval((p.x - rect_.lo.x) / wx * n_, n_);
  const auto [j, eta] = grid_interval((p.y - rect_.lo.y) / wy * n_, n_);
  const int square = j * n_ + i;
  Location loc;
  if (xi >= eta) {
    loc.cell = 2 * square;  // (v00, v10, v11)
    loc.bary = {1.0 - xi, xi - eta, eta};
  } else {
    loc.cell = 2 * square + 1;  // (v00, v11, v01)
    loc.bary = {1.0 - eta, xi, eta - xi};
  }
  return loc;
}

Location locate_point(const TriMesh& mesh, Point2 p) { return mesh.locate(p); }

CoupledMesh build_coupled_mesh(int n) {
  CoupledMesh cm;
  cm.fluid = std::make_shared<TriMesh>(n, Rect{{0.0, 1.0}, {1.0, 2.0}}, Subdomain::Fluid, Side::Bottom);
  cm.porous = std::make_shared<TriMesh>(n, Rect{{0.0, 0.0}, {1.0, 1.0}}, Subdomain::Porous, Side::Top);
  // Fluid bottom edges run left to right in boundary order [0, n); porous
  // top edges run right to left in [2n, 3n).
  for (int i = 0; i < n; ++i) cm.interface_pairs.push_back({i, 3 * n - 1 - i});
  return cm;
}

MeshSchedule::MeshSchedule(std::vector<int> subdivisions) : n_(std::move(subdivisions)) {
  if (n_.empty()) throw ValidationError("schedule", "empty schedule");
  for (std::size_t l = 0; l < n_.size(); ++l) {
    if (n_[l] < 2) throw ValidationError("schedule", "every subdivision count must be >= 2");
    if (l > 0 && n_[l] <= n_[l - 1])
      throw ValidationError("schedule", "subdivision counts must be strictly increasing");
  }
}

std::vector<MeshSchedule> make_schedule(const ScheduleSpec& spec) {
  auto check_cap = [&](long long v) {
    if (v > spec.cap)
      throw ScheduleOverflow("schedule entry " + std::to_string(v) + " exceeds cap " +
                             std::to_string(spec.cap));
    return static_cast<int>(v);
  };
  if (spec.kind == ScheduleKind::PairList) {
    std::vector<MeshSchedule> out;
    for (const auto& list : spec.lists) {
      for (int v : list) check_cap(v);
      out.emplace_back(list);
    }
    if (out.empty()) throw ValidationError("schedule", "pair list is empty");
    return out;
  }
  if (spec.n0 < 2) throw ValidationError("schedule", "base subdivision n0 must be >= 2");
  if (spec.levels < 1) throw ValidationError("schedule", "level count must be >= 1");
  std::vector<int> n{check_cap(spec.n0)};
  for (int l = 1; l <= spec.levels; ++l) {
    const long long prev = n.back();
    const long long next =
        (spec.kind == ScheduleKind::CubeThenSquare && l == 1) ? prev * prev * prev : prev * prev;
    n.push_back(check_cap(next));
  }
  return {MeshSchedule(std::move(n))};
}

}  // namespace nsdarcy
