#include "voxfetch/voxelize.hpp"

#include <cmath>
#include <deque>
#include <map>
#include <stdexcept>

namespace voxfetch {

Eigen::Vector3d TriMesh::min_corner() const {
  Eigen::Vector3d lo = Eigen::Vector3d::Constant(std::numeric_limits<double>::infinity());
  for (const auto& v : vertices) lo = lo.cwiseMin(v);
  return lo;
}

Eigen::Vector3d TriMesh::max_corner() const {
  Eigen::Vector3d hi = Eigen::Vector3d::Constant(-std::numeric_limits<double>::infinity());
  for (const auto& v : vertices) hi = hi.cwiseMax(v);
  return hi;
}

void TriMesh::validate() const {
  if (vertices.empty() || triangles.empty()) throw std::invalid_argument("TriMesh: empty mesh");
  const int n = int(vertices.size());
  for (const auto& t : triangles) {
    for (int k = 0; k < 3; ++k)
      if (t[k] < 0 || t[k] >= n) throw std::invalid_argument("TriMesh: triangle index out of range");
    if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2])
      throw std::invalid_argument("TriMesh: degenerate triangle (repeated vertex index)");
  }
}

WatertightReport check_watertight(const TriMesh& mesh) {
  // Count signed traversals per undirected edge.
  std::map<std::pair<int, int>, std::pair<int, int>> edges;  // (lo,hi) -> (forward, backward)
  for (const auto& t : mesh.triangles) {
    for (int k = 0; k < 3; ++k) {
      const int a = t[k], b = t[(k + 1) % 3];
      auto& e = edges[{std::min(a, b), std::max(a, b)}];
      if (a < b)
        ++e.first;
      else
        ++e.second;
    }
  }
  WatertightReport rep;
  rep.watertight = true;
  for (const auto& [key, counts] : edges) {
    const int total = counts.first + counts.second;
    if (total == 1) {
      ++rep.boundary_edges;
      rep.watertight = false;
    } else if (total > 2) {
      ++rep.nonmanifold_edges;
      rep.watertight = false;
    } else if (counts.first != 1 || counts.second != 1) {
      // two traversals in the same direction: inconsistent orientation
      rep.watertight = false;
    }
  }
  return rep;
}

namespace {

GridFrame canonical_frame(const Eigen::Vector3d& extent, double resolution) {
  GridFrame f;
  f.origin = Eigen::Vector3d::Zero();
  f.resolution = resolution;
  for (int k = 0; k < 3; ++k) f.dims[k] = std::max(1, int(std::ceil(extent[k] / resolution - 1e-9)));
  return f;
}

void require_positive(double v, const char* what) {
  if (!(v > 0.0)) throw std::invalid_argument(std::string(what) + " must be strictly positive");
}

}  // namespace

VoxelGrid voxelize_box(const Eigen::Vector3d& dims, double resolution) {
  require_positive(resolution, "voxelize_box: resolution");
  for (int k = 0; k < 3; ++k) require_positive(dims[k], "voxelize_box: dims");
  VoxelGrid g(canonical_frame(dims, resolution));
  const auto& d = g.dims();
  for (int z = 0; z < d[2]; ++z) {
    const double cz = (z + 0.5) * resolution;
    if (cz >= dims.z()) continue;
    for (int y = 0; y < d[1]; ++y) {
      const double cy = (y + 0.5) * resolution;
      if (cy >= dims.y()) continue;
      for (int x = 0; x < d[0]; ++x) {
        const double cx = (x + 0.5) * resolution;
        if (cx < dims.x()) g.set(x, y, z);
      }
    }
  }
  return g;
}

VoxelGrid voxelize_cylinder(double radius, double height, double resolution) {
  require_positive(resolution, "voxelize_cylinder: resolution");
  require_positive(radius, "voxelize_cylinder: radius");
  require_positive(height, "voxelize_cylinder: height");
  VoxelGrid g(canonical_frame({2 * radius, 2 * radius, height}, resolution));
  const auto& d = g.dims();
  const double r2 = radius * radius;
  for (int z = 0; z < d[2]; ++z) {
    const double cz = (z + 0.5) * resolution;
    if (cz >= height) continue;
    for (int y = 0; y < d[1]; ++y) {
      const double dy = (y + 0.5) * resolution - radius;
      for (int x = 0; x < d[0]; ++x) {
        const double dx = (x + 0.5) * resolution - radius;
        if (dx * dx + dy * dy < r2) g.set(x, y, z);
      }
    }
  }
  return g;
}

// Akenine-Moller separating axis test. Inclusive comparisons keep the test
// conservative: touching counts as overlap.
bool triangle_box_overlap(const Eigen::Vector3d& box_center, const Eigen::Vector3d& box_half,
                          const Eigen::Vector3d& v0in, const Eigen::Vector3d& v1in,
                          const Eigen::Vector3d& v2in) {
  const Eigen::Vector3d v0 = v0in - box_center;
  const Eigen::Vector3d v1 = v1in - box_center;
  const Eigen::Vector3d v2 = v2in - box_center;
  const Eigen::Vector3d e0 = v1 - v0, e1 = v2 - v1, e2 = v0 - v2;
  const Eigen::Vector3d& h = box_half;

  auto axis_test = [&](const Eigen::Vector3d& axis) {
    const double p0 = axis.dot(v0), p1 = axis.dot(v1), p2 = axis.dot(v2);
    const double r = h.x() * std::abs(axis.x()) + h.y() * std::abs(axis.y()) + h.z() * std::abs(axis.z());
    const double lo = std::min({p0, p1, p2}), hi = std::max({p0, p1, p2});
    return !(lo > r || hi < -r);
  };

  // 9 cross-product axes
  for (const auto& e : {e0, e1, e2}) {
    if (!axis_test({0, -e.z(), e.y()})) return false;
    if (!axis_test({e.z(), 0, -e.x()})) return false;
    if (!axis_test({-e.y(), e.x(), 0})) return false;
  }
  // 3 box face normals
  for (int k = 0; k < 3; ++k) {
    const double lo = std::min({v0[k], v1[k], v2[k]}), hi = std::max({v0[k], v1[k], v2[k]});
    if (lo > h[k] || hi < -h[k]) return false;
  }
  // triangle plane
  const Eigen::Vector3d n = e0.cross(e1);
  const double d = n.dot(v0);
  const double r = h.x() * std::abs(n.x()) + h.y() * std::abs(n.y()) + h.z() * std::abs(n.z());
  return std::abs(d) <= r;
}

VoxelGrid voxelize_mesh(const TriMesh& mesh, double resolution, FillMode fill) {
  require_positive(resolution, "voxelize_mesh: resolution");
  mesh.validate();
  if (fill == FillMode::kSolid) {
    const WatertightReport rep = check_watertight(mesh);
    if (!rep.watertight) {
      throw std::invalid_argument(
          "voxelize_mesh: solid fill requires a watertight mesh (" + std::to_string(rep.boundary_edges) +
          " boundary edges, " + std::to_string(rep.nonmanifold_edges) + " non-manifold edges)");
    }
  }

  const Eigen::Vector3d lo = mesh.min_corner();
  const Eigen::Vector3d hi = mesh.max_corner();
  GridFrame frame = canonical_frame(hi - lo, resolution);
  frame.origin = lo;
  VoxelGrid g(frame);
  const double res = resolution;
  const Eigen::Vector3d half = Eigen::Vector3d::Constant(res / 2);

  // Surface: rasterize each triangle over the cells of its bounding box.
  for (const auto& t : mesh.triangles) {
    const Eigen::Vector3d& a = mesh.vertices[t[0]];
    const Eigen::Vector3d& b = mesh.vertices[t[1]];
    const Eigen::Vector3d& c = mesh.vertices[t[2]];
    Eigen::Vector3d tlo = a.cwiseMin(b).cwiseMin(c);
    Eigen::Vector3d thi = a.cwiseMax(b).cwiseMax(c);
    std::array<int, 3> i0, i1;
    for (int k = 0; k < 3; ++k) {
      i0[k] = std::max(0, int(std::floor((tlo[k] - lo[k]) / res - 1e-9)));
      i1[k] = std::min(frame.dims[k] - 1, int(std::floor((thi[k] - lo[k]) / res + 1e-9)));
    }
    for (int z = i0[2]; z <= i1[2]; ++z)
      for (int y = i0[1]; y <= i1[1]; ++y)
        for (int x = i0[0]; x <= i1[0]; ++x) {
          if (g.test(x, y, z)) continue;
          if (triangle_box_overlap(frame.center_of(x, y, z), half, a, b, c)) g.set(x, y, z);
        }
  }

  if (fill == FillMode::kSurface) return g;

  // Solid: flood-fill free space from the grid boundary; whatever the fill
  // cannot reach is interior.
  const auto& d = frame.dims;
  std::vector<std::uint8_t> exterior(g.voxel_count(), 0);
  std::deque<std::array<int, 3>> queue;
  auto push_if_free = [&](int x, int y, int z) {
    if (x < 0 || y < 0 || z < 0 || x >= d[0] || y >= d[1] || z >= d[2]) return;
    const std::size_t i = g.linear_index(x, y, z);
    if (exterior[i] || g.test(x, y, z)) return;
    exterior[i] = 1;
    queue.push_back({x, y, z});
  };
  for (int z = 0; z < d[2]; ++z)
    for (int y = 0; y < d[1]; ++y)
      for (int x = 0; x < d[0]; ++x)
        if (x == 0 || y == 0 || z == 0 || x == d[0] - 1 || y == d[1] - 1 || z == d[2] - 1)
          push_if_free(x, y, z);
  while (!queue.empty()) {
    const auto [x, y, z] = queue.front();
    queue.pop_front();
    push_if_free(x - 1, y, z);
    push_if_free(x + 1, y, z);
    push_if_free(x, y - 1, z);
    push_if_free(x, y + 1, z);
    push_if_free(x, y, z - 1);
    push_if_free(x, y, z + 1);
  }
  for (int z = 0; z < d[2]; ++z)
    for (int y = 0; y < d[1]; ++y)
      for (int x = 0; x < d[0]; ++x)
        if (!exterior[g.linear_index(x, y, z)]) g.set(x, y, z);
  return g;
}

TriMesh make_box_mesh(const Eigen::Vector3d& dims) {
  TriMesh m;
  for (int i = 0; i < 8; ++i)
    m.vertices.push_back({(i & 1) ? dims.x() : 0.0, (i & 2) ? dims.y() : 0.0, (i & 4) ? dims.z() : 0.0});
  // Outward-oriented faces (CCW seen from outside).
  m.triangles = {
      {0, 2, 1}, {1, 2, 3},  // z = 0
      {4, 5, 6}, {5, 7, 6},  // z = max
      {0, 1, 4}, {1, 5, 4},  // y = 0
      {2, 6, 3}, {3, 6, 7},  // y = max
      {0, 4, 2}, {2, 4, 6},  // x = 0
      {1, 3, 5}, {3, 7, 5},  // x = max
  };
  return m;
}

}  // namespace voxfetch
