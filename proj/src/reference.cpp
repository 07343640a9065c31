#include "voxfetch/reference.hpp"

#include <cmath>
#include <stdexcept>

namespace voxfetch::ref {

namespace {

void require_same_frame(const VoxelGrid& a, const VoxelGrid& b) {
  if (!(a.frame() == b.frame())) throw std::invalid_argument("ref: grids are not in a common frame");
}

template <typename BitOp>
VoxelGrid per_voxel(const VoxelGrid& a, const VoxelGrid& b, BitOp op) {
  require_same_frame(a, b);
  VoxelGrid out(a.frame());
  const auto& d = a.dims();
  for (int z = 0; z < d[2]; ++z)
    for (int y = 0; y < d[1]; ++y)
      for (int x = 0; x < d[0]; ++x)
        if (op(a.test(x, y, z), b.test(x, y, z))) out.set(x, y, z);
  return out;
}

}  // namespace

VoxelGrid grid_union(const VoxelGrid& a, const VoxelGrid& b) {
  return per_voxel(a, b, [](bool p, bool q) { return p || q; });
}

VoxelGrid grid_intersect(const VoxelGrid& a, const VoxelGrid& b) {
  return per_voxel(a, b, [](bool p, bool q) { return p && q; });
}

VoxelGrid grid_difference(const VoxelGrid& a, const VoxelGrid& b) {
  return per_voxel(a, b, [](bool p, bool q) { return p && !q; });
}

std::size_t overlap_count(const VoxelGrid& a, const VoxelGrid& b) {
  require_same_frame(a, b);
  std::size_t n = 0;
  const auto& d = a.dims();
  for (int z = 0; z < d[2]; ++z)
    for (int y = 0; y < d[1]; ++y)
      for (int x = 0; x < d[0]; ++x)
        if (a.test(x, y, z) && b.test(x, y, z)) ++n;
  return n;
}

VoxelGrid transform(const VoxelGrid& v, const SE3Pose& pose, const GridFrame& target) {
  const SE3Pose inv = pose.inverse();
  const GridFrame& src = v.frame();
  VoxelGrid out(target);
  for (int z = 0; z < target.dims[2]; ++z)
    for (int y = 0; y < target.dims[1]; ++y)
      for (int x = 0; x < target.dims[0]; ++x) {
        const Eigen::Vector3d p = inv.apply(target.center_of(x, y, z));
        const auto [sx, sy, sz] = src.index_of(p);
        if (src.in_bounds(sx, sy, sz) && v.test(sx, sy, sz)) out.set(x, y, z);
      }
  return out;
}

double raycast_sample(const SemanticGrid& grid, const Eigen::Vector3d& origin,
                      const Eigen::Vector3d& dir, double step, double max_range) {
  const Eigen::Vector3d d = dir.normalized();
  const GridFrame& f = grid.frame();
  auto occupied_at = [&](double t) {
    const Eigen::Vector3d p = origin + t * d;
    const auto [x, y, z] = f.index_of(p);
    return f.in_bounds(x, y, z) && grid.at(x, y, z) != VoxelLabel::kFree;
  };
  for (double t = 0.0; t <= max_range; t += step) {
    if (!occupied_at(t)) continue;
    if (t == 0.0) return 0.0;
    // Bisect [t-step, t] down to the occupancy boundary.
    double lo = std::max(0.0, t - step), hi = t;
    for (int it = 0; it < 64 && hi - lo > 1e-12; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (occupied_at(mid))
        hi = mid;
      else
        lo = mid;
    }
    return occupied_at(lo) ? lo : hi;
  }
  return -1.0;
}

}  // namespace voxfetch::ref
