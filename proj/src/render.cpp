#include "voxfetch/render.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace voxfetch {

namespace {

// Entry/exit parameters of a ray against the frame's outer box (slab test).
bool ray_box(const GridFrame& f, const Eigen::Vector3d& o, const Eigen::Vector3d& d, double& t0, double& t1) {
  t0 = 0.0;
  t1 = std::numeric_limits<double>::infinity();
  const Eigen::Vector3d lo = f.origin;
  const Eigen::Vector3d hi = f.max_corner();
  for (int k = 0; k < 3; ++k) {
    if (d[k] == 0.0) {
      if (o[k] < lo[k] || o[k] >= hi[k]) return false;
      continue;
    }
    double a = (lo[k] - o[k]) / d[k];
    double b = (hi[k] - o[k]) / d[k];
    if (a > b) std::swap(a, b);
    t0 = std::max(t0, a);
    t1 = std::min(t1, b);
    if (t0 > t1) return false;
  }
  return t0 <= t1;
}

}  // namespace

double raycast_first_hit(const SemanticGrid& grid, const Eigen::Vector3d& origin, const Eigen::Vector3d& dir) {
  const GridFrame& f = grid.frame();
  const Eigen::Vector3d d = dir.normalized();
  double t0, t1;
  if (!ray_box(f, origin, d, t0, t1)) return -1.0;

  // Cell the march starts in. Nudge the entry point inward to avoid landing
  // exactly on a face.
  const Eigen::Vector3d start = origin + (t0 + 1e-12) * d;
  auto [x, y, z] = f.index_of(start);
  const auto& dims = f.dims;
  x = std::clamp(x, 0, dims[0] - 1);
  y = std::clamp(y, 0, dims[1] - 1);
  z = std::clamp(z, 0, dims[2] - 1);

  int idx[3] = {x, y, z};
  int step[3];
  double t_max[3], t_delta[3];
  const double res = f.resolution;
  for (int k = 0; k < 3; ++k) {
    if (d[k] > 0) {
      step[k] = 1;
      t_delta[k] = res / d[k];
      const double next = f.origin[k] + (idx[k] + 1) * res;
      t_max[k] = (next - origin[k]) / d[k];
    } else if (d[k] < 0) {
      step[k] = -1;
      t_delta[k] = res / -d[k];
      const double next = f.origin[k] + idx[k] * res;
      t_max[k] = (next - origin[k]) / d[k];
    } else {
      step[k] = 0;
      t_delta[k] = std::numeric_limits<double>::infinity();
      t_max[k] = std::numeric_limits<double>::infinity();
    }
  }

  double t_entry = t0;
  while (true) {
    if (grid.at(idx[0], idx[1], idx[2]) != VoxelLabel::kFree) return std::max(t_entry, 0.0);
    const int k = (t_max[0] < t_max[1]) ? (t_max[0] < t_max[2] ? 0 : 2) : (t_max[1] < t_max[2] ? 1 : 2);
    t_entry = t_max[k];
    idx[k] += step[k];
    if (idx[k] < 0 || idx[k] >= dims[k]) return -1.0;
    t_max[k] += t_delta[k];
  }
}

DepthMap raycast_depth(const SemanticGrid& grid, const CameraModel& cam) {
  cam.validate();
  grid.frame().validate();
  DepthMap out = DepthMap::make(cam.width, cam.height, DepthMap::Mode::kMetric);
  const SE3Pose cam_to_world = cam.extrinsic.inverse();
  const Eigen::Vector3d origin = cam_to_world.translation;

#pragma omp parallel for schedule(dynamic, 8)
  for (int v = 0; v < cam.height; ++v) {
    for (int u = 0; u < cam.width; ++u) {
      // Primary ray through the pixel center.
      const Eigen::Vector3d ray_cam((u + 0.5 - cam.cx) / cam.fx, (v + 0.5 - cam.cy) / cam.fy, 1.0);
      const Eigen::Vector3d dir = (cam_to_world.rotation * ray_cam).normalized();
      const double t = raycast_first_hit(grid, origin, dir);
      if (t >= 0.0) {
        out.values[out.index(u, v)] = float(t);
        out.valid[out.index(u, v)] = 1;
      }
    }
  }
  return out;
}

OcclusionCounts occlusion_counts(const SemanticGrid& grid) {
  const auto& d = grid.dims();
  OcclusionCounts c;
  for (int z = 0; z < d[2]; ++z) {
    for (int x = 0; x < d[0]; ++x) {
      bool has_target = false;
      VoxelLabel first = VoxelLabel::kFree;
      for (int y = 0; y < d[1]; ++y) {
        const VoxelLabel l = grid.at(x, y, z);
        if (l == VoxelLabel::kFree) continue;
        if (first == VoxelLabel::kFree) first = l;
        if (l == VoxelLabel::kTarget) {
          has_target = true;
          break;  // target seen; first hit already decided
        }
      }
      if (!has_target) continue;
      ++c.target_columns;
      if (first == VoxelLabel::kObstacle) ++c.occluded_columns;
    }
  }
  return c;
}

SemanticGrid crop_roi(const SemanticGrid& grid, const RoiSpec& roi) {
  roi.validate();
  const GridFrame& src = grid.frame();
  const double res = src.resolution;
  GridFrame out;
  out.resolution = res;
  for (int k = 0; k < 3; ++k) {
    out.dims[k] = std::max(1, int(std::ceil(roi.extents[k] / res - 1e-9)));
    const double lo = roi.center[k] - roi.extents[k] / 2;
    out.origin[k] = src.origin[k] + std::round((lo - src.origin[k]) / res) * res;
  }
  SemanticGrid crop(out);
  const auto off = lattice_offset(src, out);  // position of crop (0,0,0) in src
  for (int z = 0; z < out.dims[2]; ++z) {
    const int sz = z + off[2];
    if (sz < 0 || sz >= src.dims[2]) continue;
    for (int y = 0; y < out.dims[1]; ++y) {
      const int sy = y + off[1];
      if (sy < 0 || sy >= src.dims[1]) continue;
      for (int x = 0; x < out.dims[0]; ++x) {
        const int sx = x + off[0];
        if (sx < 0 || sx >= src.dims[0]) continue;
        crop.set(x, y, z, grid.at(sx, sy, sz));
      }
    }
  }
  return crop;
}

DepthMap normalize_depth(const DepthMap& d, double epsilon) {
  if (d.mode != DepthMap::Mode::kMetric) throw std::invalid_argument("normalize_depth: input must be metric");
  if (!(epsilon > 0)) throw std::invalid_argument("normalize_depth: epsilon must be positive");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  std::size_t n_valid = 0;
  for (std::size_t i = 0; i < d.values.size(); ++i) {
    if (!d.valid[i]) continue;
    ++n_valid;
    lo = std::min(lo, double(d.values[i]));
    hi = std::max(hi, double(d.values[i]));
  }
  if (n_valid == 0) throw std::invalid_argument("normalize_depth: depth map has no valid pixels");

  DepthMap out = d;
  out.mode = DepthMap::Mode::kNormalized;
  const double denom = hi - lo + epsilon;
  for (std::size_t i = 0; i < d.values.size(); ++i) {
    if (d.valid[i])
      out.values[i] = float((double(d.values[i]) - lo) / denom);
    else
      out.values[i] = -1.0f;
  }
  return out;
}

}  // namespace voxfetch
