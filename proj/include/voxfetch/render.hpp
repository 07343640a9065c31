#pragma once

#include <vector>

#include "voxfetch/camera.hpp"
#include "voxfetch/semantic_grid.hpp"

namespace voxfetch {

/// Single-channel depth image. Metric mode stores distance along the ray in
/// meters; normalized mode stores unitless values in [0,1). Pixels that hit
/// nothing are invalid.
struct DepthMap {
  enum class Mode : std::uint16_t { kMetric = 0, kNormalized = 1 };

  int width = 0, height = 0;
  Mode mode = Mode::kMetric;
  std::vector<float> values;        // row-major
  std::vector<std::uint8_t> valid;  // row-major, 0/1

  std::size_t index(int u, int v) const { return std::size_t(v) * width + u; }
  float at(int u, int v) const { return values[index(u, v)]; }
  bool is_valid(int u, int v) const { return valid[index(u, v)] != 0; }

  static DepthMap make(int width, int height, Mode mode = Mode::kMetric) {
    DepthMap d;
    d.width = width;
    d.height = height;
    d.mode = mode;
    d.values.assign(std::size_t(width) * height, -1.0f);
    d.valid.assign(std::size_t(width) * height, 0);
    return d;
  }
};

/// Metric crop box around the end-effector. Defaults follow the compact
/// 20 x 20 x 30 cm region of interest.
struct RoiSpec {
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  Eigen::Vector3d extents{0.20, 0.20, 0.30};  // H, W, Z in meters

  void validate() const {
    for (int k = 0; k < 3; ++k)
      if (!(extents[k] > 0)) throw std::invalid_argument("RoiSpec: extents must be strictly positive");
  }
};

/// Per-pixel first-hit distance through the lattice (integer DDA traversal,
/// one visit per crossed cell). Depth is the ray distance to the entry face
/// of the first non-free voxel; rays starting inside occupancy get 0.
DepthMap raycast_depth(const SemanticGrid& grid, const CameraModel& cam);

/// Single-ray variant used by raycast_depth and the sampling-oracle tests:
/// returns the entry-face distance or a negative value on miss.
double raycast_first_hit(const SemanticGrid& grid, const Eigen::Vector3d& origin, const Eigen::Vector3d& dir);

struct OcclusionCounts {
  std::size_t occluded_columns = 0;  // target columns whose first hit is an obstacle
  std::size_t target_columns = 0;    // columns containing the target at any depth
  double rate() const { return target_columns == 0 ? 0.0 : double(occluded_columns) / double(target_columns); }
};

/// Frontal-occlusion measure over an orthographic view along -y: one lattice
/// column per (x,z), scanned front (low y) to back.
OcclusionCounts occlusion_counts(const SemanticGrid& grid);

/// Crop around the ROI. The output lattice keeps the source alignment: dims
/// are a pure function of extents (ceil(extent/resolution) per axis) and the
/// min corner snaps to the nearest source lattice plane, so the default ROI
/// always yields 40 x 40 x 60 cells at 5 mm. Voxels outside the source grid
/// are free.
SemanticGrid crop_roi(const SemanticGrid& grid, const RoiSpec& roi);

/// Per-image min-max scaling over the valid pixels:
/// out = (d - min) / (max - min + epsilon). Throws when no pixel is valid.
DepthMap normalize_depth(const DepthMap& d, double epsilon = 1e-6);

}  // namespace voxfetch
