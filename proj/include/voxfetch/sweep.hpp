#pragma once

#include <span>

#include "voxfetch/scene.hpp"

namespace voxfetch {

struct SweepReport {
  std::vector<std::size_t> per_obstacle_overlap;  // swept-volume voxels inside each obstacle
  std::vector<int> per_obstacle_first_segment;    // -1 when untouched
  int first_contact_segment = -1;                 // across all obstacles
  int n_samples = 0;

  int contacted_obstacles() const {
    int n = 0;
    for (auto c : per_obstacle_overlap) n += (c > 0);
    return n;
  }
  std::size_t total_overlap() const {
    std::size_t s = 0;
    for (auto c : per_obstacle_overlap) s += c;
    return s;
  }
};

/// Quasi-static swept-volume contact evaluation of a straight-line waypoint
/// trajectory: each segment is sampled at half-voxel steps (denser by the
/// integer `density` factor; sample sets nest as density grows), the tool
/// grid is resampled at every sample pose and unioned into a swept volume,
/// and the sweep is intersected against each obstacle. Obstacles do not move;
/// contacts are counted. Waypoint rotations are slerped along each segment.
/// Throws for fewer than two waypoints or a zero-length trajectory.
SweepReport sweep_extract(const SceneSpec& scene, const AssetLibrary& lib,
                          std::span<const SE3Pose> waypoints, const VoxelGrid& tool_grid,
                          int density = 1);

/// Straight pull: from the target's pose out of the container opening (-y)
/// until the tool clears the front face by `margin`.
std::vector<SE3Pose> heuristic_direct_pull(const SceneSpec& scene, const AssetLibrary& lib, double margin = 0.05);

/// Lift-then-extract: straight up by `lift`, then out of the opening.
std::vector<SE3Pose> heuristic_lift_extract(const SceneSpec& scene, const AssetLibrary& lib, double lift,
                                            double margin = 0.05);

}  // namespace voxfetch
