#pragma once

#include "voxfetch/semantic_grid.hpp"
#include "voxfetch/voxel_grid.hpp"

namespace voxfetch::ref {

// Naive serial implementations kept as independent checks for the word-level
// and OpenMP kernels. Everything here walks voxels one by one through the
// public accessors; none of it shares code with the optimized paths. The
// benchmark tool compares these against the kernels.

VoxelGrid grid_union(const VoxelGrid& a, const VoxelGrid& b);
VoxelGrid grid_intersect(const VoxelGrid& a, const VoxelGrid& b);
VoxelGrid grid_difference(const VoxelGrid& a, const VoxelGrid& b);

/// Per-voxel double loop overlap count.
std::size_t overlap_count(const VoxelGrid& a, const VoxelGrid& b);

/// Per-voxel pull-back transform (no incremental stepping, no parallelism).
VoxelGrid transform(const VoxelGrid& v, const SE3Pose& pose, const GridFrame& target);

/// First-hit distance of a single ray by fine-step sampling: march from the
/// ray origin in steps of `step` meters, bisect the boundary once a sample
/// lands inside a non-free voxel. Returns a negative value when nothing is
/// hit within max_range.
double raycast_sample(const SemanticGrid& grid, const Eigen::Vector3d& origin,
                      const Eigen::Vector3d& dir, double step, double max_range);

}  // namespace voxfetch::ref
