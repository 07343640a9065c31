#pragma once

#include <string>
#include <vector>

#include "voxfetch/voxel_grid.hpp"

namespace voxfetch {

struct TriMesh {
  std::vector<Eigen::Vector3d> vertices;          // meters
  std::vector<std::array<int, 3>> triangles;      // vertex indices

  Eigen::Vector3d min_corner() const;
  Eigen::Vector3d max_corner() const;
  void validate() const;  // index bounds, no degenerate index triples
};

struct WatertightReport {
  bool watertight = false;
  std::size_t boundary_edges = 0;     // edges with only one incident triangle
  std::size_t nonmanifold_edges = 0;  // edges with more than two
};

/// Closed + consistently oriented: every undirected edge is shared by exactly
/// two triangles traversing it in opposite directions.
WatertightReport check_watertight(const TriMesh& mesh);

enum class FillMode { kSurface, kSolid };

/// Axis-aligned box of the given side lengths, voxelized in its canonical
/// frame (bounding-box min corner at the grid origin). A voxel is occupied
/// iff its center lies inside the box, so lattice-aligned boxes fill exactly.
VoxelGrid voxelize_box(const Eigen::Vector3d& dims, double resolution);

/// Z-axis cylinder, canonical frame as above (axis through (r, r, *)).
VoxelGrid voxelize_cylinder(double radius, double height, double resolution);

/// Surface mode marks every voxel whose box overlaps a triangle (conservative
/// SAT test). Solid mode additionally flood-fills free space from the grid
/// boundary and marks unreached voxels as interior; it requires a watertight
/// mesh and throws std::invalid_argument with a diagnostic otherwise.
/// The grid covers the mesh bounding box in the canonical frame.
VoxelGrid voxelize_mesh(const TriMesh& mesh, double resolution, FillMode fill);

/// Conservative triangle vs axis-aligned box overlap (separating axis test,
/// touching counts as overlap).
bool triangle_box_overlap(const Eigen::Vector3d& box_center, const Eigen::Vector3d& box_half,
                          const Eigen::Vector3d& v0, const Eigen::Vector3d& v1, const Eigen::Vector3d& v2);

/// Cuboid mesh helper used by tests and fixtures: the 12-triangle closed box
/// [0,dims] with outward orientation.
TriMesh make_box_mesh(const Eigen::Vector3d& dims);

}  // namespace voxfetch
