#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "voxfetch/se3.hpp"

namespace voxfetch {

/// Placement of a voxel lattice in world space. `origin` is the world
/// position of the min corner of voxel (0,0,0); `resolution` is the voxel
/// edge length in meters.
struct GridFrame {
  Eigen::Vector3d origin = Eigen::Vector3d::Zero();
  double resolution = 0.005;
  std::array<int, 3> dims = {1, 1, 1};

  std::size_t voxel_count() const {
    return std::size_t(dims[0]) * std::size_t(dims[1]) * std::size_t(dims[2]);
  }

  Eigen::Vector3d center_of(int x, int y, int z) const {
    return origin + resolution * Eigen::Vector3d(x + 0.5, y + 0.5, z + 0.5);
  }

  Eigen::Vector3d max_corner() const {
    return origin + resolution * Eigen::Vector3d(dims[0], dims[1], dims[2]);
  }

  bool in_bounds(int x, int y, int z) const {
    return x >= 0 && y >= 0 && z >= 0 && x < dims[0] && y < dims[1] && z < dims[2];
  }

  /// Voxel index containing world point p (floor semantics); may be out of bounds.
  std::array<int, 3> index_of(const Eigen::Vector3d& p) const;

  bool operator==(const GridFrame& o) const {
    return origin == o.origin && resolution == o.resolution && dims == o.dims;
  }

  /// Same resolution and origins separated by an integer number of voxels.
  bool aligned_with(const GridFrame& o, double tol = 1e-9) const;

  void validate() const;
};

struct VoxelBounds {
  std::array<int, 3> min;
  std::array<int, 3> max;  // inclusive
};

struct OverlapReport {
  bool collides = false;
  std::size_t overlap_voxels = 0;
  std::optional<std::array<int, 3>> first_hit;
};

/// Dense binary occupancy over a metric lattice. Bits are stored x-fastest
/// (index = x + nx*(y + ny*z)) in 64-bit words; bits past voxel_count() in the
/// last word are always zero. Grids are immutable by convention once built:
/// all operations below return new grids.
class VoxelGrid {
 public:
  VoxelGrid() : VoxelGrid(GridFrame{}) {}
  explicit VoxelGrid(const GridFrame& frame);

  const GridFrame& frame() const { return frame_; }
  const Eigen::Vector3d& origin() const { return frame_.origin; }
  double resolution() const { return frame_.resolution; }
  const std::array<int, 3>& dims() const { return frame_.dims; }
  std::size_t voxel_count() const { return frame_.voxel_count(); }

  std::size_t linear_index(int x, int y, int z) const {
    return std::size_t(x) + std::size_t(frame_.dims[0]) * (std::size_t(y) + std::size_t(frame_.dims[1]) * std::size_t(z));
  }

  bool test(int x, int y, int z) const {
    const std::size_t i = linear_index(x, y, z);
    return (words_[i >> 6] >> (i & 63)) & 1u;
  }

  void set(int x, int y, int z, bool on = true) {
    const std::size_t i = linear_index(x, y, z);
    if (on)
      words_[i >> 6] |= std::uint64_t(1) << (i & 63);
    else
      words_[i >> 6] &= ~(std::uint64_t(1) << (i & 63));
  }

  /// Occupied-voxel count.
  std::size_t popcount() const;
  bool any() const;
  bool empty_occupancy() const { return !any(); }

  std::optional<std::array<int, 3>> first_set() const;
  /// Tight bounds over occupied voxels; nullopt when empty.
  std::optional<VoxelBounds> tight_bounds() const;

  std::array<int, 3> unflatten(std::size_t i) const {
    const int nx = frame_.dims[0], ny = frame_.dims[1];
    const int x = int(i % nx);
    const int y = int((i / nx) % ny);
    const int z = int(i / (std::size_t(nx) * ny));
    return {x, y, z};
  }

  const std::vector<std::uint64_t>& words() const { return words_; }
  std::vector<std::uint64_t>& mutable_words() { return words_; }
  std::size_t word_count() const { return words_.size(); }

  /// Zeroes any bits past voxel_count() in the last word.
  void mask_tail();

 private:
  GridFrame frame_;
  std::vector<std::uint64_t> words_;
};

// ---- Set algebra. All binary ops require identical frames (origin,
// resolution, dims); mismatches throw std::invalid_argument. Use reframe()
// to convert between frames first.

VoxelGrid grid_union(const VoxelGrid& a, const VoxelGrid& b);
VoxelGrid grid_intersect(const VoxelGrid& a, const VoxelGrid& b);
VoxelGrid grid_difference(const VoxelGrid& a, const VoxelGrid& b);
/// Complement within the grid bounds.
VoxelGrid grid_complement(const VoxelGrid& a);

enum class CollideMode {
  kCount,        // exact overlap count + first hit
  kBooleanOnly,  // early exit on first overlapping word
};

OverlapReport collides(const VoxelGrid& a, const VoxelGrid& b, CollideMode mode = CollideMode::kCount);

enum class ClipPolicy {
  kReject,  // occupancy falling outside the target frame is an error
  kAllow,
};

/// Resample `v` under `pose` into `target`: a target voxel is occupied iff its
/// center, pulled back through pose^-1, lands in an occupied source voxel.
/// Lattice-aligned pure translations are bit-exact shifts.
VoxelGrid transform(const VoxelGrid& v, const SE3Pose& pose, const GridFrame& target,
                    ClipPolicy clip = ClipPolicy::kReject);

/// Tight lattice frame covering `v` transformed by `pose`. The returned frame
/// keeps the source lattice phase shifted by the pose translation, so pure
/// translations resample bit-exactly into it.
GridFrame transformed_frame(const VoxelGrid& v, const SE3Pose& pose);

/// Convenience: transform into the auto-computed tight frame.
VoxelGrid transform_auto(const VoxelGrid& v, const SE3Pose& pose);

/// Nearest-neighbor resample into an arbitrary frame (integer blit when
/// lattices are aligned). Occupancy outside the target frame is dropped.
VoxelGrid reframe(const VoxelGrid& v, const GridFrame& target);

// ---- Lattice-aligned primitives used by the scene generator and the sweep
// evaluator. `offset` is the position of src voxel (0,0,0) inside dst.

/// OR src into dst at integer offset; src cells outside dst are ignored.
void blit_or(VoxelGrid& dst, const VoxelGrid& src, const std::array<int, 3>& offset);

/// Overlap count between a and b where b is placed at `offset_b` inside a.
std::size_t overlap_count(const VoxelGrid& a, const VoxelGrid& b, const std::array<int, 3>& offset_b,
                          bool early_exit = false);

/// Integer offset of frame b's voxel (0,0,0) inside frame a; throws if the
/// lattices are not aligned.
std::array<int, 3> lattice_offset(const GridFrame& a, const GridFrame& b);

}  // namespace voxfetch
