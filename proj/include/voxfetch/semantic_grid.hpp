#pragma once

#include <cstdint>
#include <vector>

#include "voxfetch/voxel_grid.hpp"

namespace voxfetch {

enum class VoxelLabel : std::uint8_t {
  kFree = 0,
  kTarget = 1,
  kObstacle = 2,
  kRobot = 3,
};

constexpr std::uint8_t kLabelCount = 4;

/// Per-voxel class labels over the same lattice layout as VoxelGrid
/// (x-fastest). Every voxel carries exactly one label.
class SemanticGrid {
 public:
  SemanticGrid() : SemanticGrid(GridFrame{}) {}
  explicit SemanticGrid(const GridFrame& frame) : frame_(frame) {
    frame_.validate();
    labels_.assign(frame_.voxel_count(), 0);
  }

  const GridFrame& frame() const { return frame_; }
  const std::array<int, 3>& dims() const { return frame_.dims; }
  double resolution() const { return frame_.resolution; }
  std::size_t voxel_count() const { return frame_.voxel_count(); }

  std::size_t linear_index(int x, int y, int z) const {
    return std::size_t(x) + std::size_t(frame_.dims[0]) * (std::size_t(y) + std::size_t(frame_.dims[1]) * std::size_t(z));
  }

  VoxelLabel at(int x, int y, int z) const { return VoxelLabel(labels_[linear_index(x, y, z)]); }
  void set(int x, int y, int z, VoxelLabel l) { labels_[linear_index(x, y, z)] = std::uint8_t(l); }

  const std::vector<std::uint8_t>& labels() const { return labels_; }
  std::vector<std::uint8_t>& mutable_labels() { return labels_; }

  std::size_t count_label(VoxelLabel l) const {
    std::size_t n = 0;
    for (std::uint8_t v : labels_)
      if (v == std::uint8_t(l)) ++n;
    return n;
  }

  /// Binary mask of one label class, same frame.
  VoxelGrid label_mask(VoxelLabel l) const {
    VoxelGrid g(frame_);
    for (std::size_t i = 0; i < labels_.size(); ++i) {
      if (labels_[i] == std::uint8_t(l)) {
        g.mutable_words()[i >> 6] |= std::uint64_t(1) << (i & 63);
      }
    }
    return g;
  }

  /// Binary mask of all non-free voxels, same frame.
  VoxelGrid occupancy_mask() const {
    VoxelGrid g(frame_);
    for (std::size_t i = 0; i < labels_.size(); ++i) {
      if (labels_[i] != 0) {
        g.mutable_words()[i >> 6] |= std::uint64_t(1) << (i & 63);
      }
    }
    return g;
  }

  bool operator==(const SemanticGrid& o) const { return frame_ == o.frame_ && labels_ == o.labels_; }

 private:
  GridFrame frame_;
  std::vector<std::uint8_t> labels_;
};

}  // namespace voxfetch
