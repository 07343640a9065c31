#include "voxfetch/voxel_grid.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace voxfetch {

namespace {

// Word count above which set ops and transforms go parallel. Scene-sized
// grids (~16k words) stay serial so batch generation threads do not nest
// OpenMP teams.
constexpr std::size_t kParallelWords = std::size_t(1) << 16;

void require_same_frame(const VoxelGrid& a, const VoxelGrid& b, const char* op) {
  if (!(a.frame() == b.frame()))
    throw std::invalid_argument(std::string(op) + ": grids are not in a common frame (origin/resolution/dims must match)");
}

}  // namespace

std::array<int, 3> GridFrame::index_of(const Eigen::Vector3d& p) const {
  const Eigen::Vector3d q = (p - origin) / resolution;
  return {int(std::floor(q.x())), int(std::floor(q.y())), int(std::floor(q.z()))};
}

bool GridFrame::aligned_with(const GridFrame& o, double tol) const {
  if (std::abs(resolution - o.resolution) > tol * resolution) return false;
  const Eigen::Vector3d d = (o.origin - origin) / resolution;
  for (int k = 0; k < 3; ++k) {
    if (std::abs(d[k] - std::round(d[k])) > 1e-6) return false;
  }
  return true;
}

void GridFrame::validate() const {
  if (!(resolution > 0.0)) throw std::invalid_argument("GridFrame: resolution must be positive");
  for (int k = 0; k < 3; ++k)
    if (dims[k] < 1) throw std::invalid_argument("GridFrame: all dims must be >= 1");
  if (!origin.allFinite()) throw std::invalid_argument("GridFrame: origin must be finite");
}

VoxelGrid::VoxelGrid(const GridFrame& frame) : frame_(frame) {
  frame_.validate();
  words_.assign((frame_.voxel_count() + 63) / 64, 0);
}

std::size_t VoxelGrid::popcount() const {
  std::size_t n = 0;
  for (std::uint64_t w : words_) n += std::size_t(std::popcount(w));
  return n;
}

bool VoxelGrid::any() const {
  for (std::uint64_t w : words_)
    if (w) return true;
  return false;
}

std::optional<std::array<int, 3>> VoxelGrid::first_set() const {
  for (std::size_t wi = 0; wi < words_.size(); ++wi) {
    if (words_[wi]) {
      const std::size_t i = wi * 64 + std::size_t(std::countr_zero(words_[wi]));
      return unflatten(i);
    }
  }
  return std::nullopt;
}

std::optional<VoxelBounds> VoxelGrid::tight_bounds() const {
  VoxelBounds b{{frame_.dims[0], frame_.dims[1], frame_.dims[2]}, {-1, -1, -1}};
  bool found = false;
  for (std::size_t wi = 0; wi < words_.size(); ++wi) {
    std::uint64_t w = words_[wi];
    while (w) {
      const std::size_t i = wi * 64 + std::size_t(std::countr_zero(w));
      w &= w - 1;
      const auto [x, y, z] = unflatten(i);
      b.min[0] = std::min(b.min[0], x); b.max[0] = std::max(b.max[0], x);
      b.min[1] = std::min(b.min[1], y); b.max[1] = std::max(b.max[1], y);
      b.min[2] = std::min(b.min[2], z); b.max[2] = std::max(b.max[2], z);
      found = true;
    }
  }
  if (!found) return std::nullopt;
  return b;
}

void VoxelGrid::mask_tail() {
  const std::size_t n = frame_.voxel_count();
  if (n % 64 != 0 && !words_.empty()) words_.back() &= (std::uint64_t(1) << (n % 64)) - 1;
}

namespace {

template <typename WordOp>
VoxelGrid binary_op(const VoxelGrid& a, const VoxelGrid& b, WordOp op) {
  VoxelGrid out(a.frame());
  const auto& wa = a.words();
  const auto& wb = b.words();
  auto& wo = out.mutable_words();
  const std::int64_t n = std::int64_t(wa.size());
  if (std::size_t(n) >= kParallelWords) {
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) wo[i] = op(wa[i], wb[i]);
  } else {
    for (std::int64_t i = 0; i < n; ++i) wo[i] = op(wa[i], wb[i]);
  }
  return out;
}

}  // namespace

VoxelGrid grid_union(const VoxelGrid& a, const VoxelGrid& b) {
  require_same_frame(a, b, "grid_union");
  return binary_op(a, b, [](std::uint64_t x, std::uint64_t y) { return x | y; });
}

VoxelGrid grid_intersect(const VoxelGrid& a, const VoxelGrid& b) {
  require_same_frame(a, b, "grid_intersect");
  return binary_op(a, b, [](std::uint64_t x, std::uint64_t y) { return x & y; });
}

VoxelGrid grid_difference(const VoxelGrid& a, const VoxelGrid& b) {
  require_same_frame(a, b, "grid_difference");
  return binary_op(a, b, [](std::uint64_t x, std::uint64_t y) { return x & ~y; });
}

VoxelGrid grid_complement(const VoxelGrid& a) {
  VoxelGrid out(a.frame());
  const auto& wa = a.words();
  auto& wo = out.mutable_words();
  for (std::size_t i = 0; i < wa.size(); ++i) wo[i] = ~wa[i];
  out.mask_tail();
  return out;
}

OverlapReport collides(const VoxelGrid& a, const VoxelGrid& b, CollideMode mode) {
  require_same_frame(a, b, "collides");
  OverlapReport rep;
  const auto& wa = a.words();
  const auto& wb = b.words();
  for (std::size_t i = 0; i < wa.size(); ++i) {
    const std::uint64_t w = wa[i] & wb[i];
    if (!w) continue;
    if (!rep.collides) {
      rep.collides = true;
      rep.first_hit = a.unflatten(i * 64 + std::size_t(std::countr_zero(w)));
      if (mode == CollideMode::kBooleanOnly) {
        rep.overlap_voxels = 1;  // at least one; exact count skipped by request
        return rep;
      }
    }
    rep.overlap_voxels += std::size_t(std::popcount(w));
  }
  return rep;
}

GridFrame transformed_frame(const VoxelGrid& v, const SE3Pose& pose) {
  const GridFrame& f = v.frame();
  const double res = f.resolution;
  const Eigen::Vector3d ext = res * Eigen::Vector3d(f.dims[0], f.dims[1], f.dims[2]);
  Eigen::Vector3d lo = Eigen::Vector3d::Constant(std::numeric_limits<double>::infinity());
  Eigen::Vector3d hi = -lo;
  for (int cx = 0; cx <= 1; ++cx)
    for (int cy = 0; cy <= 1; ++cy)
      for (int cz = 0; cz <= 1; ++cz) {
        const Eigen::Vector3d corner = f.origin + Eigen::Vector3d(cx * ext.x(), cy * ext.y(), cz * ext.z());
        const Eigen::Vector3d w = pose.apply(corner);
        lo = lo.cwiseMin(w);
        hi = hi.cwiseMax(w);
      }
  // Keep the source lattice phase shifted by the translation: pure
  // translations then map voxel centers exactly onto voxel centers.
  const Eigen::Vector3d anchor = f.origin + pose.translation;
  GridFrame out;
  out.resolution = res;
  for (int k = 0; k < 3; ++k) {
    const double shift = std::floor((lo[k] - anchor[k]) / res + 1e-9);
    out.origin[k] = anchor[k] + shift * res;
    out.dims[k] = std::max(1, int(std::ceil((hi[k] - out.origin[k]) / res - 1e-9)));
  }
  return out;
}

VoxelGrid transform(const VoxelGrid& v, const SE3Pose& pose, const GridFrame& target, ClipPolicy clip) {
  pose.validate();
  target.validate();
  if (std::abs(target.resolution - v.resolution()) > 1e-12)
    throw std::invalid_argument("transform: target frame resolution must match the source grid");

  const SE3Pose inv = pose.inverse();
  const GridFrame& src = v.frame();
  VoxelGrid out(target);
  const int nx = target.dims[0], ny = target.dims[1], nz = target.dims[2];
  const double res = target.resolution;

  // Pull-back: walk output centers, map through pose^-1, nearest-neighbor
  // lookup in the source lattice.
  auto fill_slab = [&](int z) {
    for (int y = 0; y < ny; ++y) {
      const Eigen::Vector3d row0 = target.origin + res * Eigen::Vector3d(0.5, y + 0.5, z + 0.5);
      // Incremental: center(x) = row0 + x*res*ex ; pulled back through inv is
      // affine in x, so precompute the step.
      const Eigen::Vector3d p0 = inv.apply(row0);
      const Eigen::Vector3d step = inv.rotation.col(0) * res;
      for (int x = 0; x < nx; ++x) {
        const Eigen::Vector3d p = p0 + double(x) * step;
        const Eigen::Vector3d q = (p - src.origin) / res;
        const int sx = int(std::floor(q.x()));
        const int sy = int(std::floor(q.y()));
        const int sz = int(std::floor(q.z()));
        if (src.in_bounds(sx, sy, sz) && v.test(sx, sy, sz)) out.set(x, y, z);
      }
    }
  };

  if (std::size_t(nx) * ny * nz / 64 >= kParallelWords) {
#pragma omp parallel for schedule(static)
    for (int z = 0; z < nz; ++z) fill_slab(z);
  } else {
    for (int z = 0; z < nz; ++z) fill_slab(z);
  }

  if (clip == ClipPolicy::kReject) {
    // Occupancy is clipped iff some occupied source center forward-maps
    // outside the target box.
    const Eigen::Vector3d lo = target.origin;
    const Eigen::Vector3d hi = target.max_corner();
    const auto& words = v.words();
    for (std::size_t wi = 0; wi < words.size(); ++wi) {
      std::uint64_t w = words[wi];
      while (w) {
        const std::size_t i = wi * 64 + std::size_t(std::countr_zero(w));
        w &= w - 1;
        const auto [x, y, z] = v.unflatten(i);
        const Eigen::Vector3d c = pose.apply(src.center_of(x, y, z));
        if ((c.array() < lo.array()).any() || (c.array() >= hi.array()).any())
          throw std::invalid_argument("transform: occupancy clipped by target frame (pass ClipPolicy::kAllow to permit)");
      }
    }
  }
  return out;
}

VoxelGrid transform_auto(const VoxelGrid& v, const SE3Pose& pose) {
  return transform(v, pose, transformed_frame(v, pose), ClipPolicy::kAllow);
}

VoxelGrid reframe(const VoxelGrid& v, const GridFrame& target) {
  target.validate();
  if (v.frame().aligned_with(target)) {
    VoxelGrid out(target);
    const Eigen::Vector3d d = (v.origin() - target.origin) / target.resolution;
    blit_or(out, v, {int(std::llround(d.x())), int(std::llround(d.y())), int(std::llround(d.z()))});
    return out;
  }
  // General nearest-neighbor resample (handles resolution changes).
  VoxelGrid out(target);
  const GridFrame& src = v.frame();
  for (int z = 0; z < target.dims[2]; ++z)
    for (int y = 0; y < target.dims[1]; ++y)
      for (int x = 0; x < target.dims[0]; ++x) {
        const auto [sx, sy, sz] = src.index_of(target.center_of(x, y, z));
        if (src.in_bounds(sx, sy, sz) && v.test(sx, sy, sz)) out.set(x, y, z);
      }
  return out;
}

std::array<int, 3> lattice_offset(const GridFrame& a, const GridFrame& b) {
  if (!a.aligned_with(b)) throw std::invalid_argument("lattice_offset: frames are not lattice-aligned");
  const Eigen::Vector3d d = (b.origin - a.origin) / a.resolution;
  return {int(std::llround(d.x())), int(std::llround(d.y())), int(std::llround(d.z()))};
}

void blit_or(VoxelGrid& dst, const VoxelGrid& src, const std::array<int, 3>& offset) {
  const auto& sd = src.dims();
  const auto& dd = dst.dims();
  for (int z = 0; z < sd[2]; ++z) {
    const int dz = z + offset[2];
    if (dz < 0 || dz >= dd[2]) continue;
    for (int y = 0; y < sd[1]; ++y) {
      const int dy = y + offset[1];
      if (dy < 0 || dy >= dd[1]) continue;
      const int x0 = std::max(0, -offset[0]);
      const int x1 = std::min(sd[0], dd[0] - offset[0]);
      for (int x = x0; x < x1; ++x) {
        if (src.test(x, y, z)) dst.set(x + offset[0], dy, dz);
      }
    }
  }
}

std::size_t overlap_count(const VoxelGrid& a, const VoxelGrid& b, const std::array<int, 3>& offset_b,
                          bool early_exit) {
  const auto& bd = b.dims();
  const auto& ad = a.dims();
  std::size_t count = 0;
  for (int z = 0; z < bd[2]; ++z) {
    const int az = z + offset_b[2];
    if (az < 0 || az >= ad[2]) continue;
    for (int y = 0; y < bd[1]; ++y) {
      const int ay = y + offset_b[1];
      if (ay < 0 || ay >= ad[1]) continue;
      const int x0 = std::max(0, -offset_b[0]);
      const int x1 = std::min(bd[0], ad[0] - offset_b[0]);
      for (int x = x0; x < x1; ++x) {
        if (b.test(x, y, z) && a.test(x + offset_b[0], ay, az)) {
          ++count;
          if (early_exit) return count;
        }
      }
    }
  }
  return count;
}

}  // namespace voxfetch
