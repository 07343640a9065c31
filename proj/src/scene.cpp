#include "voxfetch/scene.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "voxfetch/io.hpp"
#include "voxfetch/render.hpp"

namespace voxfetch {

namespace fs = std::filesystem;

const char* to_string(ContainerType t) {
  switch (t) {
    case ContainerType::kShelf: return "shelf";
    case ContainerType::kTabletop: return "tabletop";
    case ContainerType::kDrawer: return "drawer";
    case ContainerType::kRack: return "rack";
  }
  return "shelf";
}

std::optional<ContainerType> container_from_string(const std::string& s) {
  if (s == "shelf") return ContainerType::kShelf;
  if (s == "tabletop") return ContainerType::kTabletop;
  if (s == "drawer") return ContainerType::kDrawer;
  if (s == "rack") return ContainerType::kRack;
  return std::nullopt;
}

void ContainerSpec::validate() const {
  for (int k = 0; k < 3; ++k)
    if (!(interior[k] > 0)) throw std::invalid_argument("ContainerSpec: interior dims must be strictly positive");
}

GridFrame ContainerSpec::scene_frame(double resolution) const {
  validate();
  GridFrame f;
  f.origin = Eigen::Vector3d::Zero();
  f.resolution = resolution;
  for (int k = 0; k < 3; ++k) f.dims[k] = std::max(1, int(std::ceil(interior[k] / resolution - 1e-9)));
  return f;
}

void GenConfig::validate() const {
  if (n_scenes < 0) throw std::invalid_argument("GenConfig: n_scenes must be >= 0");
  if (max_objects < 1) throw std::invalid_argument("GenConfig: max_objects must be >= 1");
  if (max_retries_per_object < 1) throw std::invalid_argument("GenConfig: max_retries_per_object must be >= 1");
  if (!(resolution > 0)) throw std::invalid_argument("GenConfig: resolution must be positive");
  container.validate();
  if (assets.empty()) throw std::invalid_argument("GenConfig: asset pool must be non-empty");
  bool any_target = false;
  for (const auto& a : assets) any_target = any_target || a.can_target;
  if (!any_target) throw std::invalid_argument("GenConfig: at least one asset must allow the target role");
  if (!(pose_rules.yaw_max >= pose_rules.yaw_min))
    throw std::invalid_argument("GenConfig: yaw range is inverted");
}

std::string GenConfig::canonical_text() const {
  std::ostringstream os;
  os << "n_scenes=" << n_scenes << "\nmax_objects=" << max_objects << "\ncontainer=" << to_string(container.type)
     << "\ninterior=" << io::format_double(container.interior.x()) << ' ' << io::format_double(container.interior.y())
     << ' ' << io::format_double(container.interior.z()) << "\nresolution=" << io::format_double(resolution)
     << "\nseed=" << seed << "\nmax_retries=" << max_retries_per_object
     << "\nyaw=" << io::format_double(pose_rules.yaw_min) << ' ' << io::format_double(pose_rules.yaw_max)
     << "\njitter=" << io::format_double(pose_rules.roll_pitch_jitter) << "\nfull_so3=" << pose_rules.full_so3 << '\n';
  for (const auto& a : assets) {
    os << "asset " << a.id << " target=" << a.can_target << " obstacle=" << a.can_obstacle << " ";
    switch (a.shape.kind) {
      case ShapeSpec::Kind::kBox:
        os << "box " << io::format_double(a.shape.box_dims.x()) << ' ' << io::format_double(a.shape.box_dims.y())
           << ' ' << io::format_double(a.shape.box_dims.z());
        break;
      case ShapeSpec::Kind::kCylinder:
        os << "cylinder " << io::format_double(a.shape.radius) << ' ' << io::format_double(a.shape.height);
        break;
      case ShapeSpec::Kind::kMesh:
        os << "mesh " << a.shape.mesh_path;
        break;
    }
    os << '\n';
  }
  return os.str();
}

const Placement& SceneSpec::target() const {
  for (const auto& p : placements)
    if (p.role == Role::kTarget) return p;
  throw std::logic_error("SceneSpec: no target placement");
}

void SceneSpec::validate() const {
  container.validate();
  if (!(resolution > 0)) throw std::invalid_argument("SceneSpec: resolution must be positive");
  int targets = 0;
  for (const auto& p : placements) targets += (p.role == Role::kTarget);
  if (targets != 1) throw std::invalid_argument("SceneSpec: exactly one placement must have the target role");
  if (occlusion_rate < 0 || occlusion_rate > 1)
    throw std::invalid_argument("SceneSpec: occlusion_rate outside [0,1]");
  if (difficulty_level < 1 || difficulty_level > 5)
    throw std::invalid_argument("SceneSpec: difficulty_level outside 1..5");
  for (const auto& p : placements) p.pose.validate();
}

VoxelGrid voxelize_shape(const ShapeSpec& shape, double resolution) {
  switch (shape.kind) {
    case ShapeSpec::Kind::kBox:
      return voxelize_box(shape.box_dims, resolution);
    case ShapeSpec::Kind::kCylinder:
      return voxelize_cylinder(shape.radius, shape.height, resolution);
    case ShapeSpec::Kind::kMesh:
      return voxelize_mesh(io::read_off_file(shape.mesh_path), resolution, FillMode::kSolid);
  }
  throw std::invalid_argument("voxelize_shape: unknown shape kind");
}

AssetLibrary::AssetLibrary(const GenConfig& cfg) {
  for (const auto& a : cfg.assets) {
    if (defs_.count(a.id)) throw std::invalid_argument("AssetLibrary: duplicate asset id " + a.id);
    defs_[a.id] = a;
    grids_.emplace(a.id, voxelize_shape(a.shape, cfg.resolution));
  }
}

const VoxelGrid& AssetLibrary::canonical(const std::string& asset_id) const {
  auto it = grids_.find(asset_id);
  if (it == grids_.end()) throw std::invalid_argument("AssetLibrary: unknown asset " + asset_id);
  return it->second;
}

const AssetDef& AssetLibrary::def(const std::string& asset_id) const {
  auto it = defs_.find(asset_id);
  if (it == defs_.end()) throw std::invalid_argument("AssetLibrary: unknown asset " + asset_id);
  return it->second;
}

std::vector<std::string> AssetLibrary::target_ids() const {
  std::vector<std::string> out;
  for (const auto& [id, def] : defs_)
    if (def.can_target) out.push_back(id);
  return out;
}

std::vector<std::string> AssetLibrary::obstacle_ids() const {
  std::vector<std::string> out;
  for (const auto& [id, def] : defs_)
    if (def.can_obstacle) out.push_back(id);
  return out;
}

namespace {

// Rotated bounding box of the canonical extent under R, as (min, max).
std::pair<Eigen::Vector3d, Eigen::Vector3d> rotated_aabb(const Eigen::Vector3d& extent,
                                                         const Eigen::Matrix3d& rot) {
  Eigen::Vector3d lo = Eigen::Vector3d::Constant(std::numeric_limits<double>::infinity());
  Eigen::Vector3d hi = -lo;
  for (int i = 0; i < 8; ++i) {
    const Eigen::Vector3d corner((i & 1) ? extent.x() : 0.0, (i & 2) ? extent.y() : 0.0, (i & 4) ? extent.z() : 0.0);
    const Eigen::Vector3d r = rot * corner;
    lo = lo.cwiseMin(r);
    hi = hi.cwiseMax(r);
  }
  return {lo, hi};
}

// Tight frame around the posed asset, snapped to the scene lattice so union
// and overlap checks are integer blits.
GridFrame scene_aligned_frame(const Eigen::Vector3d& extent, const SE3Pose& pose, const GridFrame& scene) {
  auto [lo, hi] = rotated_aabb(extent, pose.rotation);
  lo += pose.translation;
  hi += pose.translation;
  GridFrame f;
  f.resolution = scene.resolution;
  for (int k = 0; k < 3; ++k) {
    const double i0 = std::floor((lo[k] - scene.origin[k]) / scene.resolution + 1e-9);
    f.origin[k] = scene.origin[k] + i0 * scene.resolution;
    f.dims[k] = std::max(1, int(std::ceil((hi[k] - f.origin[k]) / scene.resolution - 1e-9)));
  }
  return f;
}

Eigen::Vector3d canonical_extent(const VoxelGrid& g) {
  return g.resolution() * Eigen::Vector3d(g.dims()[0], g.dims()[1], g.dims()[2]);
}

Eigen::Matrix3d sample_rotation(RngStream& rng, const PoseRules& rules) {
  if (rules.full_so3) {
    // Uniform rotation via a uniform quaternion (Shoemake).
    const double u1 = rng.uniform01(), u2 = rng.uniform01(), u3 = rng.uniform01();
    const double s1 = std::sqrt(1 - u1), s2 = std::sqrt(u1);
    const Eigen::Quaterniond q(s2 * std::cos(2 * M_PI * u3), s1 * std::sin(2 * M_PI * u2),
                               s1 * std::cos(2 * M_PI * u2), s2 * std::sin(2 * M_PI * u3));
    return q.normalized().toRotationMatrix();
  }
  const double yaw = rng.uniform(rules.yaw_min, rules.yaw_max);
  Eigen::Matrix3d r = Eigen::AngleAxisd(yaw, Eigen::Vector3d::UnitZ()).toRotationMatrix();
  if (rules.roll_pitch_jitter > 0) {
    const double roll = rng.uniform(-rules.roll_pitch_jitter, rules.roll_pitch_jitter);
    const double pitch = rng.uniform(-rules.roll_pitch_jitter, rules.roll_pitch_jitter);
    r = r * Eigen::AngleAxisd(pitch, Eigen::Vector3d::UnitY()).toRotationMatrix() *
        Eigen::AngleAxisd(roll, Eigen::Vector3d::UnitX()).toRotationMatrix();
  }
  return r;
}

struct PlacedObject {
  SE3Pose pose;
  VoxelGrid grid;               // scene-aligned tight frame
  std::array<int, 3> offset{};  // grid origin inside the scene lattice
};

// One rejection attempt: sample a rotation and a footprint position, rest the
// object on the support plane, rasterize, and check containment. Returns
// nullopt when the footprint cannot fit.
std::optional<PlacedObject> attempt_place(const VoxelGrid& canonical, const GridFrame& scene,
                                          const GenConfig& cfg, RngStream& rng) {
  const Eigen::Vector3d extent = canonical_extent(canonical);
  const Eigen::Matrix3d rot = sample_rotation(rng, cfg.pose_rules);
  auto [rlo, rhi] = rotated_aabb(extent, rot);
  const Eigen::Vector3d span = rhi - rlo;
  const Eigen::Vector3d interior = cfg.container.interior;
  // Footprint shrunk by the half-extent; fail the attempt when it vanishes.
  const double hx = span.x() / 2, hy = span.y() / 2;
  if (hx * 2 > interior.x() || hy * 2 > interior.y() || span.z() > interior.z()) return std::nullopt;
  const double cx = rng.uniform(hx, interior.x() - hx);
  const double cy = rng.uniform(hy, interior.y() - hy);

  SE3Pose pose;
  pose.rotation = rot;
  // Desired world AABB min corner: centered at (cx, cy), resting at z = 0.
  pose.translation = Eigen::Vector3d(cx - hx, cy - hy, 0.0) - rlo;

  for (int pass = 0; pass < 4; ++pass) {
    PlacedObject placed;
    placed.pose = pose;
    const GridFrame frame = scene_aligned_frame(extent, pose, scene);
    placed.grid = transform(canonical, pose, frame, ClipPolicy::kAllow);
    const auto bounds = placed.grid.tight_bounds();
    if (!bounds) return std::nullopt;  // degenerate rasterization
    placed.offset = lattice_offset(scene, frame);
    // Rest the lowest occupied layer exactly on the support plane.
    const int lowest = placed.offset[2] + bounds->min[2];
    if (lowest != 0) {
      pose.translation.z() -= lowest * scene.resolution;
      continue;
    }
    // Containment in the interior lattice.
    for (int k = 0; k < 3; ++k) {
      const int lo = placed.offset[k] + bounds->min[k];
      const int hi = placed.offset[k] + bounds->max[k];
      if (lo < 0 || hi >= scene.dims[k]) return std::nullopt;
    }
    return placed;
  }
  return std::nullopt;
}

}  // namespace

VoxelGrid rasterize_placement(const Placement& p, const AssetLibrary& lib, const GridFrame& scene) {
  const VoxelGrid& canonical = lib.canonical(p.asset_id);
  const GridFrame frame = scene_aligned_frame(canonical_extent(canonical), p.pose, scene);
  return transform(canonical, p.pose, frame, ClipPolicy::kAllow);
}

GenResult generate_scene(const GenConfig& cfg, const AssetLibrary& lib, std::uint64_t scene_index) {
  cfg.validate();
  const GridFrame scene_frame = cfg.container.scene_frame(cfg.resolution);
  RngStream rng(derive_seed(cfg.seed, scene_index));

  GenResult result;
  SceneSpec& scene = result.scene;
  {
    char buf[32];
    std::snprintf(buf, sizeof buf, "scene_%06llu", static_cast<unsigned long long>(scene_index));
    scene.scene_id = buf;
  }
  scene.container = cfg.container;
  scene.resolution = cfg.resolution;
  scene.seed = derive_seed(cfg.seed, scene_index);

  VoxelGrid occupied(scene_frame);

  const auto target_pool = lib.target_ids();
  const auto obstacle_pool = lib.obstacle_ids();

  // Target first (no collision test possible in an empty scene, containment only).
  const std::string target_id = target_pool[rng.uniform_index(int(target_pool.size()))];
  std::optional<PlacedObject> target_placed;
  for (int attempt = 0; attempt < cfg.max_retries_per_object && !target_placed; ++attempt)
    target_placed = attempt_place(lib.canonical(target_id), scene_frame, cfg, rng);
  if (!target_placed) {
    result.failure_reason = "target '" + target_id + "' unplaceable after " +
                            std::to_string(cfg.max_retries_per_object) + " retries";
    return result;
  }
  blit_or(occupied, target_placed->grid, target_placed->offset);
  scene.placements.push_back({target_id, lib.def(target_id).shape, target_placed->pose, Role::kTarget});

  if (!obstacle_pool.empty()) {
    // k ~ U[1, K]; asset choices drawn first, then placed largest-first.
    const int k = int(rng.uniform_int(1, std::uint64_t(cfg.max_objects)));
    std::vector<std::string> picks(k);
    for (int i = 0; i < k; ++i) picks[i] = obstacle_pool[rng.uniform_index(int(obstacle_pool.size()))];
    std::stable_sort(picks.begin(), picks.end(), [&](const std::string& a, const std::string& b) {
      return lib.canonical(a).popcount() > lib.canonical(b).popcount();
    });

    bool reduced = false;
    for (const std::string& id : picks) {
      const VoxelGrid& canonical = lib.canonical(id);
      bool placed_ok = false;
      for (int attempt = 0; attempt < cfg.max_retries_per_object; ++attempt) {
        auto placed = attempt_place(canonical, scene_frame, cfg, rng);
        if (!placed) continue;
        if (overlap_count(occupied, placed->grid, placed->offset, /*early_exit=*/true) > 0) continue;
        blit_or(occupied, placed->grid, placed->offset);
        scene.placements.push_back({id, lib.def(id).shape, placed->pose, Role::kObstacle});
        placed_ok = true;
        break;
      }
      if (!placed_ok) reduced = true;
    }
    if (reduced) scene.flags.push_back("reduced_obstacles");
  }

  const auto [rate, level] = label_difficulty(scene, lib);
  scene.occlusion_rate = rate;
  scene.difficulty_level = level;
  if (rate >= 1.0) scene.flags.push_back("unsolvable");
  result.ok = true;
  return result;
}

SemanticGrid compose_semantic_grid(const SceneSpec& scene, const AssetLibrary& lib) {
  scene.validate();
  SemanticGrid grid(scene.scene_frame());
  const GridFrame frame = grid.frame();
  for (const auto& p : scene.placements) {
    const VoxelGrid placed = rasterize_placement(p, lib, frame);
    const auto offset = lattice_offset(frame, placed.frame());
    const VoxelLabel label = p.role == Role::kTarget ? VoxelLabel::kTarget : VoxelLabel::kObstacle;
    const auto& d = placed.dims();
    for (int z = 0; z < d[2]; ++z) {
      const int gz = z + offset[2];
      if (gz < 0 || gz >= frame.dims[2]) continue;
      for (int y = 0; y < d[1]; ++y) {
        const int gy = y + offset[1];
        if (gy < 0 || gy >= frame.dims[1]) continue;
        for (int x = 0; x < d[0]; ++x) {
          if (!placed.test(x, y, z)) continue;
          const int gx = x + offset[0];
          if (gx < 0 || gx >= frame.dims[0]) continue;
          if (grid.at(gx, gy, gz) != VoxelLabel::kFree)
            throw std::logic_error("compose_semantic_grid: object overlap at voxel (" + std::to_string(gx) +
                                   "," + std::to_string(gy) + "," + std::to_string(gz) +
                                   ") — scene violates its zero-penetration invariant");
          grid.set(gx, gy, gz, label);
        }
      }
    }
  }
  return grid;
}

int difficulty_from_rate(double occlusion_rate) {
  const int level = 1 + int(std::floor(occlusion_rate * 5.0));
  return std::clamp(level, 1, 5);
}

std::pair<double, int> label_difficulty(const SceneSpec& scene, const AssetLibrary& lib) {
  // Bypass full SceneSpec validation: called mid-generation before the
  // occlusion fields are filled in.
  SceneSpec probe = scene;
  probe.occlusion_rate = 0.0;
  probe.difficulty_level = 1;
  const SemanticGrid grid = compose_semantic_grid(probe, lib);
  const OcclusionCounts counts = occlusion_counts(grid);
  const double rate = counts.rate();
  return {rate, difficulty_from_rate(rate)};
}

BatchResult batch_generate(const GenConfig& cfg, const std::string& out_dir, int workers,
                           const std::atomic<bool>* stop) {
  cfg.validate();
  if (workers < 1) throw std::invalid_argument("batch_generate: workers must be >= 1");
  const auto t_start = std::chrono::steady_clock::now();

  fs::create_directories(fs::path(out_dir) / "scenes");
  fs::create_directories(fs::path(out_dir) / "occupancy");

  const AssetLibrary lib(cfg);

  struct SceneOutcome {
    bool ok = false;
    bool attempted = false;
    std::string reason;
    io::ManifestEntry entry;
  };
  std::vector<SceneOutcome> outcomes(std::size_t(cfg.n_scenes));
  std::atomic<std::uint64_t> next{0};
  std::atomic<bool> io_error{false};
  std::string io_error_message;
  std::mutex io_error_mutex;

  auto worker_fn = [&]() {
    while (true) {
      const std::uint64_t i = next.fetch_add(1);
      if (i >= std::uint64_t(cfg.n_scenes)) return;
      if ((stop && stop->load()) || io_error.load()) return;
      SceneOutcome& out = outcomes[i];
      out.attempted = true;
      GenResult res = generate_scene(cfg, lib, i);
      if (!res.ok) {
        out.reason = res.failure_reason;
        continue;
      }
      try {
        const SceneSpec& scene = res.scene;
        const std::string scene_rel = "scenes/" + scene.scene_id + ".json";
        const std::string occ_rel = "occupancy/" + scene.scene_id + ".fboc";
        io::write_scene_file(scene, (fs::path(out_dir) / scene_rel).string());
        io::write_occupancy_file(compose_semantic_grid(scene, lib), (fs::path(out_dir) / occ_rel).string());
        io::Fnv64 h;
        h.update(io::digest_file((fs::path(out_dir) / scene_rel).string()));
        h.update(io::digest_file((fs::path(out_dir) / occ_rel).string()));
        out.entry = {scene.scene_id, scene_rel,    occ_rel, scene.occlusion_rate,
                     scene.difficulty_level, scene.flags, "fnv1a64:" + h.hex()};
        out.ok = true;
      } catch (const std::exception& e) {
        std::lock_guard lock(io_error_mutex);
        io_error_message = e.what();
        io_error.store(true);
        return;
      }
    }
  };

  if (workers == 1) {
    worker_fn();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker_fn);
    for (auto& t : pool) t.join();
  }

  if (io_error.load()) throw std::runtime_error("batch_generate: I/O failure: " + io_error_message);

  BatchResult result;
  result.n_requested = cfg.n_scenes;

  const bool interrupted = stop && stop->load() &&
                           std::any_of(outcomes.begin(), outcomes.end(),
                                       [](const SceneOutcome& o) { return !o.attempted; });

  io::DatasetManifest manifest;
  manifest.seed = cfg.seed;
  manifest.resolution = cfg.resolution;
  manifest.config_digest = "fnv1a64:" + [&] {
    io::Fnv64 h;
    h.update(cfg.canonical_text());
    return h.hex();
  }();
  for (std::uint64_t i = 0; i < outcomes.size(); ++i) {
    const SceneOutcome& o = outcomes[i];
    if (o.ok) {
      manifest.scenes.push_back(o.entry);
      ++result.n_written;
      for (const auto& f : o.entry.flags)
        if (f == "reduced_obstacles") ++result.n_flagged_reduced;
    } else if (o.attempted) {
      manifest.failures.push_back({i, o.reason});
      ++result.n_failed;
    }
  }
  manifest.content_digest = io::manifest_content_digest(manifest);
  result.content_digest = manifest.content_digest;

  // The manifest certifies completeness; an interrupted run leaves none.
  if (!interrupted) {
    result.manifest_path = (fs::path(out_dir) / "manifest.json").string();
    io::write_manifest_file(manifest, result.manifest_path);
  }

  result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  result.scenes_per_sec = result.seconds > 0 ? result.n_written / result.seconds : 0.0;
  return result;
}

}  // namespace voxfetch
