#pragma once

#include <atomic>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "voxfetch/rng.hpp"
#include "voxfetch/semantic_grid.hpp"
#include "voxfetch/voxelize.hpp"

namespace voxfetch {

enum class ContainerType { kShelf, kTabletop, kDrawer, kRack };

const char* to_string(ContainerType t);
std::optional<ContainerType> container_from_string(const std::string& s);

struct ContainerSpec {
  ContainerType type = ContainerType::kShelf;
  Eigen::Vector3d interior{0.80, 0.40, 0.40};  // meters; opening faces -y

  void validate() const;
  GridFrame scene_frame(double resolution) const;
};

enum class Role { kTarget, kObstacle };

struct ShapeSpec {
  enum class Kind { kBox, kCylinder, kMesh };
  Kind kind = Kind::kBox;
  Eigen::Vector3d box_dims = Eigen::Vector3d::Zero();
  double radius = 0.0, height = 0.0;
  std::string mesh_path;  // for kMesh; resolved relative to the config file

  bool operator==(const ShapeSpec&) const = default;
};

struct AssetDef {
  std::string id;
  ShapeSpec shape;
  bool can_target = true;
  bool can_obstacle = true;
};

/// Pose sampling rules. Upright placements draw yaw only; rack layouts may
/// add a roll/pitch jitter or go full SO(3).
struct PoseRules {
  double yaw_min = -3.14159265358979323846;
  double yaw_max = 3.14159265358979323846;
  double roll_pitch_jitter = 0.0;  // max |roll|,|pitch| in radians
  bool full_so3 = false;
};

struct GenConfig {
  int n_scenes = 1;
  int max_objects = 10;  // K; obstacle count k is drawn uniformly from [1, K]
  ContainerSpec container;
  std::vector<AssetDef> assets;
  double resolution = 0.005;
  std::uint64_t seed = 0;
  int max_retries_per_object = 200;
  PoseRules pose_rules;

  void validate() const;
  /// Canonical key=value rendering used for the config digest.
  std::string canonical_text() const;
};

struct Placement {
  std::string asset_id;
  ShapeSpec shape;
  SE3Pose pose;  // canonical asset frame -> scene frame
  Role role = Role::kObstacle;
};

struct SceneSpec {
  std::string scene_id;
  ContainerSpec container;
  double resolution = 0.005;
  std::uint64_t seed = 0;  // the derived per-scene seed
  std::vector<Placement> placements;
  double occlusion_rate = 0.0;
  int difficulty_level = 1;
  std::vector<std::string> flags;
  std::string extras_json;  // unknown fields preserved in lax parses

  const Placement& target() const;
  GridFrame scene_frame() const { return container.scene_frame(resolution); }
  void validate() const;  // exactly one target, fields in range
};

/// Canonical voxelizations per asset id, built once and shared read-only
/// across scene workers.
class AssetLibrary {
 public:
  AssetLibrary() = default;
  explicit AssetLibrary(const GenConfig& cfg);

  /// Voxelization for an asset of the library (insert-once cache).
  const VoxelGrid& canonical(const std::string& asset_id) const;
  const AssetDef& def(const std::string& asset_id) const;
  std::vector<std::string> target_ids() const;
  std::vector<std::string> obstacle_ids() const;

 private:
  std::map<std::string, AssetDef> defs_;
  std::map<std::string, VoxelGrid> grids_;
};

/// Voxelize a shape at the given resolution in its canonical frame
/// (bounding-box min corner at the origin).
VoxelGrid voxelize_shape(const ShapeSpec& shape, double resolution);

/// Rasterize one placement onto the scene lattice: tight scene-aligned frame
/// around the posed asset, nearest-neighbor resample.
VoxelGrid rasterize_placement(const Placement& p, const AssetLibrary& lib, const GridFrame& scene);

struct GenResult {
  SceneSpec scene;
  bool ok = false;
  std::string failure_reason;
};

/// One rejection-sampled scene: target placed first, then k ~ U[1, K]
/// obstacles in decreasing canonical-volume order, each retried until its
/// voxel footprint is contained and collision-free. Deterministic in
/// (cfg, cfg.seed, scene_index).
GenResult generate_scene(const GenConfig& cfg, const AssetLibrary& lib, std::uint64_t scene_index);

/// Labels from the union of transformed object voxelizations; throws
/// std::logic_error if placements overlap (an upstream invariant violation).
SemanticGrid compose_semantic_grid(const SceneSpec& scene, const AssetLibrary& lib);

/// (occlusion_rate, difficulty level 1..5) from the frontal first-hit scan.
std::pair<double, int> label_difficulty(const SceneSpec& scene, const AssetLibrary& lib);

int difficulty_from_rate(double occlusion_rate);

struct BatchResult {
  int n_requested = 0;
  int n_written = 0;
  int n_failed = 0;            // scenes with no placeable target
  int n_flagged_reduced = 0;   // scenes emitted with fewer obstacles
  std::string manifest_path;   // empty when interrupted
  std::string content_digest;
  double seconds = 0.0;
  double scenes_per_sec = 0.0;
};

/// Generate cfg.n_scenes scenes into out_dir (scenes/ + occupancy/ + manifest)
/// across `workers` threads. Output is byte-identical for any worker count;
/// the manifest is written last and only when every scene job ran. `stop`
/// (optional) aborts between scenes, leaving a manifest-less directory.
BatchResult batch_generate(const GenConfig& cfg, const std::string& out_dir, int workers,
                           const std::atomic<bool>* stop = nullptr);

}  // namespace voxfetch
