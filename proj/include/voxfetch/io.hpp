#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "voxfetch/camera.hpp"
#include "voxfetch/metrics.hpp"
#include "voxfetch/render.hpp"
#include "voxfetch/scene.hpp"
#include "voxfetch/semantic_grid.hpp"
#include "voxfetch/voxelize.hpp"

namespace voxfetch::io {

/// Structured parse failure naming the byte offset (binary formats) or the
/// line (text formats) where the stream went wrong.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string message, std::size_t byte_offset)
      : std::runtime_error(message + " (at byte " + std::to_string(byte_offset) + ")"),
        byte_offset_(byte_offset) {}
  std::size_t byte_offset() const { return byte_offset_; }

 private:
  std::size_t byte_offset_;
};

// ---- FNV-1a 64-bit digests (integrity/determinism audits, not security).

class Fnv64 {
 public:
  void update(const void* data, std::size_t n);
  void update(std::string_view s) { update(s.data(), s.size()); }
  std::uint64_t value() const { return state_; }
  std::string hex() const;

 private:
  std::uint64_t state_ = 14695981039346656037ull;
};

std::uint64_t fnv1a64(std::string_view bytes);
std::string digest_file(const std::string& path);  // "fnv1a64:<16 hex digits>"

// ---- Semantic occupancy, binary "FBOC".
// Layout: magic "FBOC" | version u16 LE | nx,ny,nz u32 LE | resolution f64 LE
// | origin 3x f64 LE | runs of (label u8, length u32 LE) in x-fastest order.
// Run lengths must sum to nx*ny*nz exactly.

std::size_t write_occupancy(const SemanticGrid& grid, std::ostream& out);
SemanticGrid read_occupancy(std::istream& in);
std::size_t write_occupancy_file(const SemanticGrid& grid, const std::string& path);
SemanticGrid read_occupancy_file(const std::string& path);

// ---- Depth maps, binary "FBDP".
// Layout: magic "FBDP" | width u32 LE | height u32 LE | mode u16 LE
// | row-major f32 LE; invalid pixels carry the -1.0f sentinel.

std::size_t write_depth(const DepthMap& d, std::ostream& out);
DepthMap read_depth(std::istream& in);
std::size_t write_depth_file(const DepthMap& d, const std::string& path);
DepthMap read_depth_file(const std::string& path);

// ---- Scenes, UTF-8 JSON. Doubles round-trip exactly. In strict mode
// unknown fields are rejected; in lax mode they are preserved and re-emitted.

std::string write_scene(const SceneSpec& scene);
SceneSpec read_scene(const std::string& text, bool strict = true);
void write_scene_file(const SceneSpec& scene, const std::string& path);
SceneSpec read_scene_file(const std::string& path, bool strict = true);

// ---- Trajectory logs, line-delimited text.
// Header "FBTL 1"; per episode one "episode <scene_id> <steps> <obstacles>
// <fetched>" line followed by one line per step with the fixed field order
// index dt ee(12) action(6) target(12) v accel d obstacles(12 each).

struct TrajectoryEpisode {
  std::string scene_id;
  bool fetched = false;
  std::vector<TrajectoryStep> steps;
};

std::string write_trajectories(std::span<const TrajectoryEpisode> episodes);
std::vector<TrajectoryEpisode> read_trajectories(const std::string& text);
void write_trajectories_file(std::span<const TrajectoryEpisode> episodes, const std::string& path);
std::vector<TrajectoryEpisode> read_trajectories_file(const std::string& path);

// ---- Dataset manifest, JSON. Written last; its presence certifies a
// complete dataset.

struct ManifestEntry {
  std::string scene_id;
  std::string scene_path;      // relative to the dataset root
  std::string occupancy_path;  // relative to the dataset root
  double occlusion_rate = 0.0;
  int difficulty_level = 1;
  std::vector<std::string> flags;
  std::string digest;  // combined digest of this entry's payload files
};

struct ManifestFailure {
  std::uint64_t scene_index = 0;
  std::string reason;
};

struct DatasetManifest {
  int format_version = 1;
  std::uint64_t seed = 0;
  double resolution = 0.005;
  std::string config_digest;
  std::vector<ManifestEntry> scenes;
  std::vector<ManifestFailure> failures;
  std::vector<CameraModel> cameras;  // filled in by the render stage
  std::string content_digest;
};

std::string write_manifest(const DatasetManifest& m);
DatasetManifest read_manifest(const std::string& text);
void write_manifest_file(const DatasetManifest& m, const std::string& path);
DatasetManifest read_manifest_file(const std::string& path);
/// Combined digest over config digest and per-entry digests, in order.
std::string manifest_content_digest(const DatasetManifest& m);

// ---- Triangle meshes, ASCII OFF (header "OFF", counts line, vertices,
// triangle index lines).

TriMesh read_off(std::istream& in);
TriMesh read_off_file(const std::string& path);
void write_off(const TriMesh& mesh, std::ostream& out);
void write_off_file(const TriMesh& mesh, const std::string& path);

// ---- Round-trip-exact decimal formatting helpers (shortest representation).

std::string format_double(double v);
double parse_double(std::string_view s);  // throws std::invalid_argument

}  // namespace voxfetch::io
