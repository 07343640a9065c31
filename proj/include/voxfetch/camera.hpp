#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "voxfetch/se3.hpp"

namespace voxfetch {

/// Pinhole camera. `extrinsic` maps world to camera coordinates
/// (x right, y down, z forward).
struct CameraModel {
  double fx = 0, fy = 0, cx = 0, cy = 0;  // pixels
  int width = 0, height = 0;              // pixels
  SE3Pose extrinsic;                      // world -> camera

  void validate() const {
    if (!(fx > 0) || !(fy > 0)) throw std::invalid_argument("CameraModel: focal lengths must be positive");
    if (width < 1 || height < 1) throw std::invalid_argument("CameraModel: image size must be positive");
    if (cx < 0 || cx >= width || cy < 0 || cy >= height)
      throw std::invalid_argument("CameraModel: principal point must lie inside the image");
    extrinsic.validate();
  }

  Eigen::Vector3d position() const { return extrinsic.inverse().translation; }
};

/// Pixel coordinates of a world point, or nullopt when the point is behind
/// the camera or projects outside the image.
inline std::optional<Eigen::Vector2d> project(const Eigen::Vector3d& p_world, const CameraModel& cam) {
  const Eigen::Vector3d q = cam.extrinsic.apply(p_world);
  if (!(q.z() > 0)) return std::nullopt;
  const double u = cam.fx * q.x() / q.z() + cam.cx;
  const double v = cam.fy * q.y() / q.z() + cam.cy;
  if (u < 0 || u >= cam.width || v < 0 || v >= cam.height) return std::nullopt;
  return Eigen::Vector2d(u, v);
}

/// Indices of the cameras into which the point projects validly.
inline std::vector<int> hit_views(const Eigen::Vector3d& p_world, std::span<const CameraModel> cams) {
  if (cams.empty()) throw std::invalid_argument("hit_views: camera list must be non-empty");
  std::vector<int> hits;
  for (int i = 0; i < int(cams.size()); ++i)
    if (project(p_world, cams[i])) hits.push_back(i);
  return hits;
}

/// Camera placed at `position` looking at `look_at`, world +z as up reference.
inline CameraModel make_lookat_camera(const Eigen::Vector3d& position, const Eigen::Vector3d& look_at,
                                      double fx, double fy, int width, int height,
                                      const Eigen::Vector3d& up = Eigen::Vector3d::UnitZ()) {
  CameraModel cam;
  cam.fx = fx;
  cam.fy = fy;
  cam.cx = width / 2.0;
  cam.cy = height / 2.0;
  cam.width = width;
  cam.height = height;
  const Eigen::Vector3d fwd = (look_at - position).normalized();
  Eigen::Vector3d right = fwd.cross(up);
  if (right.norm() < 1e-12) right = fwd.cross(Eigen::Vector3d::UnitY());  // looking straight up/down
  right.normalize();
  const Eigen::Vector3d down = fwd.cross(right).normalized();
  Eigen::Matrix3d r;
  r.row(0) = right;
  r.row(1) = down;
  r.row(2) = fwd;
  cam.extrinsic.rotation = r;
  cam.extrinsic.translation = -(r * position);
  return cam;
}

}  // namespace voxfetch
