#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <cmath>
#include <stdexcept>

namespace voxfetch {

/// Rigid-body transform: p' = rotation * p + translation. Translations in meters.
struct SE3Pose {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  static SE3Pose identity() { return {}; }

  static SE3Pose from_translation(const Eigen::Vector3d& t) {
    SE3Pose p;
    p.translation = t;
    return p;
  }

  static SE3Pose from_yaw(double yaw, const Eigen::Vector3d& t = Eigen::Vector3d::Zero()) {
    SE3Pose p;
    p.rotation = Eigen::AngleAxisd(yaw, Eigen::Vector3d::UnitZ()).toRotationMatrix();
    p.translation = t;
    return p;
  }

  static SE3Pose from_axis_angle(const Eigen::Vector3d& axis, double angle,
                                 const Eigen::Vector3d& t = Eigen::Vector3d::Zero()) {
    SE3Pose p;
    p.rotation = Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix();
    p.translation = t;
    return p;
  }

  Eigen::Vector3d apply(const Eigen::Vector3d& p) const { return rotation * p + translation; }

  SE3Pose inverse() const {
    SE3Pose inv;
    inv.rotation = rotation.transpose();
    inv.translation = -(inv.rotation * translation);
    return inv;
  }

  SE3Pose operator*(const SE3Pose& rhs) const {
    SE3Pose out;
    out.rotation = rotation * rhs.rotation;
    out.translation = rotation * rhs.translation + translation;
    return out;
  }

  // Orthonormality within tol per entry and det = +1 within tol.
  bool is_valid(double tol = 1e-9) const {
    Eigen::Matrix3d err = rotation.transpose() * rotation - Eigen::Matrix3d::Identity();
    if (err.cwiseAbs().maxCoeff() >= tol) return false;
    if (std::abs(rotation.determinant() - 1.0) >= tol) return false;
    return translation.allFinite();
  }

  void validate(double tol = 1e-9) const {
    if (!is_valid(tol)) throw std::invalid_argument("SE3Pose: rotation is not a proper rotation matrix");
  }
};

}  // namespace voxfetch
