#pragma once

#include <span>
#include <vector>

#include "voxfetch/se3.hpp"

namespace voxfetch {

/// One timestep of an evaluation episode. Obstacle count must be constant
/// across a trajectory.
struct TrajectoryStep {
  int index = 0;
  double dt = 0.1;                       // seconds
  SE3Pose ee_pose;                       // end-effector
  std::array<double, 6> action{};       // policy output a
  SE3Pose target_pose;
  double target_speed = 0.0;             // v, m/s
  double target_accel_mag = 0.0;         // |a_ccel|, m/s^2
  std::vector<SE3Pose> obstacle_poses;
  double goal_distance = 0.0;            // d, meters
};

struct ImpactReport {
  std::vector<double> per_obstacle_trans;  // meters
  std::vector<double> per_obstacle_rot;    // radians
  double m_trans = 0.0;                    // episode total translation
  double m_rot = 0.0;                      // episode total rotation
  std::vector<double> trans_steps;         // m_trans_step series
  std::vector<double> rot_steps;           // m_rot_step series
  bool fetched = false;
  bool success = false;
};

/// Geodesic angle between two orientations:
/// arccos(clamp((trace(Ra^T Rb) - 1)/2, -1, 1)), in [0, pi].
double rotation_geodesic(const SE3Pose& a, const SE3Pose& b);

/// Summed obstacle displacement between consecutive steps:
/// (sum_i |t_i(cur) - t_i(prev)|, sum_i geodesic_i). Throws on obstacle
/// count mismatch.
std::pair<double, double> step_displacement(const TrajectoryStep& prev, const TrajectoryStep& cur);

/// Accumulates displacement over an episode. Success requires fetched and
/// m_trans below trans_threshold (default 3 cm); rotation gates only when a
/// finite rot_threshold is passed.
ImpactReport episode_impact(std::span<const TrajectoryStep> traj, bool fetched,
                            double trans_threshold = 0.03,
                            double rot_threshold = std::numeric_limits<double>::infinity());

}  // namespace voxfetch
