#include "voxfetch/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace voxfetch {

double rotation_geodesic(const SE3Pose& a, const SE3Pose& b) {
  const double tr = (a.rotation.transpose() * b.rotation).trace();
  const double c = std::clamp((tr - 1.0) / 2.0, -1.0, 1.0);
  return std::acos(c);
}

std::pair<double, double> step_displacement(const TrajectoryStep& prev, const TrajectoryStep& cur) {
  if (prev.obstacle_poses.size() != cur.obstacle_poses.size())
    throw std::invalid_argument("step_displacement: obstacle count mismatch between steps");
  double trans = 0.0, rot = 0.0;
  for (std::size_t i = 0; i < cur.obstacle_poses.size(); ++i) {
    trans += (cur.obstacle_poses[i].translation - prev.obstacle_poses[i].translation).norm();
    rot += rotation_geodesic(prev.obstacle_poses[i], cur.obstacle_poses[i]);
  }
  return {trans, rot};
}

ImpactReport episode_impact(std::span<const TrajectoryStep> traj, bool fetched, double trans_threshold,
                            double rot_threshold) {
  if (traj.empty()) throw std::invalid_argument("episode_impact: empty trajectory");
  const std::size_t n_obs = traj.front().obstacle_poses.size();
  ImpactReport rep;
  rep.per_obstacle_trans.assign(n_obs, 0.0);
  rep.per_obstacle_rot.assign(n_obs, 0.0);
  for (std::size_t s = 1; s < traj.size(); ++s) {
    const auto& prev = traj[s - 1];
    const auto& cur = traj[s];
    if (cur.obstacle_poses.size() != n_obs)
      throw std::invalid_argument("episode_impact: obstacle count changed mid-trajectory");
    double ts = 0.0, rs = 0.0;
    for (std::size_t i = 0; i < n_obs; ++i) {
      const double dtv = (cur.obstacle_poses[i].translation - prev.obstacle_poses[i].translation).norm();
      const double drv = rotation_geodesic(prev.obstacle_poses[i], cur.obstacle_poses[i]);
      rep.per_obstacle_trans[i] += dtv;
      rep.per_obstacle_rot[i] += drv;
      ts += dtv;
      rs += drv;
    }
    rep.trans_steps.push_back(ts);
    rep.rot_steps.push_back(rs);
    rep.m_trans += ts;
    rep.m_rot += rs;
  }
  rep.fetched = fetched;
  rep.success = fetched && rep.m_trans < trans_threshold && rep.m_rot < rot_threshold;
  return rep;
}

}  // namespace voxfetch
