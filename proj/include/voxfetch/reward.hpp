#pragma once

#include <span>
#include <vector>

#include "voxfetch/se3.hpp"

namespace voxfetch {

/// Reward coefficients and curriculum schedules. Defaults carry the
/// published values; everything is overridable through the text config.
struct RewardConfig {
  double lambda_task = 5.0;
  double lambda_action_range = 1.5;
  double lambda_action_rate = 0.0001;
  double lambda_pose = 0.6;
  double lambda_penetration = 9.0;
  double lambda_target_move = 0.06;
  double lambda_trans_step = 10.0;
  double lambda_rot_step = 10.0;

  // Success thresholds per curriculum stage, strictly decreasing.
  std::vector<double> sigma_trans{0.03, 0.015, 0.01, 0.005, 0.0};  // meters
  std::vector<double> sigma_rot{0.4, 0.2, 0.16, 0.1, 0.0};         // radians
  int stage = 0;

  // Acceleration pre-scale applied before squaring inside the penetration
  // penalty; raw m/s^2 squared would overflow the exponential.
  double accel_gain = 1.0 / 9.81;

  // The exponential penalties evaluate to -lambda at zero input. When set,
  // each penalty is shifted by its zero-input baseline so that no-op steps
  // score 0.
  bool baseline_shift = false;

  // Plateau detection for curriculum_stage.
  int window = 50;
  double plateau_improvement = 0.01;
  double competence_floor = 0.5;

  void validate() const;
  int final_stage() const { return int(sigma_trans.size()) - 1; }
};

// Penalty terms are <= 0 (before any baseline shift they reach their maximum
// -lambda at zero input); reward_task and reward_target_move can be positive.

/// Per-component gate: components with |a_i| > 3 contribute
/// -lambda * exp((|a_i| - 3)^2); others contribute 0.
double reward_action_range(std::span<const double, 6> a, const RewardConfig& cfg);

/// -lambda * exp(|a_last - a_current|^2)  (squared L2 norm).
double reward_action_rate(std::span<const double, 6> a_last, std::span<const double, 6> a_current,
                          const RewardConfig& cfg);

/// -lambda * exp(|trans(p_curr) - trans(p_init)|^2).
double reward_pose(const SE3Pose& p_curr, const SE3Pose& p_init, const RewardConfig& cfg);

/// -lambda * exp((gain * a_ccel)^2); a_ccel is a magnitude, negative input is
/// rejected.
double reward_penetration(double accel_mag, const RewardConfig& cfg);

/// lambda * (d_last - d_curr) / (v * dt); 0 when the target is stationary
/// (v * dt == 0).
double reward_target_move(double d_last, double d_curr, double v, double dt, const RewardConfig& cfg);

/// -lambda_trans * exp(m_trans_step^2) - lambda_rot * exp(m_rot_step^2).
double reward_env(double m_trans_step, double m_rot_step, const RewardConfig& cfg);

/// lambda_task when fetched and both episode totals pass the stage
/// thresholds; else 0. A zero threshold demands exactly zero disturbance.
double reward_task(bool fetched, double m_trans, double m_rot, const RewardConfig& cfg);

/// Threshold test at an arbitrary stage (sigma > 0: m < sigma; sigma == 0:
/// m == 0 exactly).
bool success_at_stage(double m_trans, double m_rot, int stage, const RewardConfig& cfg);

/// Everything one evaluation step needs to score.
struct StepContext {
  std::array<double, 6> action{};
  std::array<double, 6> last_action{};
  SE3Pose target_pose;
  SE3Pose target_init_pose;
  double accel_mag = 0.0;
  double d_last = 0.0, d_curr = 0.0;
  double v = 0.0, dt = 0.1;
  double m_trans_step = 0.0, m_rot_step = 0.0;
  bool fetched = false;
  double m_trans_episode = 0.0, m_rot_episode = 0.0;
};

struct RewardBreakdown {
  double task = 0, action_range = 0, action_rate = 0, pose = 0, penetration = 0, target_move = 0, env = 0;
  double total = 0;
};

/// Sum of all terms; each term also reported individually.
RewardBreakdown total_reward(const StepContext& ctx, const RewardConfig& cfg);

/// Plateau-driven stage schedule: starting from cfg.stage, walk the
/// per-episode success history; advance one stage whenever the windowed rate
/// has stopped improving (second half-window minus first below
/// plateau_improvement) while clearing the competence floor. Never regresses;
/// clamps at the final stage.
int curriculum_stage(std::span<const double> success_history, const RewardConfig& cfg);

}  // namespace voxfetch
