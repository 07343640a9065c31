#include "voxfetch/reward.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace voxfetch {

void RewardConfig::validate() const {
  if (sigma_trans.empty() || sigma_rot.empty())
    throw std::invalid_argument("RewardConfig: curriculum schedules must be non-empty");
  if (sigma_trans.size() != sigma_rot.size())
    throw std::invalid_argument("RewardConfig: sigma_trans and sigma_rot must have equal length");
  for (std::size_t i = 1; i < sigma_trans.size(); ++i) {
    if (!(sigma_trans[i] < sigma_trans[i - 1]) || !(sigma_rot[i] < sigma_rot[i - 1]))
      throw std::invalid_argument("RewardConfig: curriculum schedules must be strictly decreasing");
  }
  if (stage < 0 || stage >= int(sigma_trans.size()))
    throw std::invalid_argument("RewardConfig: stage index outside schedule bounds");
  if (window < 2) throw std::invalid_argument("RewardConfig: window must be >= 2");
  if (!(accel_gain > 0)) throw std::invalid_argument("RewardConfig: accel_gain must be positive");
}

namespace {

// Penalty core: -lambda * exp(x), optionally re-based so the zero-input
// penalty (x = 0) maps to 0.
inline double penalty(double lambda, double x, bool baseline_shift) {
  return -lambda * (baseline_shift ? std::expm1(x) : std::exp(x));
}

}  // namespace

double reward_action_range(std::span<const double, 6> a, const RewardConfig& cfg) {
  double sum = 0.0;
  for (double ai : a) {
    const double mag = std::abs(ai);
    if (mag > 3.0) sum += -cfg.lambda_action_range * std::exp((mag - 3.0) * (mag - 3.0));
  }
  return sum;
}

double reward_action_rate(std::span<const double, 6> a_last, std::span<const double, 6> a_current,
                          const RewardConfig& cfg) {
  double sq = 0.0;
  for (int i = 0; i < 6; ++i) {
    const double d = a_last[i] - a_current[i];
    sq += d * d;
  }
  return penalty(cfg.lambda_action_rate, sq, cfg.baseline_shift);
}

double reward_pose(const SE3Pose& p_curr, const SE3Pose& p_init, const RewardConfig& cfg) {
  const double sq = (p_curr.translation - p_init.translation).squaredNorm();
  return penalty(cfg.lambda_pose, sq, cfg.baseline_shift);
}

double reward_penetration(double accel_mag, const RewardConfig& cfg) {
  if (accel_mag < 0) throw std::invalid_argument("reward_penetration: acceleration magnitude must be >= 0");
  const double scaled = accel_mag * cfg.accel_gain;
  return penalty(cfg.lambda_penetration, scaled * scaled, cfg.baseline_shift);
}

double reward_target_move(double d_last, double d_curr, double v, double dt, const RewardConfig& cfg) {
  if (v < 0) throw std::invalid_argument("reward_target_move: speed must be >= 0");
  if (!(dt > 0)) throw std::invalid_argument("reward_target_move: dt must be positive");
  const double denom = v * dt;
  if (denom == 0.0) return 0.0;  // stationary target earns nothing
  return cfg.lambda_target_move * (d_last - d_curr) / denom;
}

double reward_env(double m_trans_step, double m_rot_step, const RewardConfig& cfg) {
  return penalty(cfg.lambda_trans_step, m_trans_step * m_trans_step, cfg.baseline_shift) +
         penalty(cfg.lambda_rot_step, m_rot_step * m_rot_step, cfg.baseline_shift);
}

bool success_at_stage(double m_trans, double m_rot, int stage, const RewardConfig& cfg) {
  if (stage < 0 || stage >= int(cfg.sigma_trans.size()))
    throw std::invalid_argument("success_at_stage: stage outside schedule bounds");
  const double st = cfg.sigma_trans[stage];
  const double sr = cfg.sigma_rot[stage];
  const bool ok_t = st > 0.0 ? m_trans < st : m_trans == 0.0;
  const bool ok_r = sr > 0.0 ? m_rot < sr : m_rot == 0.0;
  return ok_t && ok_r;
}

double reward_task(bool fetched, double m_trans, double m_rot, const RewardConfig& cfg) {
  if (!fetched) return 0.0;
  return success_at_stage(m_trans, m_rot, cfg.stage, cfg) ? cfg.lambda_task : 0.0;
}

RewardBreakdown total_reward(const StepContext& ctx, const RewardConfig& cfg) {
  RewardBreakdown b;
  b.task = reward_task(ctx.fetched, ctx.m_trans_episode, ctx.m_rot_episode, cfg);
  b.action_range = reward_action_range(ctx.action, cfg);
  b.action_rate = reward_action_rate(ctx.last_action, ctx.action, cfg);
  b.pose = reward_pose(ctx.target_pose, ctx.target_init_pose, cfg);
  b.penetration = reward_penetration(ctx.accel_mag, cfg);
  b.target_move = reward_target_move(ctx.d_last, ctx.d_curr, ctx.v, ctx.dt, cfg);
  b.env = reward_env(ctx.m_trans_step, ctx.m_rot_step, cfg);
  b.total = b.task + b.action_range + b.action_rate + b.pose + b.penetration + b.target_move + b.env;
  return b;
}

int curriculum_stage(std::span<const double> success_history, const RewardConfig& cfg) {
  cfg.validate();
  int stage = cfg.stage;
  const int last = cfg.final_stage();
  const int w = cfg.window;
  const int half = w / 2;
  int stage_start = 0;  // index into the history where the current stage began
  for (int i = 0; i < int(success_history.size()); ++i) {
    const int in_stage = i - stage_start + 1;
    if (stage >= last || in_stage < w) continue;
    // Rate over the trailing window, split into halves for the trend.
    const auto mean = [&](int from, int count) {
      double s = 0.0;
      for (int k = from; k < from + count; ++k) s += success_history[k];
      return s / count;
    };
    const double recent = mean(i - w + 1, w);
    const double first_half = mean(i - w + 1, half);
    const double second_half = mean(i - half + 1, half);
    if (second_half - first_half < cfg.plateau_improvement && recent >= cfg.competence_floor) {
      ++stage;
      stage_start = i + 1;
    }
  }
  return stage;
}

}  // namespace voxfetch
