#include "rtsim/reach_env.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rtsim {

std::array<double, Observation::kDim> Observation::flatten() const {
  return {effector.x,   effector.y,   effector.z,                      //
          theta[0],     theta[1],     theta[2],                        //
          sin_theta[0], sin_theta[1], sin_theta[2],                    //
          cos_theta[0], cos_theta[1], cos_theta[2],                    //
          velocity[0],  velocity[1],  velocity[2],                     //
          goal.x,       goal.y,       goal.z,     done ? 1.0 : 0.0};
}

void EnvConfig::validate() const {
  if (!(r1_gain > 0.0) || !(r2_gain > 0.0))
    throw std::invalid_argument("env config: reward gains must be > 0");
  if (!(epsilon > 0.0)) throw std::invalid_argument("env config: epsilon must be > 0");
  if (max_steps < 1) throw std::invalid_argument("env config: max_steps must be >= 1");
  if (!(v_max > 0.0)) throw std::invalid_argument("env config: v_max must be > 0");
  if (obs_noise_fraction < 0.0)
    throw std::invalid_argument("env config: obs_noise_fraction must be >= 0");
}

bool is_done(double distance, int step, const EnvConfig& cfg) {
  return step > cfg.max_steps || distance < cfg.epsilon;
}

Action heuristic_p2p_policy(int /*step_index*/) {
  constexpr double kRate = 3.0 * 3.14159265358979323846 / 180.0;  // 3 deg/s
  return Action{{kRate, kRate, kRate}};
}

ReachEnv::ReachEnv(ArmModel arm, TimestepModel timestep, EnvConfig cfg, std::uint64_t seed)
    : arm_(std::move(arm)), stepper_(timestep), cfg_(cfg), rng_(make_rng(seed)) {
  arm_.validate();
  cfg_.validate();
  reset();
}

void ReachEnv::set_arm_model(const ArmModel& arm) {
  arm.validate();
  arm_ = arm;
}

double ReachEnv::distance_to_goal() const {
  return distance(forward_kinematics(arm_, theta_), cfg_.goal);
}

Observation ReachEnv::make_observation() {
  Observation obs;
  obs.theta = theta_;
  for (int i = 0; i < 3; ++i) {
    obs.sin_theta[i] = std::sin(theta_[i]);
    obs.cos_theta[i] = std::cos(theta_[i]);
  }
  obs.velocity = velocity_;
  if (cfg_.obs_noise_fraction > 0.0) {
    // Zero-mean uniform noise scaled by the instantaneous velocity
    // magnitude, velocity channels only. Internal state stays noiseless.
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (int i = 0; i < 3; ++i)
      obs.velocity[i] += cfg_.obs_noise_fraction * std::abs(velocity_[i]) * unit(rng_);
  }
  obs.effector = forward_kinematics(arm_, theta_);
  obs.goal = cfg_.goal;
  obs.done = done_;
  return obs;
}

Observation ReachEnv::reset() {
  theta_ = cfg_.initial_theta;
  for (int i = 0; i < 3; ++i)
    theta_[i] = std::clamp(theta_[i], arm_.joint_lower[i], arm_.joint_upper[i]);
  velocity_ = {0.0, 0.0, 0.0};
  step_count_ = 0;
  last_dt_ = 0.0;
  done_ = false;
  if (stepper_.model().variant == TimestepVariant::kWallClock) stepper_.reset_clock();
  return make_observation();
}

StepResult ReachEnv::step(const Action& action) {
  if (done_) throw std::runtime_error("step: episode already terminated; call reset()");

  const double dt = stepper_.next_dt(rng_, load_);
  last_dt_ = dt;
  ++step_count_;

  JointVector cmd;
  for (int i = 0; i < 3; ++i) {
    cmd[i] = std::clamp(action.v_desired[i], -cfg_.v_max, cfg_.v_max);
    theta_[i] = std::clamp(theta_[i] + cmd[i] * dt, arm_.joint_lower[i], arm_.joint_upper[i]);
  }
  velocity_ = cmd;

  const double dist = distance(forward_kinematics(arm_, theta_), cfg_.goal);
  const double action_sq = cmd[0] * cmd[0] + cmd[1] * cmd[1] + cmd[2] * cmd[2];
  const double reward = -cfg_.r1_gain * dist - cfg_.r2_gain * action_sq;

  done_ = is_done(dist, step_count_, cfg_);

  StepResult out;
  out.obs = make_observation();
  out.reward = reward;
  out.done = done_;
  return out;
}

}  // namespace rtsim
