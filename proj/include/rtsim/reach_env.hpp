#pragma once

#include <array>
#include <optional>

#include "rtsim/arm_model.hpp"
#include "rtsim/timestep.hpp"

namespace rtsim {

struct Observation {
  CartesianPoint effector;
  JointVector theta{};
  JointVector sin_theta{};
  JointVector cos_theta{};
  JointVector velocity{};
  CartesianPoint goal;
  bool done = false;

  static constexpr int kDim = 19;
  std::array<double, kDim> flatten() const;
};

struct Action {
  JointVector v_desired{};  // rad/s
};

struct EnvConfig {
  double r1_gain = 2e-5;    // per meter of reaching error
  double r2_gain = 1e-6;    // per (rad/s)^2 of commanded velocity
  double epsilon = 0.05;    // m, success threshold
  int max_steps = 200;
  CartesianPoint goal{0.4, 0.2, 0.5};
  double v_max = 0.5;       // rad/s
  double obs_noise_fraction = 0.0;
  JointVector initial_theta{};  // home pose; zero by default

  void validate() const;
};

/// Terminal rule: past the episode-length cap, or inside the goal tolerance.
bool is_done(double distance, int step, const EnvConfig& cfg);

/// Constant-rate reference controller used for repeated-trial data
/// collection: 3e-3 degrees of position increment per 1 ms on every joint,
/// i.e. 3 deg/s, expressed as a velocity command. Independent of the step
/// index by construction.
Action heuristic_p2p_policy(int step_index);

struct StepResult {
  Observation obs;
  double reward = 0.0;
  bool done = false;
};

/// Point-to-point reaching task on the kinematic arm. Joint angles advance
/// by explicit Euler under the configured timestep source; the recorded
/// joint velocity is the applied (clamped) command.
///
/// One instance per rollout worker; instances share no mutable state.
class ReachEnv {
 public:
  ReachEnv(ArmModel arm, TimestepModel timestep, EnvConfig cfg, std::uint64_t seed);

  Observation reset();
  StepResult step(const Action& action);

  /// Swap the kinematic model (per-episode domain randomization). Takes
  /// effect from the next step; call before reset for a clean episode.
  void set_arm_model(const ArmModel& arm);

  /// Host load fraction fed to the timestep source, when known.
  void set_load(std::optional<double> load) { load_ = load; }

  void reseed(std::uint64_t seed) { rng_ = make_rng(seed); }

  const ArmModel& arm() const { return arm_; }
  const EnvConfig& config() const { return cfg_; }
  const TimestepModel& timestep() const { return stepper_.model(); }
  const JointVector& theta() const { return theta_; }
  int step_count() const { return step_count_; }
  double last_dt() const { return last_dt_; }
  bool done() const { return done_; }
  double distance_to_goal() const;

 private:
  Observation make_observation();

  ArmModel arm_;
  TimestepSampler stepper_;
  EnvConfig cfg_;
  Rng rng_;
  JointVector theta_{};
  JointVector velocity_{};
  int step_count_ = 0;
  double last_dt_ = 0.0;
  bool done_ = false;
  std::optional<double> load_;
};

}  // namespace rtsim
