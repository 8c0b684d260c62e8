#pragma once

#include <functional>
#include <string>
#include <vector>

#include "rtsim/optimizer.hpp"
#include "rtsim/policy.hpp"
#include "rtsim/reach_env.hpp"

namespace rtsim {

struct PPOConfig {
  double gamma = 0.99;
  double gae_lambda = 0.95;
  double clip_ratio = 0.2;
  int epochs = 1000;
  int episodes_per_epoch = 5;
  int steps_per_episode = 200;
  int update_iters = 10;
  int minibatch = 0;  // 0 = full epoch batch
  double lr = 3e-4;
  double value_coeff = 0.5;
  double entropy_coeff = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
};

enum class AgentTag { kNaP, kNaI, kKra, kKraIs, kKora };

std::string to_string(AgentTag tag);
AgentTag agent_tag_from_string(const std::string& s);

/// Training-time randomization recipe. The tag fully determines the
/// configuration; agent_variant() is the single source of truth.
struct AgentVariant {
  enum class ModelSource { kNominal, kMismatched, kResampledPerEpisode };

  AgentTag tag = AgentTag::kNaP;
  double kinematic_random_fraction = 0.0;
  double obs_noise_fraction = 0.0;
  TimestepModel timestep = fixed_timestep(0.025);
  ModelSource model_source = ModelSource::kNominal;
};

/// jitter_cv applies to the stochastic-timestep variant only.
AgentVariant agent_variant(AgentTag tag, double jitter_cv = 0.1, double nominal_dt = 0.025);

struct TrainingMetrics {
  double r_ini = 0.0;
  double r_ult = 0.0;
  double t_hlf = 0.0;   // percent of epochs
  double r_time = 0.0;  // wall time over baseline wall time
  std::vector<double> curve;
};

struct GaeResult {
  std::vector<double> advantages;
  std::vector<double> returns;
};

/// GAE(lambda). values carries one bootstrap entry beyond the rewards;
/// the bootstrap is treated as zero when the episode ended terminally.
GaeResult compute_gae(const std::vector<double>& rewards, const std::vector<double>& values,
                      bool terminal, double gamma, double lambda);

struct RolloutBatch {
  std::vector<Eigen::VectorXd> observations;
  std::vector<Eigen::Vector3d> actions;  // pre-clamp Gaussian samples
  std::vector<double> old_log_probs;
  std::vector<double> advantages;
  std::vector<double> returns;

  std::size_t size() const { return observations.size(); }
};

struct UpdateDiagnostics {
  double surrogate = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double mean_ratio = 1.0;
  double ratio_within_2clip = 1.0;  // fraction of samples, post-update
};

/// Clipped-surrogate update: update_iters passes of Adam over the batch,
/// advantages normalized to zero mean / unit variance first. A non-finite
/// loss aborts and restores the incoming parameters.
UpdateDiagnostics ppo_update(GaussianPolicy& policy, Mlp& value_net, Adam& policy_opt,
                             Adam& value_opt, const RolloutBatch& batch, const PPOConfig& cfg,
                             Rng& rng);

struct TrainResult {
  GaussianPolicy policy;
  Mlp value_net;
  std::vector<double> curve;  // mean episode return per epoch
  std::vector<double> epoch_wall_times;
  double wall_time_seconds = 0.0;
  double reward_scale = 0.0;  // internal critic conditioning factor
};

struct TrainHooks {
  /// Called after every epoch with the 1-based epoch index, that epoch's
  /// mean episode return, and the training state so far.
  std::function<void(int, double, const TrainResult&)> on_epoch;
};

/// Optional warm start (resume from a checkpoint).
struct TrainStart {
  GaussianPolicy policy;
  Mlp value_net;
  int completed_epochs = 0;
  std::vector<double> prior_curve;
  double reward_scale = 0.0;  // must match the run being resumed
};

TrainResult train(const AgentVariant& variant, const PPOConfig& cfg, const ArmModel& base_arm,
                  const EnvConfig& env_cfg, const TrainHooks& hooks = {},
                  const TrainStart* resume = nullptr);

/// Summary metrics over a learning curve. The halfway-crossing epoch is the
/// first (1-based) epoch whose value reaches the midpoint between the
/// initial-window and final-window means, reported as a percentage of the
/// whole run.
TrainingMetrics training_metrics(const std::vector<double>& curve, double wall_time_seconds,
                                 double baseline_time_seconds);

}  // namespace rtsim
