#pragma once

#include <Eigen/Dense>

#include "rtsim/arm_model.hpp"
#include "rtsim/mlp.hpp"

namespace rtsim {

struct ActionSample {
  JointVector action{};        // clamped to the action bound, fed to the env
  Eigen::Vector3d raw;         // pre-clamp Gaussian sample, used for log-probs
  double log_prob = 0.0;
};

/// Diagonal-Gaussian policy: an MLP mean head plus a state-independent
/// log-std vector, clamped to [-20, 2].
class GaussianPolicy {
 public:
  static constexpr double kLogStdMin = -20.0;
  static constexpr double kLogStdMax = 2.0;
  static constexpr int kActionDim = 3;
  static constexpr int kHidden1 = 128;
  static constexpr int kHidden2 = 64;

  GaussianPolicy() = default;
  GaussianPolicy(int obs_dim, double action_bound, Rng& rng);
  GaussianPolicy(Mlp mean_net, Eigen::Vector3d log_std, double action_bound);

  ActionSample sample(const Eigen::VectorXd& obs, Rng& rng) const;

  /// Deterministic policy: the clamped mean. Used for evaluation.
  JointVector mean_action(const Eigen::VectorXd& obs) const;

  double log_prob(const Eigen::Vector3d& mean, const Eigen::Vector3d& raw_action) const;
  double entropy() const;

  Mlp& mean_net() { return mean_net_; }
  const Mlp& mean_net() const { return mean_net_; }
  Eigen::Vector3d& log_std() { return log_std_; }
  const Eigen::Vector3d& log_std() const { return log_std_; }
  double action_bound() const { return action_bound_; }

  void clamp_log_std();

 private:
  Mlp mean_net_;
  Eigen::Vector3d log_std_{Eigen::Vector3d::Constant(-1.0)};
  double action_bound_ = 0.5;
};

}  // namespace rtsim
