#include "rtsim/policy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rtsim {

namespace {
constexpr double kLog2Pi = 1.8378770664093453;
}

GaussianPolicy::GaussianPolicy(int obs_dim, double action_bound, Rng& rng)
    : mean_net_({obs_dim, kHidden1, kHidden2, kActionDim}, rng, 0.01),
      action_bound_(action_bound) {
  if (!(action_bound > 0.0)) throw std::invalid_argument("policy: action bound must be > 0");
}

GaussianPolicy::GaussianPolicy(Mlp mean_net, Eigen::Vector3d log_std, double action_bound)
    : mean_net_(std::move(mean_net)), log_std_(std::move(log_std)), action_bound_(action_bound) {
  if (mean_net_.output_dim() != kActionDim)
    throw std::invalid_argument("policy: mean net must have 3 outputs");
  clamp_log_std();
}

void GaussianPolicy::clamp_log_std() {
  for (int i = 0; i < kActionDim; ++i)
    log_std_[i] = std::clamp(log_std_[i], kLogStdMin, kLogStdMax);
}

double GaussianPolicy::log_prob(const Eigen::Vector3d& mean,
                                const Eigen::Vector3d& raw_action) const {
  double lp = 0.0;
  for (int i = 0; i < kActionDim; ++i) {
    const double std = std::exp(log_std_[i]);
    const double z = (raw_action[i] - mean[i]) / std;
    lp += -0.5 * kLog2Pi - log_std_[i] - 0.5 * z * z;
  }
  return lp;
}

double GaussianPolicy::entropy() const {
  double h = 0.0;
  for (int i = 0; i < kActionDim; ++i) h += 0.5 * (kLog2Pi + 1.0) + log_std_[i];
  return h;
}

ActionSample GaussianPolicy::sample(const Eigen::VectorXd& obs, Rng& rng) const {
  const Eigen::VectorXd mean = mean_net_.forward(obs);
  std::normal_distribution<double> normal(0.0, 1.0);
  ActionSample out;
  for (int i = 0; i < kActionDim; ++i) {
    const double std = std::exp(log_std_[i]);
    out.raw[i] = mean[i] + std * normal(rng);
    out.action[i] = std::clamp(out.raw[i], -action_bound_, action_bound_);
  }
  out.log_prob = log_prob(mean.head<3>(), out.raw);
  return out;
}

JointVector GaussianPolicy::mean_action(const Eigen::VectorXd& obs) const {
  const Eigen::VectorXd mean = mean_net_.forward(obs);
  JointVector a;
  for (int i = 0; i < kActionDim; ++i)
    a[i] = std::clamp(mean[i], -action_bound_, action_bound_);
  return a;
}

}  // namespace rtsim
