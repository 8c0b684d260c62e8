#pragma once

#include <Eigen/Dense>

namespace rtsim {

struct AdamConfig {
  double lr = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Adam over a flat parameter vector. Deterministic given its state; rejects
/// non-finite gradients without touching the parameters.
class Adam {
 public:
  Adam() = default;
  explicit Adam(Eigen::Index size, AdamConfig cfg = {});

  void step(Eigen::VectorXd& params, const Eigen::VectorXd& grads);
  void reset();

  const AdamConfig& config() const { return cfg_; }
  long step_count() const { return t_; }

 private:
  AdamConfig cfg_{};
  Eigen::VectorXd m_;
  Eigen::VectorXd v_;
  long t_ = 0;
};

}  // namespace rtsim
