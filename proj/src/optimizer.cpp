#include "rtsim/optimizer.hpp"

#include <cmath>
#include <stdexcept>

namespace rtsim {

Adam::Adam(Eigen::Index size, AdamConfig cfg) : cfg_(cfg) {
  if (!(cfg_.lr > 0.0)) throw std::invalid_argument("adam: lr must be > 0");
  m_ = Eigen::VectorXd::Zero(size);
  v_ = Eigen::VectorXd::Zero(size);
}

void Adam::reset() {
  m_.setZero();
  v_.setZero();
  t_ = 0;
}

void Adam::step(Eigen::VectorXd& params, const Eigen::VectorXd& grads) {
  if (params.size() != m_.size() || grads.size() != m_.size())
    throw std::invalid_argument("adam: size mismatch");
  if (!grads.allFinite()) throw std::runtime_error("adam: non-finite gradient, update rejected");

  ++t_;
  m_ = cfg_.beta1 * m_ + (1.0 - cfg_.beta1) * grads;
  v_ = cfg_.beta2 * v_ + (1.0 - cfg_.beta2) * grads.cwiseProduct(grads);
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  const double alpha = cfg_.lr * std::sqrt(bc2) / bc1;
  params.array() -= alpha * m_.array() / (v_.array().sqrt() + cfg_.eps);
}

}  // namespace rtsim
