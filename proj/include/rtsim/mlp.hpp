#pragma once

#include <Eigen/Dense>
#include <vector>

#include "rtsim/rng.hpp"

namespace rtsim {

/// Dense feed-forward network: tanh on hidden layers, identity output.
/// Parameters are plain Eigen matrices; there is no hidden global state, so
/// read-only snapshots can be shared across rollout workers between updates.
class Mlp {
 public:
  struct ForwardContext {
    Eigen::VectorXd input;
    std::vector<Eigen::VectorXd> hidden;  // post-tanh activations, one per hidden layer
    bool valid = false;
  };

  struct Gradients {
    std::vector<Eigen::MatrixXd> weights;
    std::vector<Eigen::VectorXd> biases;

    void set_zero();
    void scale(double s);
  };

  Mlp() = default;

  /// dims = {input, hidden..., output}. Hidden layers get orthogonal init
  /// with tanh gain; the output layer is scaled by output_gain to keep the
  /// initial map near zero when desired.
  Mlp(std::vector<int> dims, Rng& rng, double output_gain = 1.0);

  Eigen::VectorXd forward(const Eigen::VectorXd& input) const;
  Eigen::VectorXd forward(const Eigen::VectorXd& input, ForwardContext& ctx) const;

  /// Exact reverse-mode parameter gradients for the recorded forward pass.
  /// upstream is dLoss/dOutput.
  Gradients backward(const ForwardContext& ctx, const Eigen::VectorXd& upstream) const;

  /// Same, accumulating into acc (acc += gradients).
  void backward_into(const ForwardContext& ctx, const Eigen::VectorXd& upstream,
                     Gradients& acc) const;

  Gradients zero_gradients() const;

  Eigen::VectorXd parameters() const;
  void set_parameters(const Eigen::VectorXd& flat);
  Eigen::Index parameter_count() const;
  static Eigen::VectorXd flatten(const Gradients& grads);

  const std::vector<int>& dims() const { return dims_; }
  int input_dim() const { return dims_.front(); }
  int output_dim() const { return dims_.back(); }
  std::size_t layer_count() const { return weights_.size(); }
  const std::vector<Eigen::MatrixXd>& weights() const { return weights_; }
  const std::vector<Eigen::VectorXd>& biases() const { return biases_; }
  std::vector<Eigen::MatrixXd>& mutable_weights() { return weights_; }
  std::vector<Eigen::VectorXd>& mutable_biases() { return biases_; }

 private:
  std::vector<int> dims_;
  std::vector<Eigen::MatrixXd> weights_;  // weights_[l] maps dims_[l] -> dims_[l+1]
  std::vector<Eigen::VectorXd> biases_;
};

}  // namespace rtsim
