#include "rtsim/mlp.hpp"

#include <cmath>
#include <stdexcept>

namespace rtsim {

namespace {

// Orthogonal init: QR of a Gaussian matrix, columns sign-fixed by the R
// diagonal so the factorization is unique.
Eigen::MatrixXd orthogonal_matrix(int rows, int cols, double gain, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const bool wide = cols > rows;
  const int r = wide ? cols : rows;
  const int c = wide ? rows : cols;
  Eigen::MatrixXd a(r, c);
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) a(i, j) = normal(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(r, c);
  const Eigen::MatrixXd rmat = qr.matrixQR().topRows(c).triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < c; ++j)
    if (rmat(j, j) < 0.0) q.col(j) = -q.col(j);
  if (wide) return gain * q.transpose();
  return gain * q;
}

}  // namespace

void Mlp::Gradients::set_zero() {
  for (auto& w : weights) w.setZero();
  for (auto& b : biases) b.setZero();
}

void Mlp::Gradients::scale(double s) {
  for (auto& w : weights) w *= s;
  for (auto& b : biases) b *= s;
}

Mlp::Mlp(std::vector<int> dims, Rng& rng, double output_gain) : dims_(std::move(dims)) {
  if (dims_.size() < 2) throw std::invalid_argument("mlp: need at least input and output dims");
  for (int d : dims_)
    if (d < 1) throw std::invalid_argument("mlp: layer dims must be >= 1");
  const std::size_t n_layers = dims_.size() - 1;
  weights_.reserve(n_layers);
  biases_.reserve(n_layers);
  const double tanh_gain = std::sqrt(2.0);
  for (std::size_t l = 0; l < n_layers; ++l) {
    const bool last = l + 1 == n_layers;
    const double gain = last ? output_gain : tanh_gain;
    weights_.push_back(orthogonal_matrix(dims_[l + 1], dims_[l], gain, rng));
    biases_.push_back(Eigen::VectorXd::Zero(dims_[l + 1]));
  }
}

Eigen::VectorXd Mlp::forward(const Eigen::VectorXd& input) const {
  ForwardContext ctx;
  return forward(input, ctx);
}

Eigen::VectorXd Mlp::forward(const Eigen::VectorXd& input, ForwardContext& ctx) const {
  if (input.size() != dims_.front())
    throw std::invalid_argument("mlp forward: input dimension mismatch");
  ctx.input = input;
  ctx.hidden.clear();
  ctx.hidden.reserve(weights_.size() - 1);
  Eigen::VectorXd h = input;
  for (std::size_t l = 0; l + 1 < weights_.size(); ++l) {
    h = (weights_[l] * h + biases_[l]).array().tanh().matrix();
    ctx.hidden.push_back(h);
  }
  ctx.valid = true;
  return weights_.back() * h + biases_.back();
}

Mlp::Gradients Mlp::zero_gradients() const {
  Gradients g;
  g.weights.reserve(weights_.size());
  g.biases.reserve(biases_.size());
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    g.weights.push_back(Eigen::MatrixXd::Zero(weights_[l].rows(), weights_[l].cols()));
    g.biases.push_back(Eigen::VectorXd::Zero(biases_[l].size()));
  }
  return g;
}

Mlp::Gradients Mlp::backward(const ForwardContext& ctx, const Eigen::VectorXd& upstream) const {
  Gradients acc = zero_gradients();
  backward_into(ctx, upstream, acc);
  return acc;
}

void Mlp::backward_into(const ForwardContext& ctx, const Eigen::VectorXd& upstream,
                        Gradients& acc) const {
  if (!ctx.valid) throw std::runtime_error("mlp backward: no matching forward context");
  if (upstream.size() != dims_.back())
    throw std::invalid_argument("mlp backward: upstream dimension mismatch");
  if (ctx.hidden.size() != weights_.size() - 1)
    throw std::runtime_error("mlp backward: context does not match this topology");

  // Output layer is affine.
  Eigen::VectorXd delta = upstream;
  const std::size_t last = weights_.size() - 1;
  const Eigen::VectorXd& last_in = last == 0 ? ctx.input : ctx.hidden[last - 1];
  acc.weights[last].noalias() += delta * last_in.transpose();
  acc.biases[last] += delta;

  for (std::size_t l = last; l-- > 0;) {
    // d tanh(z) = 1 - tanh(z)^2, and ctx.hidden[l] holds tanh(z).
    Eigen::VectorXd back = weights_[l + 1].transpose() * delta;
    delta = back.cwiseProduct(
        (1.0 - ctx.hidden[l].array().square()).matrix());
    const Eigen::VectorXd& in = l == 0 ? ctx.input : ctx.hidden[l - 1];
    acc.weights[l].noalias() += delta * in.transpose();
    acc.biases[l] += delta;
  }
}

Eigen::Index Mlp::parameter_count() const {
  Eigen::Index n = 0;
  for (std::size_t l = 0; l < weights_.size(); ++l)
    n += weights_[l].size() + biases_[l].size();
  return n;
}

Eigen::VectorXd Mlp::parameters() const {
  Eigen::VectorXd flat(parameter_count());
  Eigen::Index pos = 0;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    flat.segment(pos, weights_[l].size()) =
        Eigen::Map<const Eigen::VectorXd>(weights_[l].data(), weights_[l].size());
    pos += weights_[l].size();
    flat.segment(pos, biases_[l].size()) = biases_[l];
    pos += biases_[l].size();
  }
  return flat;
}

void Mlp::set_parameters(const Eigen::VectorXd& flat) {
  if (flat.size() != parameter_count())
    throw std::invalid_argument("mlp set_parameters: size mismatch");
  Eigen::Index pos = 0;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    Eigen::Map<Eigen::VectorXd>(weights_[l].data(), weights_[l].size()) =
        flat.segment(pos, weights_[l].size());
    pos += weights_[l].size();
    biases_[l] = flat.segment(pos, biases_[l].size());
    pos += biases_[l].size();
  }
}

Eigen::VectorXd Mlp::flatten(const Gradients& grads) {
  Eigen::Index n = 0;
  for (std::size_t l = 0; l < grads.weights.size(); ++l)
    n += grads.weights[l].size() + grads.biases[l].size();
  Eigen::VectorXd flat(n);
  Eigen::Index pos = 0;
  for (std::size_t l = 0; l < grads.weights.size(); ++l) {
    flat.segment(pos, grads.weights[l].size()) =
        Eigen::Map<const Eigen::VectorXd>(grads.weights[l].data(), grads.weights[l].size());
    pos += grads.weights[l].size();
    flat.segment(pos, grads.biases[l].size()) = grads.biases[l];
    pos += grads.biases[l].size();
  }
  return flat;
}

}  // namespace rtsim
