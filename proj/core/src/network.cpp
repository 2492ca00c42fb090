#include "molforge/network.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "molforge/error.hpp"

namespace molforge {

SparseVector SparseVector::from_dense(std::span<const double> dense) {
  SparseVector out;
  out.dim = static_cast<std::uint32_t>(dense.size());
  for (std::size_t i = 0; i < dense.size(); ++i) {
    if (dense[i] != 0.0) {
      out.index.push_back(static_cast<std::uint32_t>(i));
      out.value.push_back(dense[i]);
    }
  }
  return out;
}

SparseVector SparseVector::from_features(const StateFeatures& features) {
  SparseVector out;
  out.dim = static_cast<std::uint32_t>(features.size());
  out.index = features.bits().on_bits();
  out.value.assign(out.index.size(), 1.0);
  if (features.steps_remaining() != 0.0) {
    out.index.push_back(static_cast<std::uint32_t>(features.bits().length()));
    out.value.push_back(features.steps_remaining());
  }
  return out;
}

std::vector<double> SparseVector::to_dense() const {
  std::vector<double> out(dim, 0.0);
  for (std::size_t k = 0; k < index.size(); ++k) out[index[k]] = value[k];
  return out;
}

double huber(double x) {
  const double a = std::abs(x);
  return a <= 1.0 ? 0.5 * x * x : a - 0.5;
}

double huber_derivative(double x) {
  if (x > 1.0) return 1.0;
  if (x < -1.0) return -1.0;
  return x;
}

void LayerBlocks::set_zero() {
  for (auto& w : weights) w.setZero();
  for (auto& b : biases) b.setZero();
}

double LayerBlocks::squared_norm() const {
  double total = 0.0;
  for (const auto& w : weights) total += w.squaredNorm();
  for (const auto& b : biases) total += b.squaredNorm();
  return total;
}

void LayerBlocks::scale(double factor) {
  for (auto& w : weights) w *= factor;
  for (auto& b : biases) b *= factor;
}

std::size_t LayerBlocks::size() const {
  std::size_t n = 0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    n += static_cast<std::size_t>(weights[k].size() + biases[k].size());
  }
  return n;
}

std::vector<double> LayerBlocks::flatten() const {
  std::vector<double> out;
  out.reserve(size());
  for (std::size_t k = 0; k < weights.size(); ++k) {
    out.insert(out.end(), weights[k].data(), weights[k].data() + weights[k].size());
    out.insert(out.end(), biases[k].data(), biases[k].data() + biases[k].size());
  }
  return out;
}

void LayerBlocks::assign(std::span<const double> flat) {
  if (flat.size() != size()) {
    throw ArchitectureMismatch("expected " + std::to_string(size()) + " parameters, got " +
                               std::to_string(flat.size()));
  }
  std::size_t pos = 0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    std::copy_n(flat.data() + pos, weights[k].size(), weights[k].data());
    pos += static_cast<std::size_t>(weights[k].size());
    std::copy_n(flat.data() + pos, biases[k].size(), biases[k].data());
    pos += static_cast<std::size_t>(biases[k].size());
  }
}

ValueNetwork::ValueNetwork(std::vector<int> layer_dims, int heads) : dims_(std::move(layer_dims)), heads_(heads) {
  if (dims_.empty() || heads_ < 1) throw ConfigError("network needs an input width and at least one head");
  for (int d : dims_) {
    if (d < 1) throw ConfigError("layer widths must be positive");
  }
  for (std::size_t k = 0; k < dims_.size(); ++k) {
    const int out = k + 1 < dims_.size() ? dims_[k + 1] : heads_;
    params_.weights.push_back(Eigen::MatrixXd::Zero(out, dims_[k]));
    params_.biases.push_back(Eigen::VectorXd::Zero(out));
  }
}

ValueNetwork ValueNetwork::initialized(std::vector<int> layer_dims, int heads, std::mt19937_64& rng) {
  ValueNetwork net(std::move(layer_dims), heads);
  for (auto& w : net.params_.weights) {
    const double limit = std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = dist(rng);
  }
  return net;
}

bool ValueNetwork::same_architecture(const ValueNetwork& other) const noexcept {
  return dims_ == other.dims_ && heads_ == other.heads_;
}

void ValueNetwork::set_parameters(std::span<const double> flat) { params_.assign(flat); }

void ValueNetwork::copy_from(const ValueNetwork& other) {
  if (!same_architecture(other)) throw ArchitectureMismatch("networks have different layer shapes");
  params_ = other.params_;
}

void ValueNetwork::check_input(const SparseVector& x) const {
  if (static_cast<int>(x.dim) != input_dim()) {
    throw DimensionMismatch("input has width " + std::to_string(x.dim) + ", network expects " +
                            std::to_string(input_dim()));
  }
}

namespace {

std::vector<const SparseVector*> pointers(std::span<const SparseVector> xs) {
  std::vector<const SparseVector*> out;
  out.reserve(xs.size());
  for (const auto& x : xs) out.push_back(&x);
  return out;
}

}  // namespace

Eigen::MatrixXd ValueNetwork::first_layer(std::span<const SparseVector* const> xs) const {
  const auto& w = params_.weights.front();
  Eigen::MatrixXd z = params_.biases.front().replicate(1, static_cast<Eigen::Index>(xs.size()));
  for (std::size_t j = 0; j < xs.size(); ++j) {
    const SparseVector& x = *xs[j];
    check_input(x);
    auto col = z.col(static_cast<Eigen::Index>(j));
    for (std::size_t k = 0; k < x.index.size(); ++k) col.noalias() += x.value[k] * w.col(x.index[k]);
  }
  return z;
}

Eigen::MatrixXd ValueNetwork::forward_batch(std::span<const SparseVector> xs) const {
  return forward_batch(pointers(xs));
}

Eigen::MatrixXd ValueNetwork::forward_batch(std::span<const SparseVector* const> xs) const {
  Eigen::MatrixXd a = first_layer(xs);
  for (std::size_t k = 1; k < params_.weights.size(); ++k) {
    a = a.cwiseMax(0.0);
    Eigen::MatrixXd z = params_.weights[k] * a;
    z.colwise() += params_.biases[k];
    a = std::move(z);
  }
  return a;
}

Eigen::VectorXd ValueNetwork::forward(const SparseVector& x) const {
  const SparseVector* p = &x;
  return forward_batch(std::span<const SparseVector* const>(&p, 1)).col(0);
}

Eigen::VectorXd ValueNetwork::forward(std::span<const double> dense) const {
  if (static_cast<int>(dense.size()) != input_dim()) {
    throw DimensionMismatch("input has width " + std::to_string(dense.size()) + ", network expects " +
                            std::to_string(input_dim()));
  }
  return forward(SparseVector::from_dense(dense));
}

Gradients ValueNetwork::zero_gradients() const {
  Gradients g = params_;
  g.set_zero();
  return g;
}

double ValueNetwork::weighted_huber(std::span<const SparseVector> xs, const Eigen::MatrixXd& target,
                                    const Eigen::MatrixXd& weight, Gradients& grad) const {
  return weighted_huber(pointers(xs), target, weight, grad);
}

double ValueNetwork::weighted_huber(std::span<const SparseVector* const> xs, const Eigen::MatrixXd& target,
                                    const Eigen::MatrixXd& weight, Gradients& grad) const {
  const auto n = static_cast<Eigen::Index>(xs.size());
  if (target.rows() != heads_ || target.cols() != n || weight.rows() != heads_ || weight.cols() != n) {
    throw DimensionMismatch("target and weight must be heads x batch");
  }
  const std::size_t layers = params_.weights.size();
  // pre-activations per layer
  std::vector<Eigen::MatrixXd> z(layers);
  z[0] = first_layer(xs);
  for (std::size_t k = 1; k < layers; ++k) {
    z[k] = params_.weights[k] * z[k - 1].cwiseMax(0.0);
    z[k].colwise() += params_.biases[k];
  }

  double loss = 0.0;
  Eigen::MatrixXd delta(heads_, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index h = 0; h < heads_; ++h) {
      const double w = weight(h, j);
      if (w == 0.0) {
        delta(h, j) = 0.0;
        continue;
      }
      const double r = target(h, j) - z.back()(h, j);
      loss += w * huber(r);
      delta(h, j) = -w * huber_derivative(r);
    }
  }

  grad = zero_gradients();
  for (std::size_t k = layers; k-- > 1;) {
    const Eigen::MatrixXd a = z[k - 1].cwiseMax(0.0);
    grad.weights[k].noalias() = delta * a.transpose();
    grad.biases[k] = delta.rowwise().sum();
    Eigen::MatrixXd back = params_.weights[k].transpose() * delta;
    delta = back.cwiseProduct((z[k - 1].array() > 0.0).cast<double>().matrix());
  }
  grad.biases[0] = delta.rowwise().sum();
  auto& w0 = grad.weights[0];
  for (Eigen::Index j = 0; j < n; ++j) {
    const SparseVector& x = *xs[static_cast<std::size_t>(j)];
    for (std::size_t k = 0; k < x.index.size(); ++k) w0.col(x.index[k]).noalias() += x.value[k] * delta.col(j);
  }
  return loss;
}

double clip_global_norm(Gradients& grad, double max_norm) {
  const double norm = std::sqrt(grad.squared_norm());
  if (norm > max_norm && norm > 0.0) grad.scale(max_norm / norm);
  return norm;
}

Adam::Adam(const ValueNetwork& net, AdamConfig config) : config_(config) {
  m_ = net.zero_gradients();
  v_ = net.zero_gradients();
}

void Adam::step(ValueNetwork& net, const Gradients& grad) {
  ++t_;
  const double b1 = config_.beta1, b2 = config_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(t_));
  const double lr = config_.learning_rate, eps = config_.epsilon;
  auto update = [&](auto& p, auto& m, auto& v, const auto& g) {
    m = b1 * m + (1.0 - b1) * g;
    v = b2 * v + (1.0 - b2) * g.cwiseProduct(g);
    p.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
  };
  auto& params = net.params();
  for (std::size_t k = 0; k < params.weights.size(); ++k) {
    update(params.weights[k], m_.weights[k], v_.weights[k], grad.weights[k]);
    update(params.biases[k], m_.biases[k], v_.biases[k], grad.biases[k]);
  }
}

void Adam::restore(std::uint64_t steps, std::span<const double> m, std::span<const double> v) {
  m_.assign(m);
  v_.assign(v);
  t_ = steps;
}

}  // namespace molforge
