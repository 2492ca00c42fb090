#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "molforge/fingerprint.hpp"

namespace molforge {

/// Sparse real input vector (indices strictly increasing).
struct SparseVector {
  std::uint32_t dim = 0;
  std::vector<std::uint32_t> index;
  std::vector<double> value;

  static SparseVector from_dense(std::span<const double> dense);
  /// Fingerprint on-bits with value 1, then the steps-remaining entry.
  static SparseVector from_features(const StateFeatures& features);
  std::vector<double> to_dense() const;
  bool operator==(const SparseVector&) const = default;
};

double huber(double x);
/// d huber / dx.
double huber_derivative(double x);

/// Per-layer parameter blocks shaped like a ValueNetwork's.
struct LayerBlocks {
  std::vector<Eigen::MatrixXd> weights;  // layer k: out x in
  std::vector<Eigen::VectorXd> biases;

  void set_zero();
  double squared_norm() const;
  void scale(double factor);
  std::size_t size() const;
  /// Declaration order: for each layer, weights (column-major) then biases.
  std::vector<double> flatten() const;
  void assign(std::span<const double> flat);
};

using Gradients = LayerBlocks;

/// Fully connected multi-head value approximator: ReLU hidden layers and a
/// linear output layer with one unit per head.
class ValueNetwork {
 public:
  ValueNetwork() = default;
  /// Zero-initialized. `layer_dims` lists the input width followed by the
  /// hidden widths; the output width is `heads`.
  ValueNetwork(std::vector<int> layer_dims, int heads);
  /// Glorot-uniform weights, zero biases.
  static ValueNetwork initialized(std::vector<int> layer_dims, int heads, std::mt19937_64& rng);

  const std::vector<int>& layer_dims() const noexcept { return dims_; }
  int input_dim() const noexcept { return dims_.empty() ? 0 : dims_.front(); }
  int heads() const noexcept { return heads_; }
  std::size_t layer_count() const noexcept { return params_.weights.size(); }
  std::size_t parameter_count() const { return params_.size(); }
  bool same_architecture(const ValueNetwork& other) const noexcept;

  const LayerBlocks& params() const noexcept { return params_; }
  LayerBlocks& params() noexcept { return params_; }
  std::vector<double> parameters() const { return params_.flatten(); }
  /// Throws ArchitectureMismatch on a size mismatch.
  void set_parameters(std::span<const double> flat);
  /// Copies parameters; throws ArchitectureMismatch.
  void copy_from(const ValueNetwork& other);

  /// Head values for one input; throws DimensionMismatch.
  Eigen::VectorXd forward(const SparseVector& x) const;
  Eigen::VectorXd forward(std::span<const double> dense) const;
  /// heads x N.
  Eigen::MatrixXd forward_batch(std::span<const SparseVector* const> xs) const;
  Eigen::MatrixXd forward_batch(std::span<const SparseVector> xs) const;

  /// sum_{h,j} weight(h,j) * huber(target(h,j) - V_h(x_j)); writes the
  /// gradient of that sum into `grad`.
  double weighted_huber(std::span<const SparseVector* const> xs, const Eigen::MatrixXd& target,
                        const Eigen::MatrixXd& weight, Gradients& grad) const;
  double weighted_huber(std::span<const SparseVector> xs, const Eigen::MatrixXd& target,
                        const Eigen::MatrixXd& weight, Gradients& grad) const;

  Gradients zero_gradients() const;

 private:
  void check_input(const SparseVector& x) const;
  Eigen::MatrixXd first_layer(std::span<const SparseVector* const> xs) const;

  std::vector<int> dims_;
  int heads_ = 0;
  LayerBlocks params_;
};

/// Scales `grad` so its global L2 norm is at most `max_norm`; returns the
/// norm before clipping.
double clip_global_norm(Gradients& grad, double max_norm);

struct AdamConfig {
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

class Adam {
 public:
  Adam() = default;
  Adam(const ValueNetwork& net, AdamConfig config);

  void step(ValueNetwork& net, const Gradients& grad);

  const AdamConfig& config() const noexcept { return config_; }
  void set_learning_rate(double lr) noexcept { config_.learning_rate = lr; }
  std::uint64_t steps() const noexcept { return t_; }
  const LayerBlocks& first_moment() const noexcept { return m_; }
  const LayerBlocks& second_moment() const noexcept { return v_; }
  /// Restores saved moments; throws ArchitectureMismatch.
  void restore(std::uint64_t steps, std::span<const double> m, std::span<const double> v);

 private:
  AdamConfig config_;
  LayerBlocks m_, v_;
  std::uint64_t t_ = 0;
};

}  // namespace molforge
