#pragma once

#include <algorithm>
#include <concepts>
#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "molforge/error.hpp"
#include "molforge/exploration.hpp"
#include "molforge/network.hpp"
#include "molforge/replay.hpp"

namespace molforge {

/// A successor state with its network input and discounted reward.
template <class S>
struct Candidate {
  S successor;
  SparseVector features;
  double reward = 0.0;
  bool terminal = false;
};

template <class S>
using Expansion = std::vector<Candidate<S>>;

/// Deterministic finite-horizon environment whose Q values are
/// r(s') + V(s') over explicitly enumerated successors.
template <class E>
concept Environment = requires(E& env, const typename E::State& s, std::mt19937_64& rng) {
  { env.reset(rng) } -> std::convertible_to<typename E::State>;
  { env.expand(s) } -> std::convertible_to<std::shared_ptr<const Expansion<typename E::State>>>;
  { env.is_terminal(s) } -> std::convertible_to<bool>;
  { env.input_dim() } -> std::convertible_to<int>;
};

/// heads x n: r(s') + V_h(s'), with V = 0 for terminal successors.
template <class S>
Eigen::MatrixXd candidate_q(const ValueNetwork& net, const Expansion<S>& candidates) {
  Eigen::MatrixXd q(net.heads(), static_cast<Eigen::Index>(candidates.size()));
  std::vector<const SparseVector*> inputs;
  std::vector<Eigen::Index> columns;
  for (std::size_t j = 0; j < candidates.size(); ++j) {
    q.col(static_cast<Eigen::Index>(j)).setConstant(candidates[j].reward);
    if (!candidates[j].terminal) {
      inputs.push_back(&candidates[j].features);
      columns.push_back(static_cast<Eigen::Index>(j));
    }
  }
  if (!inputs.empty()) {
    const Eigen::MatrixXd v = net.forward_batch(inputs);
    for (std::size_t k = 0; k < columns.size(); ++k) q.col(columns[k]) += v.col(static_cast<Eigen::Index>(k));
  }
  return q;
}

/// Q values of one head; throws HeadOutOfRange.
template <class S>
std::vector<double> action_values(const ValueNetwork& net, int head, const Expansion<S>& candidates) {
  if (head < 0 || head >= net.heads()) {
    throw HeadOutOfRange("head " + std::to_string(head) + " of " + std::to_string(net.heads()));
  }
  const Eigen::MatrixXd q = candidate_q(net, candidates);
  std::vector<double> out(candidates.size());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = q(head, static_cast<Eigen::Index>(j));
  return out;
}

/// Q values averaged over heads.
template <class S>
std::vector<double> mean_action_values(const ValueNetwork& net, const Expansion<S>& candidates) {
  const Eigen::RowVectorXd mean = candidate_q(net, candidates).colwise().mean();
  return std::vector<double>(mean.data(), mean.data() + mean.size());
}

struct TrainConfig {
  std::vector<int> hidden{1024, 512, 128, 32};
  int heads = 10;
  int episodes = 5000;
  EpsilonSchedule schedule = EpsilonSchedule::linear(2500);
  std::size_t replay_capacity = 100000;
  int batch_size = 128;
  int warmup = 500;
  int train_every = 1;
  int target_sync = 500;
  AdamConfig adam;
  double grad_clip = 10.0;
  double bootstrap_p = 0.5;

  void validate() const {
    for (int h : hidden) {
      if (h < 1) throw ConfigError("hidden widths must be positive");
    }
    if (heads < 1 || heads > 64) throw ConfigError("heads must be in [1, 64]");
    if (episodes < 0) throw ConfigError("episodes must be non-negative");
    if (replay_capacity < 1) throw ConfigError("replay capacity must be positive");
    if (batch_size < 1) throw ConfigError("batch size must be positive");
    if (warmup < 0) throw ConfigError("warmup must be non-negative");
    if (train_every < 1) throw ConfigError("train_every must be positive");
    if (target_sync < 1) throw ConfigError("target_sync must be positive");
    if (!(adam.learning_rate >= 0.0)) throw ConfigError("learning rate must be non-negative");
    if (!(adam.beta1 >= 0.0 && adam.beta1 < 1.0 && adam.beta2 >= 0.0 && adam.beta2 < 1.0)) {
      throw ConfigError("Adam betas must be in [0, 1)");
    }
    if (!(adam.epsilon > 0.0)) throw ConfigError("Adam epsilon must be positive");
    if (!(grad_clip > 0.0)) throw ConfigError("gradient clip must be positive");
    if (!(bootstrap_p > 0.0 && bootstrap_p <= 1.0)) throw ConfigError("bootstrap probability must be in (0, 1]");
  }
};

template <class S>
struct EpisodeRecord {
  int episode = 0;
  int head = -1;  // -1: head mean
  double epsilon = 0.0;
  S start;
  std::vector<S> visited;  // one successor per step
  std::vector<double> rewards;
  int train_steps = 0;
  double loss_sum = 0.0;

  const S& terminal() const { return visited.empty() ? start : visited.back(); }
  double discounted_return() const {
    double total = 0.0;
    for (double r : rewards) total += r;
    return total;
  }
  double mean_loss() const { return train_steps > 0 ? loss_sum / train_steps : 0.0; }
};

/// Rolls one episode from `start` without learning. head = -1 acts on the
/// head mean.
template <Environment E>
EpisodeRecord<typename E::State> rollout(E& env, const ValueNetwork& net, typename E::State start,
                                         double epsilon, std::mt19937_64& rng, int head = -1) {
  EpisodeRecord<typename E::State> record;
  record.head = head;
  record.epsilon = epsilon;
  record.start = start;
  typename E::State state = std::move(start);
  while (!env.is_terminal(state)) {
    const auto expansion = env.expand(state);
    const std::vector<double> values =
        head < 0 ? mean_action_values(net, *expansion) : action_values(net, head, *expansion);
    const auto& chosen = (*expansion)[select_action(values, epsilon, rng)];
    record.visited.push_back(chosen.successor);
    record.rewards.push_back(chosen.reward);
    state = chosen.successor;
  }
  return record;
}

/// Bootstrapped double DQN over successor values.
template <Environment E>
class Trainer {
 public:
  using State = typename E::State;
  using Item = Transition<State>;

  Trainer(E& env, TrainConfig config, std::uint64_t seed)
      : env_(env), config_(std::move(config)), rng_(seed), replay_(config_.replay_capacity) {
    config_.validate();
    std::vector<int> dims{env_.input_dim()};
    dims.insert(dims.end(), config_.hidden.begin(), config_.hidden.end());
    online_ = ValueNetwork::initialized(dims, config_.heads, rng_);
    target_ = online_;
    adam_ = Adam(online_, config_.adam);
  }

  const TrainConfig& config() const noexcept { return config_; }
  E& environment() noexcept { return env_; }
  const ValueNetwork& online() const noexcept { return online_; }
  ValueNetwork& online() noexcept { return online_; }
  const ValueNetwork& target() const noexcept { return target_; }
  const Adam& optimizer() const noexcept { return adam_; }
  Adam& optimizer() noexcept { return adam_; }
  ReplayBuffer<Item>& replay() noexcept { return replay_; }
  std::mt19937_64& rng() noexcept { return rng_; }
  std::uint64_t gradient_steps() const noexcept { return gradient_steps_; }
  std::uint64_t environment_steps() const noexcept { return env_steps_; }

  /// Replaces network and optimizer state (resume); the target is synced.
  /// Throws ArchitectureMismatch.
  void restore(const ValueNetwork& net, const Adam& adam) {
    if (!online_.same_architecture(net)) throw ArchitectureMismatch("checkpoint network has a different shape");
    online_.copy_from(net);
    adam_ = adam;
    adam_.set_learning_rate(config_.adam.learning_rate);
    sync_target();
  }

  void sync_target() { target_.copy_from(online_); }

  EpisodeRecord<State> run_episode(int episode) {
    return run_episode_from(env_.reset(rng_), episode);
  }

  EpisodeRecord<State> run_episode_from(State start, int episode) {
    EpisodeRecord<State> record;
    record.episode = episode;
    record.head = std::uniform_int_distribution<int>(0, config_.heads - 1)(rng_);
    record.epsilon = config_.schedule(episode);
    record.start = start;
    State state = std::move(start);
    const std::size_t ready = std::max<std::size_t>(static_cast<std::size_t>(config_.warmup),
                                                    static_cast<std::size_t>(config_.batch_size));
    while (!env_.is_terminal(state)) {
      const auto expansion = env_.expand(state);
      const std::vector<double> values = action_values(online_, record.head, *expansion);
      const auto& chosen = (*expansion)[select_action(values, record.epsilon, rng_)];
      const std::uint64_t mask = sample_bootstrap_mask(config_.heads, config_.bootstrap_p, rng_);
      replay_.push(Item{chosen.features, chosen.successor, chosen.reward, chosen.terminal, mask});
      record.visited.push_back(chosen.successor);
      record.rewards.push_back(chosen.reward);
      state = chosen.successor;
      ++env_steps_;
      if (replay_.size() >= ready && env_steps_ % static_cast<std::uint64_t>(config_.train_every) == 0) {
        record.loss_sum += train_step();
        ++record.train_steps;
      }
    }
    return record;
  }

  /// y for the head-mean evaluation of the target network.
  double td_target(const Item& item) const { return td_targets(item).mean(); }

  /// y per head: r_t + r(a*) + V_target,h(a*), with a* chosen by the online
  /// head mean over the successor's own action set.
  Eigen::VectorXd td_targets(const Item& item) const {
    const Item* p = &item;
    Eigen::VectorXd y = Eigen::VectorXd::Constant(config_.heads, item.reward);
    if (!item.terminal) y += bootstrap_values(std::span<const Item* const>(&p, 1)).col(0);
    return y;
  }

  /// One Adam step on a uniform batch; returns the masked mean Huber loss.
  double train_step() {
    const auto picks = replay_.sample(static_cast<std::size_t>(config_.batch_size), rng_);
    std::vector<const Item*> batch;
    batch.reserve(picks.size());
    for (std::size_t i : picks) batch.push_back(&replay_[i]);

    const Eigen::MatrixXd target_v = bootstrap_values(batch);
    const auto n = static_cast<Eigen::Index>(batch.size());
    Eigen::MatrixXd weight = Eigen::MatrixXd::Zero(config_.heads, n);
    std::vector<const SparseVector*> inputs;
    inputs.reserve(batch.size());
    double pairs = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      const Item& item = *batch[static_cast<std::size_t>(j)];
      inputs.push_back(&item.features);
      for (int h = 0; h < config_.heads; ++h) {
        if ((item.mask >> h) & 1u) {
          pairs += 1.0;
          // terminal pairs have a zero residual
          if (!item.terminal) weight(h, j) = 1.0;
        }
      }
    }
    weight /= pairs;
    const double loss = online_.weighted_huber(inputs, target_v, weight, grad_);
    clip_global_norm(grad_, config_.grad_clip);
    adam_.step(online_, grad_);
    ++gradient_steps_;
    if (gradient_steps_ % static_cast<std::uint64_t>(config_.target_sync) == 0) sync_target();
    return loss;
  }

 private:
  /// heads x batch: r(a*) + V_target(a*) for each non-terminal item; zero
  /// columns for terminal items.
  Eigen::MatrixXd bootstrap_values(std::span<const Item* const> batch) const {
    const auto n = static_cast<Eigen::Index>(batch.size());
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(config_.heads, n);
    std::vector<std::shared_ptr<const Expansion<State>>> expansions(batch.size());
    std::vector<const SparseVector*> inputs;
    for (std::size_t j = 0; j < batch.size(); ++j) {
      if (batch[j]->terminal) continue;
      expansions[j] = env_.expand(batch[j]->successor);
      for (const auto& c : *expansions[j]) {
        if (!c.terminal) inputs.push_back(&c.features);
      }
    }
    const Eigen::MatrixXd online_v =
        inputs.empty() ? Eigen::MatrixXd(config_.heads, 0) : online_.forward_batch(inputs);

    std::vector<const SparseVector*> chosen_inputs;
    std::vector<Eigen::Index> chosen_columns;
    Eigen::Index col = 0;
    for (std::size_t j = 0; j < batch.size(); ++j) {
      if (!expansions[j]) continue;
      const auto& cands = *expansions[j];
      std::size_t best = 0;
      double best_q = 0.0;
      for (std::size_t k = 0; k < cands.size(); ++k) {
        double q = cands[k].reward;
        if (!cands[k].terminal) q += online_v.col(col++).mean();
        if (k == 0 || q > best_q) {
          best = k;
          best_q = q;
        }
      }
      out.col(static_cast<Eigen::Index>(j)).setConstant(cands[best].reward);
      if (!cands[best].terminal) {
        chosen_inputs.push_back(&cands[best].features);
        chosen_columns.push_back(static_cast<Eigen::Index>(j));
      }
    }
    if (!chosen_inputs.empty()) {
      const Eigen::MatrixXd v = target_.forward_batch(chosen_inputs);
      for (std::size_t k = 0; k < chosen_columns.size(); ++k) {
        out.col(chosen_columns[k]) += v.col(static_cast<Eigen::Index>(k));
      }
    }
    return out;
  }

  E& env_;
  TrainConfig config_;
  std::mt19937_64 rng_;
  ValueNetwork online_, target_;
  Adam adam_;
  ReplayBuffer<Item> replay_;
  Gradients grad_;
  std::uint64_t gradient_steps_ = 0;
  std::uint64_t env_steps_ = 0;
};

}  // namespace molforge
