#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "molforge/error.hpp"
#include "molforge/network.hpp"

namespace molforge {

/// One environment step, stored by the features of the chosen successor
/// (the network input for Q(s_t, a_t)) together with the successor itself so
/// its action set can be re-expanded for targets.
template <class S>
struct Transition {
  SparseVector features;
  S successor;
  double reward = 0.0;  // discounted reward of the successor
  bool terminal = false;
  std::uint64_t mask = 1;  // bootstrap bit per head
};

/// Fixed-capacity ring of items with uniform sampling.
template <class T>
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity_ == 0) throw ConfigError("replay capacity must be positive");
    items_.reserve(std::min<std::size_t>(capacity_, 1 << 16));
  }

  void push(T item) {
    if (items_.size() < capacity_) {
      items_.push_back(std::move(item));
    } else {
      items_[next_] = std::move(item);
    }
    next_ = (next_ + 1) % capacity_;
  }

  std::size_t size() const noexcept { return items_.size(); }
  std::size_t capacity() const noexcept { return capacity_; }
  const T& operator[](std::size_t i) const { return items_.at(i); }

  /// `n` indices drawn uniformly with replacement; throws InsufficientData
  /// when fewer than `n` items are stored.
  std::vector<std::size_t> sample(std::size_t n, std::mt19937_64& rng) const {
    if (items_.size() < n || n == 0) {
      throw InsufficientData("replay holds " + std::to_string(items_.size()) + " items, batch needs " +
                             std::to_string(n));
    }
    std::uniform_int_distribution<std::size_t> pick(0, items_.size() - 1);
    std::vector<std::size_t> out(n);
    for (auto& i : out) i = pick(rng);
    return out;
  }

 private:
  std::size_t capacity_;
  std::size_t next_ = 0;
  std::vector<T> items_;
};

}  // namespace molforge
