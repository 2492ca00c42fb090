#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace molforge {

/// Piecewise-linear epsilon over episode index, constant outside the
/// breakpoint range.
class EpsilonSchedule {
 public:
  struct Breakpoint {
    double episode;
    double epsilon;
    bool operator==(const Breakpoint&) const = default;
  };

  /// (0, 1.0) -> (anneal_episodes, 0.01).
  EpsilonSchedule() : EpsilonSchedule(linear(1000)) {}
  /// Throws ConfigError unless episodes strictly increase and epsilons lie in
  /// [0, 1] and never increase.
  explicit EpsilonSchedule(std::vector<Breakpoint> breakpoints);
  static EpsilonSchedule linear(double anneal_episodes, double start = 1.0, double end = 0.01);

  double operator()(double episode) const;
  const std::vector<Breakpoint>& breakpoints() const noexcept { return points_; }

 private:
  std::vector<Breakpoint> points_;
};

/// Uniform index with probability epsilon, otherwise the first maximum.
/// Draws from `rng` only when epsilon > 0. Throws EmptyActionSet.
std::size_t select_action(std::span<const double> values, double epsilon, std::mt19937_64& rng);

/// First index of the maximum value. Throws EmptyActionSet.
std::size_t argmax(std::span<const double> values);

/// Bernoulli(p) bit per head, redrawn until at least one bit is set.
std::uint64_t sample_bootstrap_mask(int heads, double p, std::mt19937_64& rng);

}  // namespace molforge
