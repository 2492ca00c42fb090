#include "molforge/exploration.hpp"

#include <string>

#include "molforge/error.hpp"

namespace molforge {

EpsilonSchedule::EpsilonSchedule(std::vector<Breakpoint> breakpoints) : points_(std::move(breakpoints)) {
  if (points_.empty()) throw ConfigError("epsilon schedule needs at least one breakpoint");
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const auto& p = points_[i];
    if (!(p.epsilon >= 0.0 && p.epsilon <= 1.0)) {
      throw ConfigError("epsilon " + std::to_string(p.epsilon) + " outside [0, 1]");
    }
    if (i > 0) {
      if (!(p.episode > points_[i - 1].episode)) throw ConfigError("schedule episodes must strictly increase");
      if (p.epsilon > points_[i - 1].epsilon) throw ConfigError("schedule epsilon must not increase");
    }
  }
}

EpsilonSchedule EpsilonSchedule::linear(double anneal_episodes, double start, double end) {
  if (!(anneal_episodes > 0.0)) throw ConfigError("anneal length must be positive");
  return EpsilonSchedule({{0.0, start}, {anneal_episodes, end}});
}

double EpsilonSchedule::operator()(double episode) const {
  if (episode <= points_.front().episode) return points_.front().epsilon;
  for (std::size_t i = 1; i < points_.size(); ++i) {
    const auto& lo = points_[i - 1];
    const auto& hi = points_[i];
    if (episode < hi.episode) {
      const double f = (episode - lo.episode) / (hi.episode - lo.episode);
      return lo.epsilon + f * (hi.epsilon - lo.epsilon);
    }
  }
  return points_.back().epsilon;
}

std::size_t argmax(std::span<const double> values) {
  if (values.empty()) throw EmptyActionSet("no actions to choose from");
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

std::size_t select_action(std::span<const double> values, double epsilon, std::mt19937_64& rng) {
  if (values.empty()) throw EmptyActionSet("no actions to choose from");
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw ConfigError("epsilon outside [0, 1]");
  if (epsilon > 0.0 && std::uniform_real_distribution<double>(0.0, 1.0)(rng) < epsilon) {
    return std::uniform_int_distribution<std::size_t>(0, values.size() - 1)(rng);
  }
  return argmax(values);
}

std::uint64_t sample_bootstrap_mask(int heads, double p, std::mt19937_64& rng) {
  if (heads < 1 || heads > 64) throw ConfigError("head count must be in [1, 64]");
  if (!(p > 0.0 && p <= 1.0)) throw ConfigError("bootstrap probability must be in (0, 1]");
  std::bernoulli_distribution coin(p);
  std::uint64_t mask = 0;
  while (mask == 0) {
    for (int h = 0; h < heads; ++h) {
      if (coin(rng)) mask |= std::uint64_t{1} << h;
    }
  }
  return mask;
}

}  // namespace molforge
