#pragma once

#include <memory>
#include <span>
#include <variant>
#include <vector>

#include "molforge/actions.hpp"
#include "molforge/fingerprint.hpp"
#include "molforge/properties.hpp"

namespace molforge {

struct Maximize {
  PropertyKind property;
};

/// Reward 1 inside [lower, upper], minus the distance to the range otherwise.
struct TargetRange {
  PropertyKind property;
  double lower = 0.0;
  double upper = 0.0;
};

/// logP penalized by lambda * (delta - similarity) when similarity to the
/// origin drops below delta.
struct ConstrainedLogP {
  Molecule origin;
  double delta = 0.6;
  double lambda = 100.0;
};

/// weight * similarity + (1 - weight) * property.
struct MultiObjective {
  Molecule origin;
  double weight = 0.5;
  PropertyKind property;
};

using RewardVariant = std::variant<Maximize, TargetRange, ConstrainedLogP, MultiObjective>;

struct RewardSpec {
  RewardVariant variant = Maximize{};
  double gamma = 0.9;
  bool per_step = true;

  /// Throws ConfigError.
  void validate() const;
  /// The similarity reference, if the variant has one.
  const Molecule* origin() const noexcept;
};

/// One entry per objective of the active spec.
struct RewardVector {
  std::vector<double> components;
};

double target_range_reward(double p, double lower, double upper);
double scalarize(double weight, double similarity, double property);
/// Dot product of a weight vector with a reward vector; throws LengthMismatch.
double scalarize(std::span<const double> weights, std::span<const double> rewards);
/// (p(m) - p(m0)) / (1 - p(m0)) for properties bounded above by 1.
double relative_improvement(const Molecule& m, const Molecule& m0, const PropertyKind& property,
                            const PropertyRegistry& registry);

/// Reward evaluator bound to a spec and a property registry. The origin
/// fingerprint is computed once on construction.
class RewardFunction {
 public:
  RewardFunction(RewardSpec spec, std::shared_ptr<const PropertyRegistry> registry,
                 int similarity_radius = 2, int fingerprint_length = 2048);

  const RewardSpec& spec() const noexcept { return spec_; }
  const PropertyRegistry& registry() const noexcept { return *registry_; }

  /// Same function with a different similarity origin (ConstrainedLogP and
  /// MultiObjective only; other variants are returned unchanged).
  RewardFunction with_origin(const Molecule& origin) const;

  /// Tanimoto similarity of `mol` to the origin (radius-2 fingerprints).
  double similarity(const Molecule& mol) const;

  RewardVector components(const Molecule& mol) const;
  /// Undiscounted reward of a molecule.
  double raw(const Molecule& mol) const;
  /// raw * gamma^(T - t); zero before T when per_step is off.
  double step_reward(const State& state, int max_steps) const;
  double discount(int step, int max_steps) const;

 private:
  RewardSpec spec_;
  std::shared_ptr<const PropertyRegistry> registry_;
  int similarity_radius_;
  int fingerprint_length_;
  BitFingerprint origin_fp_;
};

double constrained_reward(const Molecule& mol, const ConstrainedLogP& spec,
                          const PropertyRegistry& registry, int similarity_radius = 2,
                          int fingerprint_length = 2048);

double step_reward(const RewardSpec& spec, const State& state, int max_steps,
                   const PropertyRegistry& registry);

}  // namespace molforge
