#include "molforge/rewards.hpp"

#include <cmath>

#include "molforge/error.hpp"

namespace molforge {

void RewardSpec::validate() const {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw ConfigError("gamma must lie in (0, 1]");
  std::visit(
      [](const auto& v) {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, TargetRange>) {
          if (v.lower > v.upper) throw ConfigError("target range needs lower <= upper");
        } else if constexpr (std::is_same_v<V, ConstrainedLogP>) {
          if (v.delta < 0.0 || v.delta > 1.0) throw ConfigError("delta must lie in [0, 1]");
          if (v.lambda < 0.0) throw ConfigError("lambda must be >= 0");
        } else if constexpr (std::is_same_v<V, MultiObjective>) {
          if (v.weight < 0.0 || v.weight > 1.0) throw ConfigError("weight must lie in [0, 1]");
        }
      },
      variant);
}

const Molecule* RewardSpec::origin() const noexcept {
  if (const auto* c = std::get_if<ConstrainedLogP>(&variant)) return &c->origin;
  if (const auto* m = std::get_if<MultiObjective>(&variant)) return &m->origin;
  return nullptr;
}

double target_range_reward(double p, double lower, double upper) {
  if (p >= lower && p <= upper) return 1.0;
  return -std::min(std::abs(p - lower), std::abs(p - upper));
}

double scalarize(double weight, double similarity, double property) {
  return weight * similarity + (1.0 - weight) * property;
}

double scalarize(std::span<const double> weights, std::span<const double> rewards) {
  if (weights.size() != rewards.size()) throw LengthMismatch("weight and reward vectors differ in length");
  double total = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) total += weights[i] * rewards[i];
  return total;
}

double relative_improvement(const Molecule& m, const Molecule& m0, const PropertyKind& property,
                            const PropertyRegistry& registry) {
  const double p0 = registry.evaluate(property, m0);
  if (p0 == 1.0) throw DivisionByZero("relative improvement undefined when p(m0) = 1");
  return (registry.evaluate(property, m) - p0) / (1.0 - p0);
}

double constrained_reward(const Molecule& mol, const ConstrainedLogP& spec,
                          const PropertyRegistry& registry, int similarity_radius,
                          int fingerprint_length) {
  const double sim = tanimoto(morgan_fingerprint(mol, similarity_radius, fingerprint_length),
                              morgan_fingerprint(spec.origin, similarity_radius, fingerprint_length));
  const double value = logp(mol, registry.logp_table());
  return sim < spec.delta ? value - spec.lambda * (spec.delta - sim) : value;
}

RewardFunction::RewardFunction(RewardSpec spec, std::shared_ptr<const PropertyRegistry> registry,
                               int similarity_radius, int fingerprint_length)
    : spec_(std::move(spec)),
      registry_(std::move(registry)),
      similarity_radius_(similarity_radius),
      fingerprint_length_(fingerprint_length) {
  spec_.validate();
  if (const Molecule* origin = spec_.origin()) {
    origin_fp_ = morgan_fingerprint(*origin, similarity_radius_, fingerprint_length_);
  }
}

RewardFunction RewardFunction::with_origin(const Molecule& origin) const {
  RewardSpec spec = spec_;
  if (auto* c = std::get_if<ConstrainedLogP>(&spec.variant)) c->origin = origin;
  if (auto* m = std::get_if<MultiObjective>(&spec.variant)) m->origin = origin;
  return RewardFunction(std::move(spec), registry_, similarity_radius_, fingerprint_length_);
}

double RewardFunction::similarity(const Molecule& mol) const {
  if (!spec_.origin()) return 0.0;
  return tanimoto(morgan_fingerprint(mol, similarity_radius_, fingerprint_length_), origin_fp_);
}

RewardVector RewardFunction::components(const Molecule& mol) const {
  return std::visit(
      [&](const auto& v) -> RewardVector {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, Maximize>) {
          return {{registry_->evaluate(v.property, mol)}};
        } else if constexpr (std::is_same_v<V, TargetRange>) {
          return {{target_range_reward(registry_->evaluate(v.property, mol), v.lower, v.upper)}};
        } else if constexpr (std::is_same_v<V, ConstrainedLogP>) {
          const double sim = similarity(mol);
          const double value = logp(mol, registry_->logp_table());
          return {{sim < v.delta ? value - v.lambda * (v.delta - sim) : value}};
        } else {
          return {{similarity(mol), registry_->evaluate(v.property, mol)}};
        }
      },
      spec_.variant);
}

double RewardFunction::raw(const Molecule& mol) const {
  const RewardVector r = components(mol);
  if (const auto* m = std::get_if<MultiObjective>(&spec_.variant)) {
    return scalarize(m->weight, r.components[0], r.components[1]);
  }
  return r.components[0];
}

double RewardFunction::discount(int step, int max_steps) const {
  return std::pow(spec_.gamma, max_steps - step);
}

double RewardFunction::step_reward(const State& state, int max_steps) const {
  if (!spec_.per_step && state.step < max_steps) return 0.0;
  return raw(state.molecule) * discount(state.step, max_steps);
}

double step_reward(const RewardSpec& spec, const State& state, int max_steps,
                   const PropertyRegistry& registry) {
  auto shared = std::shared_ptr<const PropertyRegistry>(&registry, [](const PropertyRegistry*) {});
  return RewardFunction(spec, std::move(shared)).step_reward(state, max_steps);
}

}  // namespace molforge
