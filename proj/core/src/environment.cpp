#include "molforge/environment.hpp"

#include "molforge/error.hpp"
#include "molforge/smiles.hpp"

namespace molforge {

MoleculeEnvironment::MoleculeEnvironment(MdpConfig mdp, RewardFunction reward, std::vector<Molecule> origins,
                                         std::size_t cache_capacity, FingerprintSpec features)
    : mdp_(std::move(mdp)), features_(features), capacity_(cache_capacity) {
  mdp_.validate();
  if (origins.empty()) {
    starts_.push_back(mdp_.initial_molecule);
    rewards_.push_back(std::move(reward));
  } else {
    for (auto& origin : origins) {
      rewards_.push_back(reward.with_origin(origin));
      starts_.push_back(std::move(origin));
    }
  }
}

MoleculeState MoleculeEnvironment::start(int origin) const {
  if (origin < 0 || origin >= origin_count()) {
    throw IndexOutOfRange("origin " + std::to_string(origin) + " of " + std::to_string(origin_count()));
  }
  const Molecule& mol = starts_[static_cast<std::size_t>(origin)];
  return MoleculeState{molforge::State{mol, 0}, origin, canonical_key(mol).text()};
}

MoleculeState MoleculeEnvironment::reset(std::mt19937_64& rng) const {
  if (starts_.size() == 1) return start(0);
  return start(std::uniform_int_distribution<int>(0, origin_count() - 1)(rng));
}

std::shared_ptr<const Expansion<MoleculeState>> MoleculeEnvironment::expand(const MoleculeState& s) {
  std::string cache_key = std::to_string(s.origin) + '|' + std::to_string(s.state.step) + '|' + s.key;
  if (auto it = index_.find(cache_key); it != index_.end()) {
    ++hits_;
    lru_.splice(lru_.begin(), lru_, it->second);
    return it->second->second;
  }
  ++misses_;
  const RewardFunction& reward = rewards_.at(static_cast<std::size_t>(s.origin));
  auto expansion = std::make_shared<Expansion<MoleculeState>>();
  auto actions = valid_actions(s.state, mdp_);
  expansion->reserve(actions.size());
  for (auto& action : actions) {
    MoleculeState next{molforge::State{std::move(action.successor), s.state.step + 1}, s.origin,
                       action.key.text()};
    Candidate<MoleculeState> c;
    c.features = SparseVector::from_features(featurize(next.state, mdp_, features_));
    c.reward = reward.step_reward(next.state, mdp_.max_steps);
    c.terminal = next.state.terminal(mdp_);
    c.successor = std::move(next);
    expansion->push_back(std::move(c));
  }
  if (capacity_ > 0) {
    lru_.emplace_front(cache_key, expansion);
    index_.emplace(std::move(cache_key), lru_.begin());
    if (lru_.size() > capacity_) {
      index_.erase(lru_.back().first);
      lru_.pop_back();
    }
  }
  return expansion;
}

}  // namespace molforge
