#pragma once

#include <cstdint>
#include <list>
#include <memory>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "molforge/actions.hpp"
#include "molforge/fingerprint.hpp"
#include "molforge/qlearn.hpp"
#include "molforge/rewards.hpp"

namespace molforge {

struct MoleculeState {
  State state;
  int origin = 0;   // index into the environment's origin list
  std::string key;  // canonical key of state.molecule
};

/// The molecule-editing MDP exposed to the trainer. Each origin carries its
/// own start molecule and reward function; expansions are memoized in an LRU
/// cache keyed by (origin, step, canonical key).
class MoleculeEnvironment {
 public:
  using State = MoleculeState;

  /// Without origins the single episode start is mdp.initial_molecule and the
  /// reward is used as given. With origins, each origin is both the start
  /// molecule and the similarity reference of its reward.
  MoleculeEnvironment(MdpConfig mdp, RewardFunction reward, std::vector<Molecule> origins = {},
                      std::size_t cache_capacity = 20000, FingerprintSpec features = {});

  /// Start state of a uniformly drawn origin (no draw with a single origin).
  MoleculeState reset(std::mt19937_64& rng) const;
  /// Throws IndexOutOfRange.
  MoleculeState start(int origin) const;
  bool is_terminal(const MoleculeState& s) const noexcept { return s.state.terminal(mdp_); }
  /// Throws TerminalState.
  std::shared_ptr<const Expansion<MoleculeState>> expand(const MoleculeState& s);
  int input_dim() const noexcept { return features_.length + 1; }

  const MdpConfig& mdp() const noexcept { return mdp_; }
  int origin_count() const noexcept { return static_cast<int>(starts_.size()); }
  const Molecule& origin_molecule(int origin) const { return starts_.at(static_cast<std::size_t>(origin)); }
  const RewardFunction& reward(int origin) const { return rewards_.at(static_cast<std::size_t>(origin)); }

  std::uint64_t cache_hits() const noexcept { return hits_; }
  std::uint64_t cache_misses() const noexcept { return misses_; }

 private:
  using Entry = std::pair<std::string, std::shared_ptr<const Expansion<MoleculeState>>>;

  MdpConfig mdp_;
  FingerprintSpec features_;
  std::vector<Molecule> starts_;
  std::vector<RewardFunction> rewards_;
  std::size_t capacity_;
  std::list<Entry> lru_;
  std::unordered_map<std::string, std::list<Entry>::iterator> index_;
  std::uint64_t hits_ = 0;
  std::uint64_t misses_ = 0;
};

}  // namespace molforge
