#pragma once

#include <cstdint>
#include <set>
#include <variant>
#include <vector>

#include "molforge/molecule.hpp"
#include "molforge/smiles.hpp"

namespace molforge {

/// Parameters of the molecule-editing MDP.
struct MdpConfig {
  std::vector<Element> elements{Element::C, Element::N, Element::O};
  ValenceTable valences;
  int max_steps = 40;
  std::set<int> allowed_ring_sizes{3, 4, 5, 6};
  bool allow_bond_removal = true;
  bool allow_no_modification = true;
  Molecule initial_molecule;

  /// Throws ConfigError when a field is outside its range.
  void validate() const;
};

/// MDP state (m, t). Terminal iff step == max_steps.
struct State {
  Molecule molecule;
  int step = 0;

  bool terminal(const MdpConfig& cfg) const noexcept { return step >= cfg.max_steps; }
};

struct AtomAddition {
  Element element;
  int anchor;  // -1 on the empty molecule
  int order;   // 0 on the empty molecule

  bool operator==(const AtomAddition&) const = default;
};

/// new_order > old_order adds bond order, new_order < old_order removes it.
struct BondChange {
  int a;
  int b;
  int old_order;
  int new_order;

  bool operator==(const BondChange&) const = default;
};

struct NoModification {
  bool operator==(const NoModification&) const = default;
};

using Edit = std::variant<AtomAddition, BondChange, NoModification>;

/// A legal edit together with its deterministic successor.
struct Action {
  Edit edit;
  Molecule successor;
  CanonicalKey key;              // canonical key of successor
  std::uint64_t parent_digest;  // Molecule::digest() of the edited molecule

  bool is_bond_addition() const;
  bool is_bond_removal() const;
};

std::vector<Action> enumerate_atom_additions(const Molecule& mol, const MdpConfig& cfg);
std::vector<Action> enumerate_bond_additions(const Molecule& mol, const MdpConfig& cfg);
std::vector<Action> enumerate_bond_removals(const Molecule& mol, const MdpConfig& cfg);

/// Union of the edit families plus "no modification", deduplicated by
/// successor key and sorted by it. Throws TerminalState on terminal states.
std::vector<Action> valid_actions(const State& state, const MdpConfig& cfg);

/// (successor, t + 1). Throws TerminalState or ForeignAction.
State apply(const State& state, const Action& action, const MdpConfig& cfg);

/// Human-readable edit description, e.g. "add O to 3 (=)".
std::string describe(const Edit& edit);

}  // namespace molforge
