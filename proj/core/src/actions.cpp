#include "molforge/actions.hpp"

#include <algorithm>
#include <string>
#include <unordered_set>

#include "molforge/error.hpp"
#include "molforge/rings.hpp"

namespace molforge {
namespace {

// Appends an action unless its successor key was already produced.
class ActionSink {
 public:
  explicit ActionSink(const Molecule& parent) : digest_(parent.digest()) {}

  void add(Edit edit, Molecule successor) {
    CanonicalKey key = canonical_key(successor);
    if (!seen_.insert(key.text()).second) return;
    actions_.push_back(Action{edit, std::move(successor), std::move(key), digest_});
  }

  std::vector<Action> take() && { return std::move(actions_); }

 private:
  std::uint64_t digest_;
  std::unordered_set<std::string> seen_;
  std::vector<Action> actions_;
};

}  // namespace

void MdpConfig::validate() const {
  if (max_steps < 1) throw ConfigError("max_steps must be >= 1");
  if (elements.empty()) throw ConfigError("element set must not be empty");
  for (int size : allowed_ring_sizes) {
    if (size < 3 || size > 8) throw ConfigError("allowed ring sizes must lie in [3, 8]");
  }
}

bool Action::is_bond_addition() const {
  const auto* change = std::get_if<BondChange>(&edit);
  return change && change->new_order > change->old_order;
}

bool Action::is_bond_removal() const {
  const auto* change = std::get_if<BondChange>(&edit);
  return change && change->new_order < change->old_order;
}

std::vector<Action> enumerate_atom_additions(const Molecule& mol, const MdpConfig& cfg) {
  ActionSink sink(mol);
  for (Element e : cfg.elements) {
    const int valence = cfg.valences.max_valence(e);
    if (mol.empty()) {
      sink.add(AtomAddition{e, -1, 0}, mol.add_atom(e, valence, std::nullopt, 0));
      continue;
    }
    for (std::size_t anchor = 0; anchor < mol.atom_count(); ++anchor) {
      const int limit = std::min({mol.free_valence(anchor), valence, 3});
      for (int order = 1; order <= limit; ++order) {
        sink.add(AtomAddition{e, static_cast<int>(anchor), order},
                 mol.add_atom(e, valence, anchor, order));
      }
    }
  }
  return std::move(sink).take();
}

std::vector<Action> enumerate_bond_additions(const Molecule& mol, const MdpConfig& cfg) {
  ActionSink sink(mol);
  const int n = static_cast<int>(mol.atom_count());
  if (n < 2) return std::move(sink).take();
  std::vector<int> free(n);
  for (int i = 0; i < n; ++i) free[i] = mol.free_valence(i);
  const std::vector<bool> in_ring = atoms_in_rings(mol);
  const Adjacency adj = mol.adjacency();

  for (int a = 0; a < n; ++a) {
    if (free[a] == 0) continue;
    std::vector<int> dist;  // computed lazily, only needed for new bonds
    for (int b = a + 1; b < n; ++b) {
      if (free[b] == 0) continue;
      const int old_order = mol.bond_order(a, b);
      if (old_order == 0) {
        if (in_ring[a] && in_ring[b]) continue;
        if (dist.empty()) dist = bfs_distances(adj, a);
        const int ring_size = dist[b] + 1;
        if (!cfg.allowed_ring_sizes.contains(ring_size)) continue;
      }
      for (int order = old_order + 1; order <= 3; ++order) {
        const int delta = order - old_order;
        if (delta > free[a] || delta > free[b]) break;
        sink.add(BondChange{a, b, old_order, order}, mol.set_bond(a, b, order));
      }
    }
  }
  return std::move(sink).take();
}

std::vector<Action> enumerate_bond_removals(const Molecule& mol, const MdpConfig& /*cfg*/) {
  ActionSink sink(mol);
  for (const Bond& bond : mol.bonds()) {
    for (int order = bond.order - 1; order >= 0; --order) {
      const BondChange change{bond.a, bond.b, bond.order, order};
      if (order > 0) {
        sink.add(change, mol.set_bond(bond.a, bond.b, order));
      } else if (auto cut = mol.detach_bond(bond.a, bond.b)) {
        sink.add(change, std::move(*cut));
      }
    }
  }
  return std::move(sink).take();
}

std::vector<Action> valid_actions(const State& state, const MdpConfig& cfg) {
  if (state.terminal(cfg)) throw TerminalState("no actions from a terminal state");
  const Molecule& mol = state.molecule;

  std::vector<Action> all = enumerate_atom_additions(mol, cfg);
  auto append = [&all](std::vector<Action> more) {
    all.insert(all.end(), std::make_move_iterator(more.begin()), std::make_move_iterator(more.end()));
  };
  append(enumerate_bond_additions(mol, cfg));
  if (cfg.allow_bond_removal) append(enumerate_bond_removals(mol, cfg));
  if (cfg.allow_no_modification) {
    all.push_back(Action{NoModification{}, mol, canonical_key(mol), mol.digest()});
  }

  std::stable_sort(all.begin(), all.end(),
                   [](const Action& x, const Action& y) { return x.key < y.key; });
  all.erase(std::unique(all.begin(), all.end(),
                        [](const Action& x, const Action& y) { return x.key == y.key; }),
            all.end());
  return all;
}

State apply(const State& state, const Action& action, const MdpConfig& cfg) {
  if (state.terminal(cfg)) throw TerminalState("cannot act on a terminal state");
  if (action.parent_digest != state.molecule.digest()) {
    throw ForeignAction("action was not generated for this molecule");
  }
  return State{action.successor, state.step + 1};
}

std::string describe(const Edit& edit) {
  auto bond_text = [](int order) {
    switch (order) {
      case 0: return std::string("none");
      case 1: return std::string("single");
      case 2: return std::string("double");
      default: return std::string("triple");
    }
  };
  if (const auto* add = std::get_if<AtomAddition>(&edit)) {
    if (add->anchor < 0) return "add " + std::string(symbol(add->element));
    return "add " + std::string(symbol(add->element)) + " to atom " + std::to_string(add->anchor) +
           " (" + bond_text(add->order) + ")";
  }
  if (const auto* change = std::get_if<BondChange>(&edit)) {
    return std::string(change->new_order > change->old_order ? "bond+ " : "bond- ") +
           std::to_string(change->a) + "-" + std::to_string(change->b) + " " +
           bond_text(change->old_order) + "->" + bond_text(change->new_order);
  }
  return "no modification";
}

}  // namespace molforge
