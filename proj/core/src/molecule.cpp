#include "molforge/molecule.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>

#include "molforge/error.hpp"

namespace molforge {
namespace {

constexpr std::size_t kMaxAtoms = std::numeric_limits<std::uint16_t>::max();

Bond make_bond(std::size_t a, std::size_t b, int order) {
  if (a > b) std::swap(a, b);
  return Bond{static_cast<std::uint16_t>(a), static_cast<std::uint16_t>(b),
              static_cast<std::uint8_t>(order)};
}

bool bond_less(const Bond& x, const Bond& y) {
  return x.a != y.a ? x.a < y.a : x.b < y.b;
}

}  // namespace

Molecule Molecule::from_parts(std::vector<Atom> atoms, std::vector<Bond> bonds) {
  if (atoms.size() > kMaxAtoms) throw IndexOutOfRange("too many atoms");
  Molecule m;
  m.atoms_ = std::move(atoms);
  for (const Atom& atom : m.atoms_) {
    if (atom.max_valence < 1) throw ValenceViolation("max valence must be >= 1");
  }
  for (Bond& bond : bonds) {
    if (bond.a == bond.b) throw SelfBond("bond from atom " + std::to_string(bond.a) + " to itself");
    if (bond.a >= m.atoms_.size() || bond.b >= m.atoms_.size()) {
      throw IndexOutOfRange("bond endpoint out of range");
    }
    if (bond.order < 1 || bond.order > 3) throw ValenceViolation("bond order must be 1..3");
    bond = make_bond(bond.a, bond.b, bond.order);
  }
  std::sort(bonds.begin(), bonds.end(), bond_less);
  for (std::size_t i = 1; i < bonds.size(); ++i) {
    if (bonds[i].a == bonds[i - 1].a && bonds[i].b == bonds[i - 1].b) {
      throw ValenceViolation("duplicate bond between atoms " + std::to_string(bonds[i].a) +
                             " and " + std::to_string(bonds[i].b));
    }
  }
  m.bonds_ = std::move(bonds);
  m.valence_used_.assign(m.atoms_.size(), 0);
  for (const Bond& bond : m.bonds_) {
    m.valence_used_[bond.a] += bond.order;
    m.valence_used_[bond.b] += bond.order;
  }
  for (std::size_t i = 0; i < m.atoms_.size(); ++i) {
    if (m.valence_used_[i] > m.atoms_[i].max_valence) {
      throw ValenceViolation("atom " + std::to_string(i) + " (" +
                             std::string(symbol(m.atoms_[i].element)) + ") exceeds valence " +
                             std::to_string(m.atoms_[i].max_valence));
    }
  }
  if (m.component_count() > 1) throw DisconnectedMolecule("molecule has disconnected fragments");
  return m;
}

void Molecule::check_index(std::size_t i) const {
  if (i >= atoms_.size()) {
    throw IndexOutOfRange("atom index " + std::to_string(i) + " out of range (" +
                          std::to_string(atoms_.size()) + " atoms)");
  }
}

const Atom& Molecule::atom(std::size_t i) const {
  check_index(i);
  return atoms_[i];
}

int Molecule::bond_order_sum(std::size_t i) const {
  check_index(i);
  return valence_used_[i];
}

int Molecule::free_valence(std::size_t i) const {
  check_index(i);
  return atoms_[i].max_valence - valence_used_[i];
}

int Molecule::total_implicit_hydrogens() const noexcept {
  int total = 0;
  for (std::size_t i = 0; i < atoms_.size(); ++i) total += atoms_[i].max_valence - valence_used_[i];
  return total;
}

int Molecule::degree(std::size_t i) const {
  check_index(i);
  int d = 0;
  for (const Bond& bond : bonds_) d += (bond.a == i || bond.b == i);
  return d;
}

int Molecule::bond_order(std::size_t a, std::size_t b) const {
  check_index(a);
  check_index(b);
  if (a == b) return 0;
  const Bond key = make_bond(a, b, 0);
  auto it = std::lower_bound(bonds_.begin(), bonds_.end(), key, bond_less);
  if (it != bonds_.end() && it->a == key.a && it->b == key.b) return it->order;
  return 0;
}

Molecule Molecule::add_atom(Element e, int max_valence, std::optional<std::size_t> anchor,
                            int order) const {
  if (max_valence < 1) throw ValenceViolation("max valence must be >= 1");
  if (atoms_.size() >= kMaxAtoms) throw IndexOutOfRange("too many atoms");
  Molecule out = *this;
  out.atoms_.push_back(Atom{e, static_cast<std::uint8_t>(max_valence)});
  out.valence_used_.push_back(0);
  if (!anchor) {
    if (!atoms_.empty()) {
      throw DisconnectedMolecule("an anchor atom is required on a non-empty molecule");
    }
    return out;
  }
  check_index(*anchor);
  if (order < 1 || order > 3) throw ValenceViolation("bond order must be 1..3");
  if (order > free_valence(*anchor) || order > max_valence) {
    throw ValenceViolation("not enough free valence for a bond of order " + std::to_string(order));
  }
  const std::size_t added = atoms_.size();
  const Bond bond = make_bond(*anchor, added, order);
  out.bonds_.insert(std::upper_bound(out.bonds_.begin(), out.bonds_.end(), bond, bond_less), bond);
  out.valence_used_[*anchor] += order;
  out.valence_used_[added] += order;
  out.debug_check();
  return out;
}

Molecule Molecule::set_bond(std::size_t a, std::size_t b, int order) const {
  check_index(a);
  check_index(b);
  if (a == b) throw SelfBond("bond from atom " + std::to_string(a) + " to itself");
  if (order < 0 || order > 3) throw ValenceViolation("bond order must be 0..3");
  const int old_order = bond_order(a, b);
  const int delta = order - old_order;
  if (delta > free_valence(a) || delta > free_valence(b)) {
    throw ValenceViolation("bond order " + std::to_string(order) + " exceeds free valence");
  }
  if (delta == 0) return *this;

  Molecule out = *this;
  const Bond key = make_bond(a, b, order);
  auto it = std::lower_bound(out.bonds_.begin(), out.bonds_.end(), key, bond_less);
  if (old_order == 0) {
    out.bonds_.insert(it, key);
  } else if (order == 0) {
    out.bonds_.erase(it);
  } else {
    it->order = static_cast<std::uint8_t>(order);
  }
  out.valence_used_[a] += delta;
  out.valence_used_[b] += delta;
  if (order == 0 && out.component_count() > 1) {
    throw DisconnectedMolecule("removing bond " + std::to_string(a) + "-" + std::to_string(b) +
                               " disconnects the molecule");
  }
  out.debug_check();
  return out;
}

std::optional<Molecule> Molecule::detach_bond(std::size_t a, std::size_t b) const {
  const int old_order = bond_order(a, b);
  if (old_order == 0) throw IndexOutOfRange("no bond between the given atoms");

  Molecule cut = *this;
  const Bond key = make_bond(a, b, 0);
  auto it = std::lower_bound(cut.bonds_.begin(), cut.bonds_.end(), key, bond_less);
  cut.bonds_.erase(it);
  cut.valence_used_[a] -= old_order;
  cut.valence_used_[b] -= old_order;

  const bool a_alone = cut.valence_used_[a] == 0;
  const bool b_alone = cut.valence_used_[b] == 0;
  if (a_alone && b_alone) {
    const Atom& x = atoms_[a];
    const Atom& y = atoms_[b];
    const bool keep_a =
        x.max_valence != y.max_valence
            ? x.max_valence > y.max_valence
            : atomic_weight(x.element) >= atomic_weight(y.element);
    return cut.remove_atom(keep_a ? b : a);
  }
  if (a_alone) return cut.remove_atom(a);
  if (b_alone) return cut.remove_atom(b);
  if (cut.component_count() > 1) return std::nullopt;
  cut.debug_check();
  return cut;
}

Molecule Molecule::remove_atom(std::size_t i) const {
  // Caller guarantees the atom has no bonds.
  Molecule out;
  out.atoms_ = atoms_;
  out.atoms_.erase(out.atoms_.begin() + static_cast<std::ptrdiff_t>(i));
  out.valence_used_ = valence_used_;
  out.valence_used_.erase(out.valence_used_.begin() + static_cast<std::ptrdiff_t>(i));
  out.bonds_.reserve(bonds_.size());
  for (Bond bond : bonds_) {
    if (bond.a > i) --bond.a;
    if (bond.b > i) --bond.b;
    out.bonds_.push_back(bond);
  }
  return out;
}

Adjacency Molecule::adjacency() const {
  Adjacency adj(atoms_.size());
  for (const Bond& bond : bonds_) {
    adj[bond.a].push_back({bond.b, bond.order});
    adj[bond.b].push_back({bond.a, bond.order});
  }
  return adj;
}

std::size_t Molecule::component_count() const {
  const std::size_t n = atoms_.size();
  if (n == 0) return 0;
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::size_t components = n;
  for (const Bond& bond : bonds_) {
    const std::size_t ra = find(bond.a);
    const std::size_t rb = find(bond.b);
    if (ra != rb) {
      parent[ra] = rb;
      --components;
    }
  }
  return components;
}

std::uint64_t Molecule::digest() const noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::uint64_t v) {
    h ^= v;
    h *= 0x100000001b3ULL;
  };
  mix(atoms_.size());
  for (const Atom& atom : atoms_) mix((static_cast<std::uint64_t>(atom.element) << 8) | atom.max_valence);
  for (const Bond& bond : bonds_) {
    mix((static_cast<std::uint64_t>(bond.a) << 24) | (static_cast<std::uint64_t>(bond.b) << 8) |
        bond.order);
  }
  return h;
}

void Molecule::debug_check() const {
#ifndef NDEBUG
  check_invariants();
#endif
}

void Molecule::check_invariants() const {
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    if (valence_used_[i] > atoms_[i].max_valence) throw ValenceViolation("valence exceeded");
  }
  for (std::size_t k = 1; k < bonds_.size(); ++k) {
    if (!bond_less(bonds_[k - 1], bonds_[k])) throw ValenceViolation("bond list unsorted or duplicated");
  }
  if (component_count() > 1) throw DisconnectedMolecule("disconnected");
}

std::vector<int> bfs_distances(const Adjacency& adj, int source) {
  std::vector<int> dist(adj.size(), -1);
  std::vector<int> queue;
  queue.reserve(adj.size());
  dist[source] = 0;
  queue.push_back(source);
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const int u = queue[head];
    for (const Neighbor& nb : adj[u]) {
      if (dist[nb.atom] < 0) {
        dist[nb.atom] = dist[u] + 1;
        queue.push_back(nb.atom);
      }
    }
  }
  return dist;
}

}  // namespace molforge
