#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "molforge/element.hpp"

namespace molforge {

struct Atom {
  Element element;
  std::uint8_t max_valence;

  bool operator==(const Atom&) const = default;
};

/// Bond record; endpoints are stored with a < b.
struct Bond {
  std::uint16_t a;
  std::uint16_t b;
  std::uint8_t order;  // 1..3

  bool operator==(const Bond&) const = default;
};

struct Neighbor {
  int atom;
  int order;
};

/// Per-atom neighbor lists, built on demand from a Molecule.
using Adjacency = std::vector<std::vector<Neighbor>>;

/// Undirected heavy-atom graph with bond orders and implicit hydrogens.
///
/// Molecules are immutable values: every edit returns a new Molecule. The
/// invariants (no self bonds, one record per pair, valence sums within each
/// atom's max valence, at most one connected component) are checked by every
/// factory and edit.
class Molecule {
 public:
  /// The empty molecule.
  Molecule() = default;

  /// Validating factory. Bonds may be listed in any order and with either
  /// endpoint first.
  static Molecule from_parts(std::vector<Atom> atoms, std::vector<Bond> bonds);

  std::size_t atom_count() const noexcept { return atoms_.size(); }
  std::size_t bond_count() const noexcept { return bonds_.size(); }
  bool empty() const noexcept { return atoms_.empty(); }

  std::span<const Atom> atoms() const noexcept { return atoms_; }
  std::span<const Bond> bonds() const noexcept { return bonds_; }

  const Atom& atom(std::size_t i) const;
  Element element(std::size_t i) const { return atom(i).element; }

  /// Sum of incident bond orders.
  int bond_order_sum(std::size_t i) const;
  /// max_valence - bond_order_sum; equals the implicit hydrogen count.
  int free_valence(std::size_t i) const;
  int implicit_hydrogens(std::size_t i) const { return free_valence(i); }
  int total_implicit_hydrogens() const noexcept;
  int degree(std::size_t i) const;

  /// 0 when the atoms are not bonded.
  int bond_order(std::size_t a, std::size_t b) const;

  /// Adds an atom bonded to `anchor` with the given order; on the empty
  /// molecule `anchor` must be empty and the atom is added alone.
  Molecule add_atom(Element e, int max_valence, std::optional<std::size_t> anchor,
                    int order) const;

  /// Replaces the order of bond (a, b). Order 0 deletes the record, which is
  /// only legal when the molecule stays connected.
  Molecule set_bond(std::size_t a, std::size_t b, int order) const;

  /// Deletes bond (a, b) entirely. If that leaves a single-atom fragment the
  /// lone atom is deleted too; if both fragments are single atoms, the atom
  /// with the larger max valence (then the heavier one) is kept. Returns
  /// nullopt when a multi-atom fragment would split off.
  std::optional<Molecule> detach_bond(std::size_t a, std::size_t b) const;

  Adjacency adjacency() const;
  std::size_t component_count() const;

  /// Hash of the exact representation (not isomorphism invariant).
  std::uint64_t digest() const noexcept;

  bool operator==(const Molecule&) const = default;

 private:
  Molecule remove_atom(std::size_t i) const;
  void check_index(std::size_t i) const;
  void check_invariants() const;
  void debug_check() const;

  std::vector<Atom> atoms_;
  std::vector<std::uint8_t> valence_used_;
  std::vector<Bond> bonds_;  // sorted by (a, b)
};

/// Free-function spellings of the core edits.
inline Molecule new_empty() { return Molecule{}; }
inline int free_valence(const Molecule& mol, std::size_t atom) {
  return mol.free_valence(atom);
}
inline Molecule set_bond(const Molecule& mol, std::size_t a, std::size_t b, int order) {
  return mol.set_bond(a, b, order);
}

/// Breadth-first shortest-path lengths (in bonds) from `source`; -1 if unreachable.
std::vector<int> bfs_distances(const Adjacency& adj, int source);

}  // namespace molforge
