#pragma once

#include <vector>

#include "molforge/molecule.hpp"

namespace molforge {

/// Ring membership and smallest-set-of-smallest-rings sizes.
struct RingInfo {
  std::vector<bool> atom_in_ring;
  std::vector<bool> bond_in_ring;  // parallel to Molecule::bonds()
  std::vector<int> ring_sizes;     // sorted ascending

  std::size_t ring_count() const noexcept { return ring_sizes.size(); }
};

/// Ring membership comes from bridge detection; ring sizes from a minimum
/// cycle basis built out of Horton candidate cycles with GF(2) elimination.
RingInfo ring_info(const Molecule& mol);

/// Only the per-atom ring flags (cheaper than the full analysis).
std::vector<bool> atoms_in_rings(const Molecule& mol);

}  // namespace molforge
