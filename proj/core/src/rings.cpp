#include "molforge/rings.hpp"

#include <algorithm>
#include <cstdint>

namespace molforge {
namespace {

struct IndexedAdjacency {
  // neighbor atom and bond index
  std::vector<std::vector<std::pair<int, int>>> nbrs;
};

IndexedAdjacency indexed_adjacency(const Molecule& mol) {
  IndexedAdjacency g;
  g.nbrs.resize(mol.atom_count());
  const auto bonds = mol.bonds();
  for (std::size_t k = 0; k < bonds.size(); ++k) {
    g.nbrs[bonds[k].a].push_back({bonds[k].b, static_cast<int>(k)});
    g.nbrs[bonds[k].b].push_back({bonds[k].a, static_cast<int>(k)});
  }
  return g;
}

// Tarjan low-link; a bond is in a ring iff it is not a bridge.
std::vector<bool> non_bridge_bonds(const Molecule& mol, const IndexedAdjacency& g) {
  const int n = static_cast<int>(mol.atom_count());
  std::vector<bool> in_ring(mol.bond_count(), true);
  std::vector<int> disc(n, -1), low(n, 0);
  int timer = 0;
  struct Frame {
    int atom;
    int parent_bond;
    std::size_t next;
  };
  std::vector<Frame> stack;
  for (int root = 0; root < n; ++root) {
    if (disc[root] >= 0) continue;
    disc[root] = low[root] = timer++;
    stack.push_back({root, -1, 0});
    while (!stack.empty()) {
      Frame& f = stack.back();
      if (f.next < g.nbrs[f.atom].size()) {
        const auto [to, bond] = g.nbrs[f.atom][f.next++];
        if (bond == f.parent_bond) continue;
        if (disc[to] < 0) {
          disc[to] = low[to] = timer++;
          stack.push_back({to, bond, 0});
        } else {
          low[f.atom] = std::min(low[f.atom], disc[to]);
        }
      } else {
        const Frame done = f;
        stack.pop_back();
        if (!stack.empty()) {
          Frame& up = stack.back();
          low[up.atom] = std::min(low[up.atom], low[done.atom]);
          if (low[done.atom] > disc[up.atom]) in_ring[done.parent_bond] = false;
        }
      }
    }
  }
  return in_ring;
}

using EdgeSet = std::vector<std::uint64_t>;

// Minimum cycle basis sizes. Candidates are Horton cycles: for every root v
// and every bond (x, y), the union of the BFS-tree paths v->x, v->y and the
// bond itself, kept when the two paths share only v.
std::vector<int> minimum_cycle_basis_sizes(const Molecule& mol, const IndexedAdjacency& g,
                                           const std::vector<bool>& bond_in_ring) {
  const int n = static_cast<int>(mol.atom_count());
  const int m = static_cast<int>(mol.bond_count());
  const int cyclomatic = m - n + static_cast<int>(mol.component_count());
  if (cyclomatic <= 0) return {};
  const std::size_t words = (static_cast<std::size_t>(m) + 63) / 64;
  const auto bonds = mol.bonds();

  struct Candidate {
    int size;
    EdgeSet edges;
  };
  std::vector<Candidate> candidates;

  std::vector<int> dist(n), parent_atom(n), parent_bond(n), branch(n);
  for (int root = 0; root < n; ++root) {
    std::fill(dist.begin(), dist.end(), -1);
    std::vector<int> queue{root};
    dist[root] = 0;
    parent_atom[root] = parent_bond[root] = -1;
    branch[root] = -1;
    for (std::size_t h = 0; h < queue.size(); ++h) {
      const int u = queue[h];
      for (const auto& [w, bond] : g.nbrs[u]) {
        if (!bond_in_ring[bond] || dist[w] >= 0) continue;
        dist[w] = dist[u] + 1;
        parent_atom[w] = u;
        parent_bond[w] = bond;
        branch[w] = (u == root) ? w : branch[u];
        queue.push_back(w);
      }
    }
    for (int k = 0; k < m; ++k) {
      if (!bond_in_ring[k]) continue;
      const int x = bonds[k].a;
      const int y = bonds[k].b;
      if (dist[x] < 0 || dist[y] < 0) continue;
      if (parent_bond[x] == k || parent_bond[y] == k) continue;
      // paths must meet only at the root
      if (x != root && y != root && branch[x] == branch[y]) continue;
      EdgeSet edges(words, 0);
      auto mark = [&](int bond) { edges[bond / 64] |= (std::uint64_t{1} << (bond % 64)); };
      mark(k);
      for (int a = x; a != root; a = parent_atom[a]) mark(parent_bond[a]);
      for (int a = y; a != root; a = parent_atom[a]) mark(parent_bond[a]);
      candidates.push_back({dist[x] + dist[y] + 1, std::move(edges)});
    }
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate& p, const Candidate& q) { return p.size < q.size; });

  // Greedy selection of linearly independent cycles over GF(2).
  std::vector<EdgeSet> basis;  // reduced rows
  std::vector<int> pivots;
  std::vector<int> sizes;
  for (const Candidate& c : candidates) {
    EdgeSet v = c.edges;
    for (std::size_t r = 0; r < basis.size(); ++r) {
      const int p = pivots[r];
      if (v[p / 64] & (std::uint64_t{1} << (p % 64))) {
        for (std::size_t w = 0; w < words; ++w) v[w] ^= basis[r][w];
      }
    }
    int pivot = -1;
    for (std::size_t w = 0; w < words && pivot < 0; ++w) {
      if (v[w]) pivot = static_cast<int>(w * 64 + static_cast<std::size_t>(__builtin_ctzll(v[w])));
    }
    if (pivot < 0) continue;
    // keep basis fully reduced on pivot columns
    for (std::size_t r = 0; r < basis.size(); ++r) {
      if (basis[r][pivot / 64] & (std::uint64_t{1} << (pivot % 64))) {
        for (std::size_t w = 0; w < words; ++w) basis[r][w] ^= v[w];
      }
    }
    basis.push_back(std::move(v));
    pivots.push_back(pivot);
    sizes.push_back(c.size);
    if (static_cast<int>(sizes.size()) == cyclomatic) break;
  }
  std::sort(sizes.begin(), sizes.end());
  return sizes;
}

}  // namespace

RingInfo ring_info(const Molecule& mol) {
  RingInfo info;
  const IndexedAdjacency g = indexed_adjacency(mol);
  info.bond_in_ring = non_bridge_bonds(mol, g);
  info.atom_in_ring.assign(mol.atom_count(), false);
  const auto bonds = mol.bonds();
  for (std::size_t k = 0; k < bonds.size(); ++k) {
    if (info.bond_in_ring[k]) {
      info.atom_in_ring[bonds[k].a] = true;
      info.atom_in_ring[bonds[k].b] = true;
    }
  }
  info.ring_sizes = minimum_cycle_basis_sizes(mol, g, info.bond_in_ring);
  return info;
}

std::vector<bool> atoms_in_rings(const Molecule& mol) {
  const IndexedAdjacency g = indexed_adjacency(mol);
  const std::vector<bool> bond_in_ring = non_bridge_bonds(mol, g);
  std::vector<bool> atom_in_ring(mol.atom_count(), false);
  const auto bonds = mol.bonds();
  for (std::size_t k = 0; k < bonds.size(); ++k) {
    if (bond_in_ring[k]) atom_in_ring[bonds[k].a] = atom_in_ring[bonds[k].b] = true;
  }
  return atom_in_ring;
}

}  // namespace molforge
