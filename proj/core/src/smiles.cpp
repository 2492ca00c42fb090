#include "molforge/smiles.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <optional>

#include "molforge/error.hpp"

namespace molforge {

// ---------------------------------------------------------------------------
// Reader

namespace {

bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }
bool is_lower(char c) { return c >= 'a' && c <= 'z'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

class SmilesReader {
 public:
  SmilesReader(std::string_view text, const ValenceTable& valences)
      : text_(text), valences_(valences) {}

  Molecule read() {
    while (pos_ < text_.size()) step();
    if (pending_order_) fail(pending_pos_, "bond symbol without a following atom");
    if (!branches_.empty()) fail(branches_.back().pos, "unclosed branch");
    if (!open_rings_.empty()) {
      fail(open_rings_.begin()->second.pos,
           "unclosed ring bond " + std::to_string(open_rings_.begin()->first));
    }
    try {
      return Molecule::from_parts(std::move(atoms_), std::move(bonds_));
    } catch (const Error& e) {
      fail(text_.size(), e.what());
    }
  }

 private:
  struct Branch {
    int atom;
    std::size_t pos;
    std::size_t atoms_at_open;
  };
  struct OpenRing {
    int atom;
    int order;  // 0 = unspecified
    std::size_t pos;
  };

  [[noreturn]] void fail(std::size_t pos, const std::string& message) const {
    throw ParseError(pos, message);
  }

  void step() {
    const char c = text_[pos_];
    if (is_upper(c)) {
      read_atom();
    } else if (is_lower(c)) {
      fail(pos_, "aromatic atoms unsupported; supply Kekulé form");
    } else if (c == '-' || c == '=' || c == '#') {
      if (prev_ < 0) fail(pos_, "bond symbol without a preceding atom");
      if (pending_order_) fail(pos_, "consecutive bond symbols");
      pending_order_ = c == '-' ? 1 : (c == '=' ? 2 : 3);
      pending_pos_ = pos_++;
    } else if (c == '(') {
      if (prev_ < 0) fail(pos_, "branch without a preceding atom");
      if (pending_order_) fail(pos_, "bond symbol before a branch");
      branches_.push_back({prev_, pos_, atoms_.size()});
      ++pos_;
    } else if (c == ')') {
      if (branches_.empty()) fail(pos_, "unmatched ')'");
      if (pending_order_) fail(pending_pos_, "bond symbol without a following atom");
      if (branches_.back().atoms_at_open == atoms_.size()) fail(pos_, "empty branch");
      prev_ = branches_.back().atom;
      branches_.pop_back();
      ++pos_;
    } else if (is_digit(c) || c == '%') {
      read_ring_bond();
    } else if (c == '[') {
      fail(pos_, "bracket atoms unsupported (charges, isotopes, explicit H)");
    } else if (c == '.') {
      fail(pos_, "disconnected fragments unsupported");
    } else if (c == '/' || c == '\\' || c == '@') {
      fail(pos_, "stereochemistry unsupported");
    } else if (c == '+') {
      fail(pos_, "charges unsupported");
    } else if (c == ':') {
      fail(pos_, "aromatic bonds unsupported; supply Kekulé form");
    } else if (c == '$') {
      fail(pos_, "quadruple bonds unsupported");
    } else {
      fail(pos_, "unexpected character");
    }
  }

  void read_atom() {
    const std::size_t start = pos_;
    std::optional<Element> element;
    std::size_t len = 1;
    const char c = text_[pos_];
    const char next = pos_ + 1 < text_.size() ? text_[pos_ + 1] : '\0';
    if (c == 'C' && next == 'l') {
      element = Element::Cl;
      len = 2;
    } else if (c == 'B' && next == 'r') {
      element = Element::Br;
      len = 2;
    } else if (c == 'C' || c == 'N' || c == 'O' || c == 'F' || c == 'P' || c == 'S' ||
               c == 'I') {
      element = element_from_symbol(text_.substr(pos_, 1));
    } else if (c == 'B') {
      fail(pos_, "boron unsupported");
    } else if (c == 'H') {
      fail(pos_, "explicit hydrogens unsupported");
    } else {
      fail(pos_, "unsupported element");
    }
    pos_ += len;

    const int index = static_cast<int>(atoms_.size());
    const int valence = valences_.max_valence(*element);
    atoms_.push_back(Atom{*element, static_cast<std::uint8_t>(valence)});
    used_.push_back(0);
    if (prev_ >= 0) {
      add_bond(prev_, index, pending_order_ ? pending_order_ : 1, start);
    } else if (index > 0) {
      fail(start, "disconnected fragments unsupported");
    }
    pending_order_ = 0;
    prev_ = index;
  }

  void read_ring_bond() {
    const std::size_t start = pos_;
    if (prev_ < 0) fail(pos_, "ring bond without a preceding atom");
    int label = 0;
    if (text_[pos_] == '%') {
      if (pos_ + 2 >= text_.size() || !is_digit(text_[pos_ + 1]) || !is_digit(text_[pos_ + 2])) {
        fail(pos_, "'%' must be followed by two digits");
      }
      label = (text_[pos_ + 1] - '0') * 10 + (text_[pos_ + 2] - '0');
      pos_ += 3;
    } else {
      label = text_[pos_] - '0';
      ++pos_;
    }
    auto it = open_rings_.find(label);
    if (it == open_rings_.end()) {
      open_rings_[label] = {prev_, pending_order_, start};
    } else {
      const OpenRing ring = it->second;
      open_rings_.erase(it);
      if (ring.atom == prev_) fail(start, "ring bond from an atom to itself");
      int order = ring.order ? ring.order : (pending_order_ ? pending_order_ : 1);
      if (ring.order && pending_order_ && ring.order != pending_order_) {
        fail(start, "conflicting ring bond orders");
      }
      add_bond(ring.atom, prev_, order, start);
    }
    pending_order_ = 0;
  }

  void add_bond(int a, int b, int order, std::size_t pos) {
    for (const Bond& bond : bonds_) {
      if ((bond.a == a && bond.b == b) || (bond.a == b && bond.b == a)) {
        fail(pos, "duplicate bond between the same atoms");
      }
    }
    for (int atom : {a, b}) {
      if (used_[atom] + order > atoms_[atom].max_valence) {
        fail(pos, "valence exceeded for " + std::string(symbol(atoms_[atom].element)) +
                      " (max " + std::to_string(atoms_[atom].max_valence) + ")");
      }
    }
    used_[a] += order;
    used_[b] += order;
    bonds_.push_back(Bond{static_cast<std::uint16_t>(a), static_cast<std::uint16_t>(b),
                          static_cast<std::uint8_t>(order)});
  }

  std::string_view text_;
  const ValenceTable& valences_;
  std::size_t pos_ = 0;
  int prev_ = -1;
  int pending_order_ = 0;
  std::size_t pending_pos_ = 0;
  std::vector<Atom> atoms_;
  std::vector<int> used_;
  std::vector<Bond> bonds_;
  std::vector<Branch> branches_;
  std::map<int, OpenRing> open_rings_;
};

}  // namespace

Molecule parse_smiles(std::string_view text, const ValenceTable& valences) {
  return SmilesReader(text, valences).read();
}

// ---------------------------------------------------------------------------
// Canonical labeling and writer

namespace {

constexpr int kMaxDegree = 8;

// Scratch buffers reused across calls on the same thread.
struct Workspace {
  // graph (CSR, neighbors ascending by atom index)
  int n = 0;
  std::vector<int> offset, nbr, order, edge;
  std::vector<std::uint64_t> invariant;
  // refinement
  std::vector<std::array<std::uint32_t, kMaxDegree>> sig;
  std::vector<int> idx, next, seen;
  // search: one rank vector per depth
  std::vector<std::vector<int>> levels;
  std::vector<int> cell_members, tried;
  // emission
  std::vector<int> by_rank, parent, visit, ring_atom, ring_owner, ring_order, ring_count,
      ring_offset, ring_events, label_of_edge, stack_atom, stack_pos;
  std::vector<char> visited, edge_closed, ring_opening, in_use, stack_paren;
  std::string candidate, best;
  std::vector<int> best_order;
  bool have_best = false;
};

void build_graph(const Molecule& mol, Workspace& w) {
  const int n = static_cast<int>(mol.atom_count());
  w.n = n;
  w.offset.assign(n + 1, 0);
  for (const Bond& b : mol.bonds()) {
    ++w.offset[b.a + 1];
    ++w.offset[b.b + 1];
  }
  for (int i = 0; i < n; ++i) w.offset[i + 1] += w.offset[i];
  const int slots = w.offset[n];
  w.nbr.resize(slots);
  w.order.resize(slots);
  w.edge.resize(slots);
  w.idx.assign(w.offset.begin(), w.offset.end() - 1);  // fill cursor
  // Bonds are sorted by (a, b), so every list comes out ascending.
  int e = 0;
  for (const Bond& b : mol.bonds()) {
    int& ca = w.idx[b.a];
    w.nbr[ca] = b.b;
    w.order[ca] = b.order;
    w.edge[ca++] = e;
    int& cb = w.idx[b.b];
    w.nbr[cb] = b.a;
    w.order[cb] = b.order;
    w.edge[cb++] = e;
    ++e;
  }
  w.invariant.resize(n);
  for (int i = 0; i < n; ++i) {
    const Atom& atom = mol.atoms()[i];
    w.invariant[i] = (static_cast<std::uint64_t>(atom.element) << 32) |
                     (static_cast<std::uint64_t>(atom.max_valence) << 24) |
                     (static_cast<std::uint64_t>(w.offset[i + 1] - w.offset[i]) << 16) |
                     static_cast<std::uint64_t>(mol.bond_order_sum(i));
  }
}

// Ranks: rank[i] = number of atoms in strictly smaller classes.
int count_classes(const std::vector<int>& rank, std::vector<int>& seen) {
  seen.assign(rank.size(), 0);
  int classes = 0;
  for (int r : rank) {
    if (!seen[r]) {
      seen[r] = 1;
      ++classes;
    }
  }
  return classes;
}

class Canonicalizer {
 public:
  Canonicalizer(const Molecule& mol, Workspace& ws) : mol_(mol), w_(ws) { build_graph(mol, w_); }

  std::string run(std::vector<int>* order_out) {
    const int n = w_.n;
    if (n == 0) return {};
    w_.have_best = false;
    if (w_.levels.empty()) w_.levels.emplace_back();
    std::vector<int>& rank = w_.levels[0];
    rank.resize(n);
    w_.idx.resize(n);
    for (int i = 0; i < n; ++i) w_.idx[i] = i;
    std::sort(w_.idx.begin(), w_.idx.end(),
              [&](int x, int y) { return w_.invariant[x] < w_.invariant[y]; });
    for (int k = 0; k < n; ++k) {
      const int i = w_.idx[k];
      rank[i] = (k > 0 && w_.invariant[i] == w_.invariant[w_.idx[k - 1]]) ? rank[w_.idx[k - 1]] : k;
    }
    search(0);
    if (order_out) *order_out = w_.best_order;
    return w_.best;
  }

 private:
  void refine(std::vector<int>& rank) {
    const int n = w_.n;
    int classes = count_classes(rank, w_.seen);
    if (classes == n) return;
    w_.sig.resize(n);
    w_.idx.resize(n);
    w_.next.resize(n);
    while (true) {
      for (int i = 0; i < n; ++i) {
        auto& s = w_.sig[i];
        s.fill(0xffffffffu);
        int len = 0;
        for (int k = w_.offset[i]; k < w_.offset[i + 1] && len < kMaxDegree; ++k) {
          s[len++] = static_cast<std::uint32_t>(rank[w_.nbr[k]]) * 4u +
                     static_cast<std::uint32_t>(w_.order[k]);
        }
        std::sort(s.begin(), s.begin() + len);
        w_.idx[i] = i;
      }
      std::sort(w_.idx.begin(), w_.idx.end(), [&](int x, int y) {
        if (rank[x] != rank[y]) return rank[x] < rank[y];
        return w_.sig[x] < w_.sig[y];
      });
      for (int k = 0; k < n; ++k) {
        const int i = w_.idx[k];
        const int p = k > 0 ? w_.idx[k - 1] : -1;
        w_.next[i] = (p >= 0 && rank[p] == rank[i] && w_.sig[p] == w_.sig[i]) ? w_.next[p] : k;
      }
      const int next_classes = count_classes(w_.next, w_.seen);
      rank.swap(w_.next);
      if (next_classes == classes || next_classes == n) return;
      classes = next_classes;
    }
  }

  // Same labeled neighborhood and not bonded to each other.
  bool twins(int u, int v) const {
    const int du = w_.offset[u + 1] - w_.offset[u];
    if (du != w_.offset[v + 1] - w_.offset[v]) return false;
    for (int k = 0; k < du; ++k) {
      const int ku = w_.offset[u] + k;
      const int kv = w_.offset[v] + k;
      if (w_.nbr[ku] == v || w_.nbr[ku] != w_.nbr[kv] || w_.order[ku] != w_.order[kv]) return false;
    }
    return true;
  }

  void search(std::size_t depth) {
    refine(w_.levels[depth]);
    const int n = w_.n;
    int target = -1;
    {
      std::vector<int>& size = w_.seen;
      size.assign(n, 0);
      for (int r : w_.levels[depth]) ++size[r];
      for (int r = 0; r < n; ++r) {
        if (size[r] > 1) {
          target = r;
          break;
        }
      }
    }
    if (target < 0) {
      emit(w_.levels[depth]);
      if (!w_.have_best || w_.candidate < w_.best) {
        w_.best.swap(w_.candidate);
        w_.best_order = w_.visit;
        w_.have_best = true;
      }
      return;
    }
    if (w_.levels.size() <= depth + 1) w_.levels.emplace_back();
    std::vector<int> members;
    for (int i = 0; i < n; ++i) {
      if (w_.levels[depth][i] == target) members.push_back(i);
    }
    std::vector<int> tried;
    for (int v : members) {
      // Swapping non-adjacent twins is an automorphism fixing the partition.
      if (std::any_of(tried.begin(), tried.end(), [&](int u) { return twins(u, v); })) continue;
      tried.push_back(v);
      std::vector<int>& child = w_.levels[depth + 1];
      child = w_.levels[depth];
      for (int u : members) {
        if (u != v) child[u] = target + 1;
      }
      search(depth + 1);
    }
  }

  static void append_label(std::string& out, int label) {
    if (label < 10) {
      out.push_back(static_cast<char>('0' + label));
    } else {
      out.push_back('%');
      out.push_back(static_cast<char>('0' + label / 10));
      out.push_back(static_cast<char>('0' + label % 10));
    }
  }

  static char bond_char(int order) { return order == 2 ? '=' : (order == 3 ? '#' : '\0'); }

  void emit_atom(int u) {
    std::string& out = w_.candidate;
    out += symbol(mol_.atoms()[u].element);
    int freed[kMaxDegree];
    int nfreed = 0;
    for (int k = w_.ring_offset[u]; k < w_.ring_offset[u + 1]; ++k) {
      const int ev = w_.ring_events[k];
      const int e = w_.ring_atom[ev];
      if (w_.ring_opening[ev]) {
        int label = 1;
        while (label < 100 && w_.in_use[label]) ++label;
        if (label >= 100) throw Error("too many simultaneously open rings to write SMILES");
        w_.in_use[label] = 1;
        w_.label_of_edge[e] = label;
        if (const char bc = bond_char(w_.ring_order[ev])) out.push_back(bc);
        append_label(out, label);
      } else {
        append_label(out, w_.label_of_edge[e]);
        freed[nfreed++] = w_.label_of_edge[e];
      }
    }
    for (int i = 0; i < nfreed; ++i) w_.in_use[freed[i]] = 0;
  }

  // Writes the SMILES for a discrete partition into w_.candidate and the atom
  // visit order into w_.visit.
  void emit(const std::vector<int>& rank) {
    const int n = w_.n;
    const int slots = w_.offset[n];
    const int bonds = slots / 2;
    // neighbor slots of each atom, ordered by rank
    w_.by_rank.resize(slots);
    for (int i = 0; i < n; ++i) {
      const int lo = w_.offset[i], hi = w_.offset[i + 1];
      for (int k = lo; k < hi; ++k) {
        int j = k;
        while (j > lo && rank[w_.nbr[w_.by_rank[j - 1]]] > rank[w_.nbr[k]]) {
          w_.by_rank[j] = w_.by_rank[j - 1];
          --j;
        }
        w_.by_rank[j] = k;
      }
    }
    int start = 0;
    for (int i = 0; i < n; ++i) {
      if (rank[i] < rank[start]) start = i;
    }

    // pass 1: DFS spanning tree; ring events in encounter order
    w_.visited.assign(n, 0);
    w_.parent.assign(n, -1);
    w_.edge_closed.assign(bonds, 0);
    w_.ring_atom.clear();  // holds the bond id of each event
    w_.ring_owner.clear();
    w_.ring_order.clear();
    w_.ring_opening.clear();
    w_.ring_count.assign(n + 1, 0);
    w_.visit.clear();
    w_.stack_atom.assign(1, start);
    w_.stack_pos.assign(1, w_.offset[start]);
    w_.visited[start] = 1;
    w_.visit.push_back(start);
    while (!w_.stack_atom.empty()) {
      const int u = w_.stack_atom.back();
      int& pos = w_.stack_pos.back();
      if (pos == w_.offset[u + 1]) {
        w_.stack_atom.pop_back();
        w_.stack_pos.pop_back();
        continue;
      }
      const int slot = w_.by_rank[pos++];
      const int v = w_.nbr[slot];
      const int e = w_.edge[slot];
      if (v == w_.parent[u]) continue;
      if (w_.visited[v]) {
        if (w_.edge_closed[e]) continue;
        w_.edge_closed[e] = 1;
        // opening at the ancestor v, closing at u
        for (int side = 0; side < 2; ++side) {
          w_.ring_atom.push_back(e);
          w_.ring_order.push_back(w_.order[slot]);
          w_.ring_opening.push_back(side == 0);
          w_.ring_owner.push_back(side == 0 ? v : u);
          ++w_.ring_count[(side == 0 ? v : u) + 1];
        }
        continue;
      }
      w_.visited[v] = 1;
      w_.parent[v] = u;
      w_.visit.push_back(v);
      w_.stack_atom.push_back(v);
      w_.stack_pos.push_back(w_.offset[v]);
    }
    w_.ring_offset.assign(n + 1, 0);
    for (int i = 0; i < n; ++i) w_.ring_offset[i + 1] = w_.ring_offset[i] + w_.ring_count[i + 1];
    w_.ring_events.resize(w_.ring_owner.size());
    {
      std::vector<int>& cursor = w_.seen;
      cursor.assign(w_.ring_offset.begin(), w_.ring_offset.end() - 1);
      for (std::size_t ev = 0; ev < w_.ring_owner.size(); ++ev) {
        w_.ring_events[cursor[w_.ring_owner[ev]]++] = static_cast<int>(ev);
      }
    }

    // pass 2: text
    std::string& out = w_.candidate;
    out.clear();
    w_.label_of_edge.assign(bonds, 0);
    w_.in_use.assign(100, 0);
    w_.stack_atom.assign(1, start);
    w_.stack_pos.assign(1, w_.offset[start]);
    w_.stack_paren.assign(1, 0);
    emit_atom(start);
    while (!w_.stack_atom.empty()) {
      const int u = w_.stack_atom.back();
      int& pos = w_.stack_pos.back();
      while (pos < w_.offset[u + 1] && w_.parent[w_.nbr[w_.by_rank[pos]]] != u) ++pos;
      if (pos == w_.offset[u + 1]) {
        if (w_.stack_paren.back()) out.push_back(')');
        w_.stack_atom.pop_back();
        w_.stack_pos.pop_back();
        w_.stack_paren.pop_back();
        continue;
      }
      const int slot = w_.by_rank[pos++];
      int more = pos;
      while (more < w_.offset[u + 1] && w_.parent[w_.nbr[w_.by_rank[more]]] != u) ++more;
      const bool last = more == w_.offset[u + 1];
      if (!last) out.push_back('(');
      if (const char bc = bond_char(w_.order[slot])) out.push_back(bc);
      const int v = w_.nbr[slot];
      emit_atom(v);
      w_.stack_atom.push_back(v);
      w_.stack_pos.push_back(w_.offset[v]);
      w_.stack_paren.push_back(!last);
    }
  }

  const Molecule& mol_;
  Workspace& w_;
};

Workspace& workspace() {
  thread_local Workspace ws;
  return ws;
}

}  // namespace

std::string write_smiles(const Molecule& mol) { return Canonicalizer(mol, workspace()).run(nullptr); }

CanonicalKey canonical_key(const Molecule& mol) { return CanonicalKey(write_smiles(mol)); }

std::vector<int> canonical_order(const Molecule& mol) {
  std::vector<int> order;
  Canonicalizer(mol, workspace()).run(&order);
  return order;
}

}  // namespace molforge
