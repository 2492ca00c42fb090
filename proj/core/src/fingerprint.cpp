#include "molforge/fingerprint.hpp"

#include <algorithm>
#include <bit>

#include "molforge/error.hpp"
#include "molforge/rings.hpp"

namespace molforge {
namespace {

// Hash of a word sequence; the sequence length is folded in first so that
// tuples of different arity never collide trivially.
std::uint64_t hash_words(const std::uint64_t* words, std::size_t count) {
  std::uint64_t h = mix64(count);
  for (std::size_t i = 0; i < count; ++i) h = mix64(h ^ words[i]);
  return h;
}

}  // namespace

BitFingerprint::BitFingerprint(int length, int radius)
    : length_(length), radius_(radius), words_((static_cast<std::size_t>(length) + 63) / 64, 0) {}

int BitFingerprint::popcount() const noexcept {
  int total = 0;
  for (std::uint64_t w : words_) total += std::popcount(w);
  return total;
}

std::vector<std::uint32_t> BitFingerprint::on_bits() const {
  std::vector<std::uint32_t> bits;
  for (std::size_t w = 0; w < words_.size(); ++w) {
    std::uint64_t word = words_[w];
    while (word) {
      bits.push_back(static_cast<std::uint32_t>(w * 64 + static_cast<std::size_t>(std::countr_zero(word))));
      word &= word - 1;
    }
  }
  return bits;
}

std::string BitFingerprint::to_hex() const {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  const std::size_t bytes = (static_cast<std::size_t>(length_) + 7) / 8;
  out.reserve(bytes * 2);
  for (std::size_t i = 0; i < bytes; ++i) {
    const auto byte = static_cast<unsigned>((words_[i / 8] >> ((i % 8) * 8)) & 0xffu);
    out.push_back(kDigits[byte >> 4]);
    out.push_back(kDigits[byte & 0xf]);
  }
  return out;
}

BitFingerprint morgan_fingerprint(const Molecule& mol, int radius, int length) {
  if (radius < 0) throw ConfigError("fingerprint radius must be >= 0");
  if (length <= 0 || !std::has_single_bit(static_cast<unsigned>(length))) {
    throw ConfigError("fingerprint length must be a power of two");
  }
  BitFingerprint fp(length, radius);
  const std::size_t n = mol.atom_count();
  if (n == 0) return fp;

  const Adjacency adj = mol.adjacency();
  const std::vector<bool> in_ring = atoms_in_rings(mol);
  const std::uint64_t mask = static_cast<std::uint64_t>(length) - 1;

  std::vector<std::uint64_t> inv(n), next(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t tuple[5] = {
        static_cast<std::uint64_t>(mol.element(i)), adj[i].size(),
        static_cast<std::uint64_t>(mol.bond_order_sum(i)),
        static_cast<std::uint64_t>(mol.implicit_hydrogens(i)), in_ring[i] ? 1u : 0u};
    inv[i] = hash_words(tuple, 5);
    fp.set(inv[i] & mask);
  }

  std::vector<std::uint64_t> words;
  std::vector<std::pair<std::uint64_t, std::uint64_t>> env;
  for (int iteration = 1; iteration <= radius; ++iteration) {
    for (std::size_t i = 0; i < n; ++i) {
      env.clear();
      for (const Neighbor& nb : adj[i]) env.push_back({static_cast<std::uint64_t>(nb.order), inv[nb.atom]});
      std::sort(env.begin(), env.end());
      words.clear();
      words.push_back(static_cast<std::uint64_t>(iteration));
      words.push_back(inv[i]);
      for (const auto& [order, neighbor] : env) {
        words.push_back(order);
        words.push_back(neighbor);
      }
      next[i] = hash_words(words.data(), words.size());
      fp.set(next[i] & mask);
    }
    inv.swap(next);
  }
  return fp;
}

double tanimoto(const BitFingerprint& a, const BitFingerprint& b) {
  if (a.length() != b.length()) {
    throw LengthMismatch("fingerprint lengths differ: " + std::to_string(a.length()) + " vs " +
                         std::to_string(b.length()));
  }
  int na = 0, nb = 0, nc = 0;
  const auto& wa = a.words();
  const auto& wb = b.words();
  for (std::size_t i = 0; i < wa.size(); ++i) {
    na += std::popcount(wa[i]);
    nb += std::popcount(wb[i]);
    nc += std::popcount(wa[i] & wb[i]);
  }
  if (na + nb == 0) return 1.0;
  return static_cast<double>(nc) / static_cast<double>(na + nb - nc);
}

std::vector<double> StateFeatures::to_dense() const {
  std::vector<double> dense(size(), 0.0);
  for (std::uint32_t bit : bits_.on_bits()) dense[bit] = 1.0;
  dense.back() = steps_remaining_;
  return dense;
}

StateFeatures featurize(const State& state, const MdpConfig& cfg, const FingerprintSpec& fp) {
  const double remaining =
      static_cast<double>(cfg.max_steps - state.step) / static_cast<double>(cfg.max_steps);
  return StateFeatures(morgan_fingerprint(state.molecule, fp.radius, fp.length), remaining);
}

}  // namespace molforge
