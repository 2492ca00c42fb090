#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "molforge/actions.hpp"
#include "molforge/molecule.hpp"

namespace molforge {

/// Fixed-length folded bit vector of circular atom environments.
class BitFingerprint {
 public:
  BitFingerprint() = default;
  BitFingerprint(int length, int radius);

  int length() const noexcept { return length_; }
  int radius() const noexcept { return radius_; }

  bool test(std::size_t bit) const noexcept { return (words_[bit >> 6] >> (bit & 63)) & 1u; }
  void set(std::size_t bit) noexcept { words_[bit >> 6] |= std::uint64_t{1} << (bit & 63); }

  int popcount() const noexcept;
  /// Indices of set bits, ascending.
  std::vector<std::uint32_t> on_bits() const;
  const std::vector<std::uint64_t>& words() const noexcept { return words_; }

  /// Lowercase hex, most significant nibble first within each byte, bytes in
  /// bit order (bit 0 is the low bit of the first byte).
  std::string to_hex() const;

  bool operator==(const BitFingerprint&) const = default;

 private:
  int length_ = 0;
  int radius_ = 0;
  std::vector<std::uint64_t> words_;
};

/// Morgan-style circular fingerprint. Atom invariants start from (element,
/// heavy degree, bond-order sum, implicit H count, ring flag) and are rehashed
/// `radius` times with the sorted (bond order, neighbor invariant) pairs.
/// Every invariant of every iteration sets bit (invariant mod length).
/// `length` must be a power of two; radius >= 0.
BitFingerprint morgan_fingerprint(const Molecule& mol, int radius, int length);

/// |A and B| / |A or B|; 1.0 for two empty fingerprints. Throws LengthMismatch.
double tanimoto(const BitFingerprint& a, const BitFingerprint& b);

struct FingerprintSpec {
  int radius = 3;
  int length = 2048;
};

/// Network input: fingerprint bits followed by the remaining-steps fraction.
class StateFeatures {
 public:
  StateFeatures(BitFingerprint bits, double steps_remaining)
      : bits_(std::move(bits)), steps_remaining_(steps_remaining) {}

  std::size_t size() const noexcept { return static_cast<std::size_t>(bits_.length()) + 1; }
  double operator[](std::size_t i) const noexcept {
    return i < static_cast<std::size_t>(bits_.length()) ? (bits_.test(i) ? 1.0 : 0.0)
                                                        : steps_remaining_;
  }
  const BitFingerprint& bits() const noexcept { return bits_; }
  /// (T - t) / T
  double steps_remaining() const noexcept { return steps_remaining_; }
  std::vector<double> to_dense() const;

 private:
  BitFingerprint bits_;
  double steps_remaining_;
};

StateFeatures featurize(const State& state, const MdpConfig& cfg, const FingerprintSpec& fp = {});

/// 64-bit avalanche mix (splitmix64 finalizer).
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace molforge
