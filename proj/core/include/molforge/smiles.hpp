#pragma once

#include <compare>
#include <functional>
#include <string>
#include <string_view>

#include "molforge/molecule.hpp"

namespace molforge {

/// Reads the restricted Kekulé SMILES dialect:
///
///   atoms     C N O F P S Cl Br I
///   bonds     - = #
///   branches  ( ... )
///   rings     1-9 and %nn, optionally preceded by a bond symbol
///
/// Everything else (aromatic lowercase atoms, brackets, charges, isotopes,
/// stereo marks, dots) is rejected with a ParseError. The empty string reads
/// as the empty molecule.
Molecule parse_smiles(std::string_view text,
                      const ValenceTable& valences = ValenceTable::defaults());

/// Canonical SMILES: identical for isomorphic inputs, and re-parses to a
/// graph isomorphic to `mol`. The empty molecule writes as "".
std::string write_smiles(const Molecule& mol);

/// Isomorphism-invariant identity of a molecule (its canonical SMILES).
class CanonicalKey {
 public:
  CanonicalKey() = default;
  explicit CanonicalKey(std::string text) : text_(std::move(text)) {}

  const std::string& text() const noexcept { return text_; }

  auto operator<=>(const CanonicalKey&) const = default;
  bool operator==(const CanonicalKey&) const = default;

 private:
  std::string text_;
};

CanonicalKey canonical_key(const Molecule& mol);

/// Canonical atom order: position i holds the atom emitted i-th in the
/// canonical SMILES.
std::vector<int> canonical_order(const Molecule& mol);

}  // namespace molforge

template <>
struct std::hash<molforge::CanonicalKey> {
  std::size_t operator()(const molforge::CanonicalKey& k) const noexcept {
    return std::hash<std::string>{}(k.text());
  }
};
