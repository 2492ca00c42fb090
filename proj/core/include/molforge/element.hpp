#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

namespace molforge {

/// Elements supported by the molecule model. Hydrogens are normally implicit.
enum class Element : std::uint8_t { H, C, N, O, F, P, S, Cl, Br, I };

inline constexpr std::size_t kElementCount = 10;

inline constexpr std::array<Element, kElementCount> kAllElements = {
    Element::H, Element::C,  Element::N,  Element::O,  Element::F,
    Element::P, Element::S, Element::Cl, Element::Br, Element::I};

std::string_view symbol(Element e) noexcept;
std::optional<Element> element_from_symbol(std::string_view s) noexcept;

/// Standard atomic weight in daltons.
double atomic_weight(Element e) noexcept;

int default_max_valence(Element e) noexcept;

/// True for everything except carbon and hydrogen.
constexpr bool is_heteroatom(Element e) noexcept {
  return e != Element::C && e != Element::H;
}

inline constexpr double kHydrogenWeight = 1.008;

/// Per-element maximum valence. Defaults follow the common organic valences;
/// entries can be overridden (e.g. hexavalent sulfur).
class ValenceTable {
 public:
  ValenceTable();

  static const ValenceTable& defaults();

  int max_valence(Element e) const noexcept {
    return values_[static_cast<std::size_t>(e)];
  }
  /// Throws ConfigError unless 1 <= valence <= 8.
  void set(Element e, int valence);

  bool operator==(const ValenceTable&) const = default;

 private:
  std::array<std::uint8_t, kElementCount> values_;
};

}  // namespace molforge
