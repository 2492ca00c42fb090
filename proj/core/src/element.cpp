#include "molforge/element.hpp"

#include <string>

#include "molforge/error.hpp"

namespace molforge {
namespace {

struct ElementData {
  std::string_view symbol;
  double weight;
  int valence;
};

// IUPAC conventional atomic weights.
constexpr std::array<ElementData, kElementCount> kElementData = {{
    {"H", 1.008, 1},
    {"C", 12.011, 4},
    {"N", 14.007, 3},
    {"O", 15.999, 2},
    {"F", 18.998, 1},
    {"P", 30.974, 3},
    {"S", 32.06, 2},
    {"Cl", 35.45, 1},
    {"Br", 79.904, 1},
    {"I", 126.904, 1},
}};

}  // namespace

std::string_view symbol(Element e) noexcept {
  return kElementData[static_cast<std::size_t>(e)].symbol;
}

std::optional<Element> element_from_symbol(std::string_view s) noexcept {
  for (std::size_t i = 0; i < kElementCount; ++i) {
    if (kElementData[i].symbol == s) return static_cast<Element>(i);
  }
  return std::nullopt;
}

double atomic_weight(Element e) noexcept {
  return kElementData[static_cast<std::size_t>(e)].weight;
}

int default_max_valence(Element e) noexcept {
  return kElementData[static_cast<std::size_t>(e)].valence;
}

ValenceTable::ValenceTable() {
  for (std::size_t i = 0; i < kElementCount; ++i) {
    values_[i] = static_cast<std::uint8_t>(kElementData[i].valence);
  }
}

const ValenceTable& ValenceTable::defaults() {
  static const ValenceTable table;
  return table;
}

void ValenceTable::set(Element e, int valence) {
  if (valence < 1 || valence > 8) {
    throw ConfigError("max valence for " + std::string(symbol(e)) +
                      " must be in [1, 8], got " + std::to_string(valence));
  }
  values_[static_cast<std::size_t>(e)] = static_cast<std::uint8_t>(valence);
}

}  // namespace molforge
