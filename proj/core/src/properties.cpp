#include "molforge/properties.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "builtin_logp_table.hpp"  // generated from data/logp_contrib.v1.txt
#include "molforge/error.hpp"
#include "molforge/rings.hpp"

namespace molforge {
namespace {

std::string trim(std::string_view s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string_view::npos) return {};
  const auto end = s.find_last_not_of(" \t\r");
  return std::string(s.substr(begin, end - begin + 1));
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> parts;
  std::string part;
  std::istringstream in(line);
  while (std::getline(in, part, sep)) parts.push_back(trim(part));
  if (!line.empty() && line.back() == sep) parts.emplace_back();
  return parts;
}

std::optional<int> parse_field(const std::string& field, int lo, int hi, int line_no) {
  if (field == "*") return std::nullopt;
  try {
    std::size_t used = 0;
    const int value = std::stoi(field, &used);
    if (used != field.size() || value < lo || value > hi) throw std::invalid_argument(field);
    return value;
  } catch (const std::exception&) {
    throw ConfigError("logP table line " + std::to_string(line_no) + ": bad field '" + field + "'");
  }
}

int specificity(const LogPTable::Row& row) {
  return static_cast<int>(row.in_ring.has_value()) + static_cast<int>(row.hetero_bucket.has_value()) +
         static_cast<int>(row.max_bond_order.has_value());
}

}  // namespace

PropertyKind parse_property_kind(std::string_view text) {
  if (text == "mw" || text == "molecular_weight") return {PropertyId::MolecularWeight, {}};
  if (text == "logp") return {PropertyId::LogP, {}};
  if (text == "penalized_logp" || text == "plogp") return {PropertyId::PenalizedLogP, {}};
  if (text == "heavy_atoms" || text == "heavy_atom_count") return {PropertyId::HeavyAtomCount, {}};
  if (text.starts_with("custom:") && text.size() > 7) {
    return PropertyKind::custom(std::string(text.substr(7)));
  }
  throw UnknownProperty("unknown property '" + std::string(text) + "'");
}

std::string to_string(const PropertyKind& kind) {
  switch (kind.id) {
    case PropertyId::MolecularWeight: return "mw";
    case PropertyId::LogP: return "logp";
    case PropertyId::PenalizedLogP: return "penalized_logp";
    case PropertyId::HeavyAtomCount: return "heavy_atoms";
    case PropertyId::Custom: return "custom:" + kind.custom_name;
  }
  return "?";
}

std::vector<AtomTypeDescriptor> atom_type_descriptors(const Molecule& mol) {
  const std::size_t n = mol.atom_count();
  std::vector<AtomTypeDescriptor> out(n);
  const std::vector<bool> in_ring = atoms_in_rings(mol);
  std::vector<int> hetero(n, 0), max_order(n, 0);
  for (const Bond& b : mol.bonds()) {
    hetero[b.a] += is_heteroatom(mol.element(b.b));
    hetero[b.b] += is_heteroatom(mol.element(b.a));
    max_order[b.a] = std::max<int>(max_order[b.a], b.order);
    max_order[b.b] = std::max<int>(max_order[b.b], b.order);
  }
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = {mol.element(i), in_ring[i], std::min(hetero[i], 2), max_order[i]};
  }
  return out;
}

LogPTable LogPTable::parse(std::istream& in) {
  LogPTable table;
  std::string raw;
  int line_no = 0;
  bool saw_version = false;
  bool saw_hydrogen = false;
  std::vector<bool> has_fallback(kElementCount, false);
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    if (!saw_version) {
      if (line != "version=1") {
        throw ConfigError("logP table must start with 'version=1', got '" + line + "'");
      }
      saw_version = true;
      continue;
    }
    const std::vector<std::string> f = split(line, ',');
    if (f.size() != 5) {
      throw ConfigError("logP table line " + std::to_string(line_no) + ": expected 5 fields");
    }
    const auto element = element_from_symbol(f[0]);
    if (!element) {
      throw ConfigError("logP table line " + std::to_string(line_no) + ": unknown element '" + f[0] + "'");
    }
    double value = 0.0;
    try {
      std::size_t used = 0;
      value = std::stod(f[4], &used);
      if (used != f[4].size()) throw std::invalid_argument(f[4]);
    } catch (const std::exception&) {
      throw ConfigError("logP table line " + std::to_string(line_no) + ": bad contribution '" + f[4] + "'");
    }
    if (*element == Element::H) {
      table.hydrogen_ = value;
      saw_hydrogen = true;
      continue;
    }
    Row row{*element, std::nullopt, parse_field(f[2], 0, 2, line_no),
            parse_field(f[3], 0, 3, line_no), value};
    if (const auto ring = parse_field(f[1], 0, 1, line_no)) row.in_ring = *ring == 1;
    if (specificity(row) == 0) has_fallback[static_cast<std::size_t>(*element)] = true;
    table.rows_.push_back(row);
  }
  if (!saw_version) throw ConfigError("logP table is empty");
  if (!saw_hydrogen) throw ConfigError("logP table has no H row");
  for (Element e : kAllElements) {
    if (e != Element::H && !has_fallback[static_cast<std::size_t>(e)]) {
      throw ConfigError("logP table has no wildcard row for " + std::string(symbol(e)));
    }
  }
  return table;
}

LogPTable LogPTable::parse(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse(in);
}

LogPTable LogPTable::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open logP table '" + path + "'");
  return parse(in);
}

const LogPTable& LogPTable::builtin() {
  static const LogPTable table = parse(std::string_view(kBuiltinLogPTable));
  return table;
}

double LogPTable::contribution(const AtomTypeDescriptor& atom) const {
  const Row* best = nullptr;
  for (const Row& row : rows_) {
    if (row.element != atom.element) continue;
    if (row.in_ring && *row.in_ring != atom.in_ring) continue;
    if (row.hetero_bucket && *row.hetero_bucket != atom.hetero_bucket) continue;
    if (row.max_bond_order && *row.max_bond_order != atom.max_bond_order) continue;
    if (!best || specificity(row) > specificity(*best)) best = &row;
  }
  if (!best) {
    throw UncoveredAtomType("no logP contribution for element " + std::string(symbol(atom.element)));
  }
  return best->contribution;
}

double molecular_weight(const Molecule& mol) {
  double total = 0.0;
  for (const Atom& atom : mol.atoms()) total += atomic_weight(atom.element);
  return total + kHydrogenWeight * mol.total_implicit_hydrogens();
}

double logp(const Molecule& mol, const LogPTable& table) {
  std::vector<double> terms;
  terms.reserve(mol.atom_count());
  for (const AtomTypeDescriptor& d : atom_type_descriptors(mol)) terms.push_back(table.contribution(d));
  // summed in sorted order so the result does not depend on atom numbering
  std::sort(terms.begin(), terms.end());
  double total = 0.0;
  for (double t : terms) total += t;
  return total + table.hydrogen_contribution() * mol.total_implicit_hydrogens();
}

int long_cycle_count(const Molecule& mol) {
  int count = 0;
  for (int size : ring_info(mol).ring_sizes) count += size > 6;
  return count;
}

double zero_sa_proxy(const Molecule& /*mol*/) { return 0.0; }

double ring_complexity_proxy(const Molecule& mol) {
  const RingInfo rings = ring_info(mol);
  int long_cycles = 0;
  for (int size : rings.ring_sizes) long_cycles += size > 6;
  return 0.1 * static_cast<double>(rings.ring_count()) + 0.5 * long_cycles;
}

double penalized_logp(const Molecule& mol, const LogPTable& table, const PropertyCalculator& sa_proxy) {
  return logp(mol, table) - sa_proxy(mol) - long_cycle_count(mol);
}

PropertyRegistry::PropertyRegistry() : logp_table_(LogPTable::builtin()), sa_proxy_(zero_sa_proxy) {}

void PropertyRegistry::register_custom(std::string name, PropertyCalculator calculator) {
  custom_[std::move(name)] = std::move(calculator);
}

void PropertyRegistry::set_logp_table(LogPTable table) { logp_table_ = std::move(table); }

void PropertyRegistry::set_sa_proxy(PropertyCalculator proxy) { sa_proxy_ = std::move(proxy); }

bool PropertyRegistry::has(const PropertyKind& kind) const {
  return kind.id != PropertyId::Custom || custom_.contains(kind.custom_name);
}

double PropertyRegistry::evaluate(const PropertyKind& kind, const Molecule& mol) const {
  switch (kind.id) {
    case PropertyId::MolecularWeight: return molecular_weight(mol);
    case PropertyId::LogP: return logp(mol, logp_table_);
    case PropertyId::PenalizedLogP: return penalized_logp(mol, logp_table_, sa_proxy_);
    case PropertyId::HeavyAtomCount: return static_cast<double>(mol.atom_count());
    case PropertyId::Custom: {
      const auto it = custom_.find(kind.custom_name);
      if (it == custom_.end()) throw UnknownProperty("unregistered property '" + kind.custom_name + "'");
      return it->second(mol);
    }
  }
  throw UnknownProperty("unknown property kind");
}

double evaluate(const PropertyKind& kind, const Molecule& mol, const PropertyRegistry& registry) {
  return registry.evaluate(kind, mol);
}

}  // namespace molforge
