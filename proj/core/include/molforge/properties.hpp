#pragma once

#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "molforge/molecule.hpp"

namespace molforge {

enum class PropertyId { MolecularWeight, LogP, PenalizedLogP, HeavyAtomCount, Custom };

struct PropertyKind {
  PropertyId id = PropertyId::MolecularWeight;
  std::string custom_name;  // only for Custom

  static PropertyKind custom(std::string name) { return {PropertyId::Custom, std::move(name)}; }
  bool operator==(const PropertyKind&) const = default;
};

/// Config spelling: "mw", "logp", "penalized_logp", "heavy_atoms" or
/// "custom:<name>". Throws UnknownProperty.
PropertyKind parse_property_kind(std::string_view text);
std::string to_string(const PropertyKind& kind);

/// Reduced atom typing used by the logP table.
struct AtomTypeDescriptor {
  Element element;
  bool in_ring;
  int hetero_bucket;   // 0, 1, 2 (two or more attached heteroatoms)
  int max_bond_order;  // 0 for an isolated atom

  bool operator==(const AtomTypeDescriptor&) const = default;
};

std::vector<AtomTypeDescriptor> atom_type_descriptors(const Molecule& mol);

/// Per-atom-type logP contributions, loaded from the line format
/// `element,in_ring,hetero_bucket,max_bond_order,contribution` with `*`
/// wildcards, `#` comments and a leading `version=1` line.
class LogPTable {
 public:
  struct Row {
    Element element;
    std::optional<bool> in_ring;
    std::optional<int> hetero_bucket;
    std::optional<int> max_bond_order;
    double contribution;
  };

  /// Throws ConfigError on malformed input or when some heavy element has no
  /// wildcard fallback row.
  static LogPTable parse(std::istream& in);
  static LogPTable parse(std::string_view text);
  static LogPTable load(const std::string& path);
  /// The table shipped in data/logp_contrib.v1.txt, compiled in.
  static const LogPTable& builtin();

  /// Throws UncoveredAtomType when no row matches.
  double contribution(const AtomTypeDescriptor& atom) const;
  double hydrogen_contribution() const noexcept { return hydrogen_; }
  const std::vector<Row>& rows() const noexcept { return rows_; }

 private:
  std::vector<Row> rows_;
  double hydrogen_ = 0.0;
};

using PropertyCalculator = std::function<double(const Molecule&)>;

double molecular_weight(const Molecule& mol);
double logp(const Molecule& mol, const LogPTable& table = LogPTable::builtin());
/// Rings of the smallest set of smallest rings with more than six atoms.
int long_cycle_count(const Molecule& mol);

/// Synthetic-accessibility stand-ins. The default is the constant zero; the
/// ring proxy (0.1 per ring + 0.5 per long cycle) is an experimental choice,
/// not a synthetic accessibility score.
double zero_sa_proxy(const Molecule& mol);
double ring_complexity_proxy(const Molecule& mol);

/// logP - sa_proxy - long_cycle_count.
double penalized_logp(const Molecule& mol, const LogPTable& table = LogPTable::builtin(),
                      const PropertyCalculator& sa_proxy = zero_sa_proxy);

/// Dispatch table for PropertyKind. Populate once at startup; read-only
/// (and therefore thread-safe) afterwards.
class PropertyRegistry {
 public:
  PropertyRegistry();

  void register_custom(std::string name, PropertyCalculator calculator);
  void set_logp_table(LogPTable table);
  void set_sa_proxy(PropertyCalculator proxy);

  bool has(const PropertyKind& kind) const;
  /// Throws UnknownProperty for unregistered custom names.
  double evaluate(const PropertyKind& kind, const Molecule& mol) const;

  const LogPTable& logp_table() const noexcept { return logp_table_; }
  const PropertyCalculator& sa_proxy() const noexcept { return sa_proxy_; }

 private:
  LogPTable logp_table_;
  PropertyCalculator sa_proxy_;
  std::map<std::string, PropertyCalculator, std::less<>> custom_;
};

double evaluate(const PropertyKind& kind, const Molecule& mol, const PropertyRegistry& registry);

}  // namespace molforge
