#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "molforge/actions.hpp"
#include "molforge/qlearn.hpp"
#include "molforge/rewards.hpp"

namespace molforge::cli {

enum class RewardKind { Maximize, TargetRange, ConstrainedLogP, MultiObjective };

struct RewardSettings {
  RewardKind kind = RewardKind::Maximize;
  PropertyKind property{PropertyId::PenalizedLogP, {}};
  double lower = 0.0;
  double upper = 0.0;
  double gamma = 0.9;
  bool per_step = true;
  std::string origin;  // SMILES
  double delta = 0.6;
  double lambda = 100.0;
  double weight = 0.5;
  std::string sa_proxy = "zero";  // zero | ring_complexity
  std::string logp_table;         // path; empty uses the built-in table
};

/// Everything a run needs. Built from preset defaults, then a key=value
/// file, then command-line overrides.
struct RunConfig {
  std::string preset = "full";
  MdpConfig mdp;
  std::string initial;  // SMILES of the start molecule
  RewardSettings reward;
  TrainConfig train;
  std::optional<std::vector<EpsilonSchedule::Breakpoint>> schedule;  // unset: anneal over half the run
  int checkpoint_every = 100;
  std::size_t cache_capacity = 20000;
  int eval_episodes = 100;
  std::filesystem::path out_dir = "molforge_out";
  std::uint64_t seed = 0;

  /// Sets one key; throws ConfigError naming unknown keys or bad values.
  void set(const std::string& key, const std::string& value);
  /// Every key with its current value, in a fixed order.
  std::vector<std::pair<std::string, std::string>> entries() const;

  /// Resolves derived fields (start molecule, schedule) and validates.
  void finalize();
  RewardSpec reward_spec() const;
  /// The origin molecule of similarity-based rewards, if any.
  std::optional<Molecule> origin_molecule() const;
  /// Registry with the configured logP table and SA proxy.
  std::shared_ptr<const PropertyRegistry> registry() const;
};

std::vector<std::string> preset_names();
/// Throws ConfigError for an unknown preset.
RunConfig preset(const std::string& name);

/// key=value lines; '#' at line start or after whitespace starts a comment. Throws IoError or ConfigError.
std::vector<std::pair<std::string, std::string>> read_key_values(const std::filesystem::path& path);

/// Preset (flag, else io.preset from the file, else "full"), then the file.
RunConfig load_config(const std::optional<std::filesystem::path>& path,
                      const std::optional<std::string>& preset_override);

void write_config(const RunConfig& config, const std::filesystem::path& path);

/// One SMILES per non-empty line; comments as in config files.
std::vector<Molecule> read_smiles_file(const std::filesystem::path& path, const ValenceTable& valences);

std::string format_double(double x);

}  // namespace molforge::cli
