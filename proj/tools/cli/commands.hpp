#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "config.hpp"
#include "molforge/environment.hpp"
#include "molforge/network.hpp"
#include "runlog.hpp"

namespace molforge::cli {

/// Environment for a finalized config. With origins, each origin is a start
/// molecule and the similarity reference of its reward.
std::unique_ptr<MoleculeEnvironment> make_environment(const RunConfig& config, const std::vector<Molecule>& origins);

struct TrainOptions {
  std::vector<Molecule> origins;
  std::optional<std::filesystem::path> resume;  // checkpoint to start from
};

struct TrainResult {
  ValueNetwork network;
  UniqueLedger ledger;
  std::string greedy_smiles;  // terminal molecule of the greedy rollout from origin 0
  double greedy_reward = 0.0;
  std::uint64_t gradient_steps = 0;
};

/// Trains into config.out_dir: config.resolved, runlog.tsv, ledger.tsv,
/// checkpoint.bin and train_summary.json. Logs written before an exception
/// stay on disk.
TrainResult train(const RunConfig& config, const TrainOptions& options, std::ostream& progress);

struct EpisodeOutcome {
  int episode = 0;
  int origin = 0;
  std::string smiles;
  double reward = 0.0;  // undiscounted reward of the terminal molecule
  double discounted_return = 0.0;
  double molecular_weight = 0.0;
  double logp = 0.0;
  double penalized_logp = 0.0;
  double property = 0.0;  // the configured reward property
  std::optional<double> similarity;   // similarity rewards only
  std::optional<double> improvement;  // penalized logP gain over the start; similarity rewards only
  std::optional<bool> success;        // target range and constrained rewards only
};

struct OriginSummary {
  int origin = 0;
  std::string smiles;
  int episodes = 0;
  std::optional<double> success_rate;
  std::optional<double> mean_similarity;
  std::optional<double> improvement_mean;
  std::optional<double> improvement_sd;
};

struct EvalSummary {
  int episodes = 0;
  std::size_t unique_molecules = 0;
  double mean_reward = 0.0;
  std::optional<double> success_rate;
  std::optional<double> mean_similarity;
  std::optional<double> improvement_mean;
  std::optional<double> improvement_sd;
  std::vector<std::pair<std::string, double>> best;  // top three unique by reward
};

struct EvalReport {
  std::string policy;
  double epsilon = 0.0;
  std::vector<EpisodeOutcome> episodes;
  std::vector<OriginSummary> origins;  // filled when evaluating per origin

  EvalSummary summary() const;
};

struct EvalOptions {
  std::string policy = "checkpoint";
  int episodes = 100;
  double epsilon = 0.0;
  bool per_origin = false;  // episode e starts at origin e mod count
  int threads = 0;          // 0: MOLFORGE_THREADS, else the hardware concurrency
};

/// Rolls episodes without learning on the head mean of `net`. Episode e uses
/// its own generator seeded from (config.seed, e), so results do not depend on
/// the thread count. Throws ArchitectureMismatch for a foreign network.
EvalReport evaluate_policy(const RunConfig& config, const std::vector<Molecule>& origins, const ValueNetwork& net,
                           const EvalOptions& options);

/// eval.tsv and eval_summary.json, plus eval_origins.tsv for per-origin runs.
void write_eval_report(const EvalReport& report, const std::filesystem::path& dir);

/// A single zero-weight linear head: action values reduce to successor rewards.
ValueNetwork zero_network(int input_dim);

/// MOLFORGE_THREADS when set to a positive integer, else the hardware concurrency.
int evaluation_threads();

/// Runs the command line (without the program name). Returns 0 on success,
/// 1 for usage or config errors and 2 for runtime errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace molforge::cli
