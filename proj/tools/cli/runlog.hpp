#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace molforge::cli {

struct RunLogRow {
  int episode = 0;
  double epsilon = 0.0;
  int head = 0;
  int origin = 0;
  std::string smiles;  // canonical form of the terminal molecule
  double reward = 0.0;
  double discounted_return = 0.0;
  std::optional<double> loss_ema;  // unset until the first gradient step
};

/// Tab-separated per-episode log. Every row is flushed as it is written.
class RunLog {
 public:
  static constexpr const char* kHeader = "episode\tepsilon\thead\torigin\tsmiles\treward\treturn\tloss_ema";

  /// Truncates `path` and writes the header. Throws IoError.
  explicit RunLog(const std::filesystem::path& path);

  /// Throws std::invalid_argument unless episodes strictly increase.
  void append(const RunLogRow& row);

 private:
  std::ofstream out_;
  std::optional<int> last_episode_;
};

struct LedgerEntry {
  std::string smiles;
  double best_reward = 0.0;
  int first_episode = 0;
  int last_episode = 0;
  int visits = 0;
};

/// Unique terminal molecules seen during a run, keyed by canonical SMILES.
class UniqueLedger {
 public:
  static constexpr const char* kHeader = "smiles\tbest_reward\tfirst_episode\tlast_episode\tvisits";

  void record(const std::string& smiles, double reward, int episode);

  std::size_t size() const noexcept { return entries_.size(); }
  const std::vector<LedgerEntry>& entries() const noexcept { return entries_; }
  /// Highest best reward first; ties by earlier first episode, then SMILES.
  std::vector<LedgerEntry> top(std::size_t n) const;
  /// Most recently visited first.
  std::vector<LedgerEntry> recent(std::size_t n) const;

  /// Written through a temporary file and renamed. Throws IoError.
  void write(const std::filesystem::path& path) const;
  /// Throws IoError or ConfigError on a malformed file.
  static UniqueLedger read(const std::filesystem::path& path);

 private:
  std::vector<LedgerEntry> entries_;  // first-seen order
  std::unordered_map<std::string, std::size_t> index_;
};

/// Writes `text` to a sibling temporary file, then renames it over `path`.
void write_file_atomically(const std::filesystem::path& path, const std::string& text);

}  // namespace molforge::cli
