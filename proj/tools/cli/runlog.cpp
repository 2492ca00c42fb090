#include "runlog.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>
#include <stdexcept>

#include "config.hpp"
#include "molforge/error.hpp"

namespace molforge::cli {

RunLog::RunLog(const std::filesystem::path& path) : out_(path, std::ios::trunc) {
  if (!out_) throw IoError("cannot write " + path.string());
  out_ << kHeader << '\n' << std::flush;
}

void RunLog::append(const RunLogRow& row) {
  if (last_episode_ && row.episode <= *last_episode_) {
    throw std::invalid_argument("run log episodes must strictly increase");
  }
  last_episode_ = row.episode;
  out_ << row.episode << '\t' << format_double(row.epsilon) << '\t' << row.head << '\t' << row.origin << '\t'
       << row.smiles << '\t' << format_double(row.reward) << '\t' << format_double(row.discounted_return) << '\t'
       << (row.loss_ema ? format_double(*row.loss_ema) : std::string("NA")) << '\n'
       << std::flush;
  if (!out_) throw IoError("failed writing run log");
}

void UniqueLedger::record(const std::string& smiles, double reward, int episode) {
  const auto [it, inserted] = index_.try_emplace(smiles, entries_.size());
  if (inserted) {
    entries_.push_back({smiles, reward, episode, episode, 1});
    return;
  }
  LedgerEntry& e = entries_[it->second];
  e.best_reward = std::max(e.best_reward, reward);
  e.last_episode = episode;
  ++e.visits;
}

std::vector<LedgerEntry> UniqueLedger::top(std::size_t n) const {
  std::vector<LedgerEntry> out = entries_;
  std::sort(out.begin(), out.end(), [](const LedgerEntry& a, const LedgerEntry& b) {
    if (a.best_reward != b.best_reward) return a.best_reward > b.best_reward;
    if (a.first_episode != b.first_episode) return a.first_episode < b.first_episode;
    return a.smiles < b.smiles;
  });
  if (out.size() > n) out.resize(n);
  return out;
}

std::vector<LedgerEntry> UniqueLedger::recent(std::size_t n) const {
  std::vector<LedgerEntry> out = entries_;
  std::sort(out.begin(), out.end(), [](const LedgerEntry& a, const LedgerEntry& b) {
    if (a.last_episode != b.last_episode) return a.last_episode > b.last_episode;
    return a.smiles < b.smiles;
  });
  if (out.size() > n) out.resize(n);
  return out;
}

void UniqueLedger::write(const std::filesystem::path& path) const {
  std::ostringstream text;
  text << kHeader << '\n';
  for (const LedgerEntry& e : entries_) {
    text << e.smiles << '\t' << format_double(e.best_reward) << '\t' << e.first_episode << '\t' << e.last_episode
         << '\t' << e.visits << '\n';
  }
  write_file_atomically(path, text.str());
}

namespace {

template <class T>
T field(const std::string& text, const std::string& where) {
  T out{};
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, out);
  if (ec != std::errc{} || ptr != end) throw ConfigError(where + ": bad field '" + text + "'");
  return out;
}

}  // namespace

UniqueLedger UniqueLedger::read(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open ledger " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != kHeader) throw ConfigError(path.string() + ": missing ledger header");
  UniqueLedger ledger;
  int number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(number);
    std::vector<std::string> cols;
    std::istringstream row(line);
    for (std::string col; std::getline(row, col, '\t');) cols.push_back(col);
    if (cols.size() != 5) throw ConfigError(where + ": expected 5 columns");
    LedgerEntry e{cols[0], field<double>(cols[1], where), field<int>(cols[2], where), field<int>(cols[3], where),
                  field<int>(cols[4], where)};
    if (!ledger.index_.try_emplace(e.smiles, ledger.entries_.size()).second) {
      throw ConfigError(where + ": duplicate molecule " + e.smiles);
    }
    ledger.entries_.push_back(std::move(e));
  }
  return ledger;
}

void write_file_atomically(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << text;
    if (!out.flush()) throw IoError("failed writing " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot replace " + path.string() + ": " + ec.message());
}

}  // namespace molforge::cli
