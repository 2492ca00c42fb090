#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <map>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>
#include <thread>

#include "commands.hpp"
#include "molforge/error.hpp"
#include "molforge/properties.hpp"
#include "molforge/qlearn.hpp"

namespace molforge::cli {
namespace {

std::mt19937_64 episode_rng(std::uint64_t seed, int episode) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(episode)};
  return std::mt19937_64(seq);
}

struct Moments {
  double mean = 0.0;
  double sd = 0.0;
};

Moments moments(const std::vector<double>& xs) {
  Moments m;
  if (xs.empty()) return m;
  for (double x : xs) m.mean += x;
  m.mean /= static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - m.mean) * (x - m.mean);
    m.sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  return m;
}

std::optional<double> rate(const std::vector<const EpisodeOutcome*>& items) {
  int flagged = 0;
  int hits = 0;
  for (const auto* o : items) {
    if (!o->success) continue;
    ++flagged;
    hits += *o->success ? 1 : 0;
  }
  if (flagged == 0) return std::nullopt;
  return static_cast<double>(hits) / flagged;
}

std::optional<double> mean_of(const std::vector<const EpisodeOutcome*>& items,
                              std::optional<double> EpisodeOutcome::*field) {
  std::vector<double> xs;
  for (const auto* o : items) {
    if (o->*field) xs.push_back(*(o->*field));
  }
  if (xs.empty()) return std::nullopt;
  return moments(xs).mean;
}

std::optional<double> sd_of(const std::vector<const EpisodeOutcome*>& items,
                            std::optional<double> EpisodeOutcome::*field) {
  std::vector<double> xs;
  for (const auto* o : items) {
    if (o->*field) xs.push_back(*(o->*field));
  }
  if (xs.empty()) return std::nullopt;
  return moments(xs).sd;
}

std::string optional_text(const std::optional<double>& x) { return x ? format_double(*x) : std::string("NA"); }

nlohmann::ordered_json optional_json(const std::optional<double>& x) {
  return x ? nlohmann::ordered_json(*x) : nlohmann::ordered_json(nullptr);
}

EpisodeOutcome describe_episode(const RunConfig& config, const MoleculeEnvironment& env,
                                const EpisodeRecord<MoleculeState>& record, int episode) {
  const MoleculeState& terminal = record.terminal();
  const Molecule& mol = terminal.state.molecule;
  const RewardFunction& reward = env.reward(terminal.origin);
  const PropertyRegistry& registry = reward.registry();
  EpisodeOutcome o;
  o.episode = episode;
  o.origin = terminal.origin;
  o.smiles = terminal.key;
  o.reward = reward.raw(mol);
  o.discounted_return = record.discounted_return();
  o.molecular_weight = molecular_weight(mol);
  o.logp = logp(mol, registry.logp_table());
  o.penalized_logp = registry.evaluate({PropertyId::PenalizedLogP, {}}, mol);
  o.property = registry.evaluate(config.reward.property, mol);
  if (reward.spec().origin() != nullptr) {
    o.similarity = reward.similarity(mol);
    o.improvement = o.penalized_logp - registry.evaluate({PropertyId::PenalizedLogP, {}}, record.start.state.molecule);
  }
  switch (config.reward.kind) {
    case RewardKind::TargetRange:
      o.success = o.property >= config.reward.lower && o.property <= config.reward.upper;
      break;
    case RewardKind::ConstrainedLogP: o.success = *o.similarity >= config.reward.delta; break;
    default: break;
  }
  return o;
}

}  // namespace

ValueNetwork zero_network(int input_dim) { return ValueNetwork({input_dim}, 1); }

int evaluation_threads() {
  if (const char* text = std::getenv("MOLFORGE_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(text, &end, 10);
    if (end != text && *end == '\0' && n > 0) return static_cast<int>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

EvalReport evaluate_policy(const RunConfig& config, const std::vector<Molecule>& origins, const ValueNetwork& net,
                           const EvalOptions& options) {
  if (options.episodes < 0) throw ConfigError("episode count must be non-negative");
  if (!(options.epsilon >= 0.0 && options.epsilon <= 1.0)) throw ConfigError("epsilon must be in [0, 1]");

  EvalReport report;
  report.policy = options.policy;
  report.epsilon = options.epsilon;
  report.episodes.resize(static_cast<std::size_t>(options.episodes));

  const int threads = std::max(1, std::min(options.threads > 0 ? options.threads : evaluation_threads(),
                                           std::max(1, options.episodes)));
  std::vector<std::unique_ptr<MoleculeEnvironment>> envs;
  for (int w = 0; w < threads; ++w) envs.push_back(make_environment(config, origins));
  if (net.input_dim() != envs.front()->input_dim()) {
    throw ArchitectureMismatch("network expects " + std::to_string(net.input_dim()) + " inputs, environment has " +
                               std::to_string(envs.front()->input_dim()));
  }

  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));
  auto work = [&](int w) {
    try {
      MoleculeEnvironment& env = *envs[static_cast<std::size_t>(w)];
      for (int e = w; e < options.episodes; e += threads) {
        std::mt19937_64 rng = episode_rng(config.seed, e);
        const MoleculeState start = options.per_origin ? env.start(e % env.origin_count()) : env.reset(rng);
        const auto record = rollout(env, net, start, options.epsilon, rng);
        report.episodes[static_cast<std::size_t>(e)] = describe_episode(config, env, record, e);
      }
    } catch (...) {
      errors[static_cast<std::size_t>(w)] = std::current_exception();
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  for (const auto& error : errors) {
    if (error) std::rethrow_exception(error);
  }

  if (options.per_origin) {
    const MoleculeEnvironment& env = *envs.front();
    std::map<int, std::vector<const EpisodeOutcome*>> groups;
    for (const auto& o : report.episodes) groups[o.origin].push_back(&o);
    for (const auto& [origin, items] : groups) {
      OriginSummary s;
      s.origin = origin;
      s.smiles = canonical_key(env.origin_molecule(origin)).text();
      s.episodes = static_cast<int>(items.size());
      s.success_rate = rate(items);
      s.mean_similarity = mean_of(items, &EpisodeOutcome::similarity);
      s.improvement_mean = mean_of(items, &EpisodeOutcome::improvement);
      s.improvement_sd = sd_of(items, &EpisodeOutcome::improvement);
      report.origins.push_back(std::move(s));
    }
  }
  return report;
}

EvalSummary EvalReport::summary() const {
  EvalSummary s;
  s.episodes = static_cast<int>(episodes.size());
  std::vector<const EpisodeOutcome*> items;
  std::map<std::string, double> best;
  for (const auto& o : episodes) {
    items.push_back(&o);
    s.mean_reward += o.reward;
    auto [it, inserted] = best.try_emplace(o.smiles, o.reward);
    if (!inserted) it->second = std::max(it->second, o.reward);
  }
  if (!episodes.empty()) s.mean_reward /= static_cast<double>(episodes.size());
  s.unique_molecules = best.size();
  s.success_rate = rate(items);
  s.mean_similarity = mean_of(items, &EpisodeOutcome::similarity);
  s.improvement_mean = mean_of(items, &EpisodeOutcome::improvement);
  s.improvement_sd = sd_of(items, &EpisodeOutcome::improvement);
  s.best.assign(best.begin(), best.end());
  std::stable_sort(s.best.begin(), s.best.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  if (s.best.size() > 3) s.best.resize(3);
  return s;
}

void write_eval_report(const EvalReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::ostringstream tsv;
  tsv << "episode\torigin\tsmiles\treward\treturn\tmolecular_weight\tlogp\tpenalized_logp\tproperty\tsimilarity"
         "\timprovement\tsuccess\n";
  for (const auto& o : report.episodes) {
    tsv << o.episode << '\t' << o.origin << '\t' << o.smiles << '\t' << format_double(o.reward) << '\t'
        << format_double(o.discounted_return) << '\t' << format_double(o.molecular_weight) << '\t'
        << format_double(o.logp) << '\t' << format_double(o.penalized_logp) << '\t' << format_double(o.property)
        << '\t' << optional_text(o.similarity) << '\t' << optional_text(o.improvement) << '\t'
        << (o.success ? (*o.success ? "1" : "0") : "NA") << '\n';
  }
  write_file_atomically(dir / "eval.tsv", tsv.str());

  const EvalSummary s = report.summary();
  nlohmann::ordered_json j;
  j["policy"] = report.policy;
  j["epsilon"] = report.epsilon;
  j["episodes"] = s.episodes;
  j["unique_molecules"] = s.unique_molecules;
  j["mean_reward"] = s.mean_reward;
  j["success_rate"] = optional_json(s.success_rate);
  j["mean_similarity"] = optional_json(s.mean_similarity);
  j["improvement_mean"] = optional_json(s.improvement_mean);
  j["improvement_sd"] = optional_json(s.improvement_sd);
  j["best"] = nlohmann::ordered_json::array();
  for (const auto& [smiles, reward] : s.best) j["best"].push_back({{"smiles", smiles}, {"reward", reward}});
  if (!report.origins.empty()) {
    j["per_origin"] = nlohmann::ordered_json::array();
    std::ostringstream origins;
    origins << "origin\tsmiles\tepisodes\tsuccess_rate\tmean_similarity\timprovement_mean\timprovement_sd\n";
    for (const auto& o : report.origins) {
      j["per_origin"].push_back({{"origin", o.origin},
                                 {"smiles", o.smiles},
                                 {"episodes", o.episodes},
                                 {"success_rate", optional_json(o.success_rate)},
                                 {"mean_similarity", optional_json(o.mean_similarity)},
                                 {"improvement_mean", optional_json(o.improvement_mean)},
                                 {"improvement_sd", optional_json(o.improvement_sd)}});
      origins << o.origin << '\t' << o.smiles << '\t' << o.episodes << '\t' << optional_text(o.success_rate) << '\t'
              << optional_text(o.mean_similarity) << '\t' << optional_text(o.improvement_mean) << '\t'
              << optional_text(o.improvement_sd) << '\n';
    }
    write_file_atomically(dir / "eval_origins.tsv", origins.str());
  }
  write_file_atomically(dir / "eval_summary.json", j.dump(2) + "\n");
}

}  // namespace molforge::cli
