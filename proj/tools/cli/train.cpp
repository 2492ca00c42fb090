#include <nlohmann/json.hpp>
#include <ostream>

#include "commands.hpp"
#include "molforge/checkpoint.hpp"
#include "molforge/error.hpp"
#include "molforge/properties.hpp"
#include "molforge/qlearn.hpp"

namespace molforge::cli {
namespace {

constexpr double kLossSmoothing = 0.05;

void save_checkpoint_atomically(const ValueNetwork& net, const Adam& adam, const std::filesystem::path& path) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  save_checkpoint(net, adam, tmp);
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot replace " + path.string() + ": " + ec.message());
}

nlohmann::ordered_json entry_json(const LedgerEntry& e) {
  return {{"smiles", e.smiles}, {"reward", e.best_reward}, {"first_episode", e.first_episode}};
}

}  // namespace

std::unique_ptr<MoleculeEnvironment> make_environment(const RunConfig& config, const std::vector<Molecule>& origins) {
  RewardFunction reward(config.reward_spec(), config.registry());
  return std::make_unique<MoleculeEnvironment>(config.mdp, std::move(reward), origins, config.cache_capacity);
}

TrainResult train(const RunConfig& config, const TrainOptions& options, std::ostream& progress) {
  const std::filesystem::path& dir = config.out_dir;
  std::filesystem::create_directories(dir);
  write_config(config, dir / "config.resolved");

  auto env = make_environment(config, options.origins);
  Trainer<MoleculeEnvironment> trainer(*env, config.train, config.seed);
  if (options.resume) {
    const Checkpoint ck = load_checkpoint(*options.resume);
    trainer.restore(ck.network, ck.optimizer);
  }

  RunLog log(dir / "runlog.tsv");
  TrainResult result;
  std::optional<double> loss_ema;
  const auto checkpoint_path = dir / "checkpoint.bin";
  const auto ledger_path = dir / "ledger.tsv";
  const int episodes = config.train.episodes;
  for (int e = 0; e < episodes; ++e) {
    const auto record = trainer.run_episode(e);
    const MoleculeState& terminal = record.terminal();
    const double raw = env->reward(terminal.origin).raw(terminal.state.molecule);
    if (record.train_steps > 0) {
      const double loss = record.mean_loss();
      loss_ema = loss_ema ? (1.0 - kLossSmoothing) * *loss_ema + kLossSmoothing * loss : loss;
    }
    log.append({e, record.epsilon, record.head, terminal.origin, terminal.key, raw, record.discounted_return(),
                loss_ema});
    result.ledger.record(terminal.key, raw, e);

    if ((e + 1) % config.checkpoint_every == 0 && e + 1 < episodes) {
      save_checkpoint_atomically(trainer.online(), trainer.optimizer(), checkpoint_path);
      result.ledger.write(ledger_path);
      const auto best = result.ledger.top(1);
      progress << "episode " << e + 1 << '/' << episodes << "  epsilon " << format_double(record.epsilon)
               << "  unique " << result.ledger.size();
      if (!best.empty()) progress << "  best " << format_double(best[0].best_reward) << ' ' << best[0].smiles;
      progress << '\n' << std::flush;
    }
  }
  save_checkpoint_atomically(trainer.online(), trainer.optimizer(), checkpoint_path);
  result.ledger.write(ledger_path);

  std::mt19937_64 unused(0);
  const auto greedy = rollout(*env, trainer.online(), env->start(0), 0.0, unused);
  const Molecule& greedy_mol = greedy.terminal().state.molecule;
  result.greedy_smiles = greedy.terminal().key;
  result.greedy_reward = env->reward(0).raw(greedy_mol);
  result.gradient_steps = trainer.gradient_steps();
  result.network = trainer.online();

  nlohmann::ordered_json summary;
  summary["episodes"] = episodes;
  summary["seed"] = config.seed;
  summary["gradient_steps"] = result.gradient_steps;
  summary["unique_molecules"] = result.ledger.size();
  summary["greedy"] = {{"smiles", result.greedy_smiles},
                       {"reward", result.greedy_reward},
                       {"molecular_weight", molecular_weight(greedy_mol)},
                       {"penalized_logp", env->reward(0).registry().evaluate({PropertyId::PenalizedLogP, {}},
                                                                              greedy_mol)}};
  summary["top"] = nlohmann::ordered_json::array();
  for (const auto& e : result.ledger.top(3)) summary["top"].push_back(entry_json(e));
  summary["last_unique"] = nlohmann::ordered_json::array();
  for (const auto& e : result.ledger.recent(20)) summary["last_unique"].push_back(entry_json(e));
  write_file_atomically(dir / "train_summary.json", summary.dump(2) + "\n");
  return result;
}

}  // namespace molforge::cli
