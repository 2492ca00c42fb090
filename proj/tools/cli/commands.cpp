#include "commands.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <functional>
#include <ostream>

#include "molforge/actions.hpp"
#include "molforge/checkpoint.hpp"
#include "molforge/error.hpp"
#include "molforge/fingerprint.hpp"
#include "molforge/properties.hpp"
#include "molforge/rings.hpp"
#include "molforge/smiles.hpp"

namespace molforge::cli {
namespace {

struct Flags {
  std::optional<std::string> config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> preset;
  std::optional<std::string> checkpoint;
  std::optional<int> episodes;
  std::optional<double> epsilon;
  std::optional<std::string> origins;
  std::optional<std::string> restart_from;
  std::optional<std::string> out_dir;
  bool per_origin = false;
  std::string baseline;
  std::vector<std::string> smiles;
  int radius = 2;
  int length = 2048;
};

/// Preset, config file, then flags; finalized.
RunConfig resolve(const Flags& f) {
  RunConfig config =
      load_config(f.config ? std::optional<std::filesystem::path>(*f.config) : std::nullopt, f.preset);
  if (f.seed) config.seed = *f.seed;
  if (f.episodes) config.train.episodes = *f.episodes;
  if (f.out_dir) config.out_dir = *f.out_dir;
  config.finalize();
  return config;
}

std::vector<Molecule> origins_of(const Flags& f, const RunConfig& config) {
  if (!f.origins) return {};
  auto out = read_smiles_file(*f.origins, config.mdp.valences);
  if (out.empty()) throw ConfigError("origin file " + *f.origins + " lists no molecules");
  return out;
}

ValueNetwork checkpoint_network(const std::string& path) { return load_checkpoint(path).network; }

void print_summary(const EvalReport& report, std::ostream& out) {
  const EvalSummary s = report.summary();
  out << "policy\t" << report.policy << "\nepisodes\t" << s.episodes << "\nunique_molecules\t" << s.unique_molecules
      << "\nmean_reward\t" << format_double(s.mean_reward) << '\n';
  if (s.success_rate) out << "success_rate\t" << format_double(*s.success_rate) << '\n';
  if (s.mean_similarity) out << "mean_similarity\t" << format_double(*s.mean_similarity) << '\n';
  if (s.improvement_mean) {
    out << "improvement\t" << format_double(*s.improvement_mean) << " +/- " << format_double(*s.improvement_sd)
        << '\n';
  }
  for (const auto& [smiles, reward] : s.best) out << "best\t" << smiles << '\t' << format_double(reward) << '\n';
}

void print_top(const UniqueLedger& ledger, std::ostream& out) {
  out << "rank\tsmiles\treward\tfirst_episode\n";
  int rank = 0;
  for (const auto& e : ledger.top(3)) {
    out << ++rank << '\t' << e.smiles << '\t' << format_double(e.best_reward) << '\t' << e.first_episode << '\n';
  }
}

int cmd_train(const Flags& f, std::ostream& out, std::ostream& err) {
  RunConfig config = resolve(f);
  TrainOptions options;
  options.origins = origins_of(f, config);
  if (f.checkpoint) options.resume = *f.checkpoint;

  if (!f.restart_from) {
    const TrainResult result = train(config, options, err);
    out << "greedy\t" << result.greedy_smiles << '\t' << format_double(result.greedy_reward) << '\n';
    print_top(result.ledger, out);
    return 0;
  }

  const auto starts = UniqueLedger::read(*f.restart_from).top(5);
  if (starts.empty()) throw ConfigError("ledger " + *f.restart_from + " is empty");
  options.origins.clear();
  const std::filesystem::path base = config.out_dir;
  for (std::size_t i = 0; i < starts.size(); ++i) {
    RunConfig run = config;
    run.initial = starts[i].smiles;
    run.out_dir = base / ("restart_" + std::to_string(i));
    run.finalize();
    err << "restart " << i << " from " << starts[i].smiles << '\n';
    const TrainResult result = train(run, options, err);
    out << "restart\t" << i << '\t' << starts[i].smiles << '\n';
    out << "greedy\t" << result.greedy_smiles << '\t' << format_double(result.greedy_reward) << '\n';
    print_top(result.ledger, out);
  }
  return 0;
}

int cmd_eval(const Flags& f, std::ostream& out) {
  const RunConfig config = resolve(f);
  const auto origins = origins_of(f, config);
  EvalOptions options;
  options.episodes = f.episodes.value_or(config.eval_episodes);
  options.epsilon = f.epsilon.value_or(0.0);
  options.per_origin = f.per_origin;
  const EvalReport report = evaluate_policy(config, origins, checkpoint_network(*f.checkpoint), options);
  write_eval_report(report, config.out_dir);
  print_summary(report, out);
  return 0;
}

int cmd_baseline(const Flags& f, std::ostream& out) {
  const RunConfig config = resolve(f);
  const auto origins = origins_of(f, config);
  EvalOptions options;
  options.policy = f.baseline;
  options.episodes = f.episodes.value_or(config.eval_episodes);
  options.per_origin = f.per_origin;
  if (f.baseline == "random") {
    options.epsilon = 1.0;
  } else if (f.baseline == "greedy") {
    options.epsilon = 0.0;
  } else {
    if (!f.epsilon) throw ConfigError("eps-greedy needs --epsilon");
    options.epsilon = *f.epsilon;
  }
  const auto env = make_environment(config, origins);
  const EvalReport report = evaluate_policy(config, origins, zero_network(env->input_dim()), options);
  write_eval_report(report, config.out_dir);
  print_summary(report, out);
  return 0;
}

int cmd_inspect(const Flags& f, std::ostream& out) {
  RunConfig config = resolve(f);
  const Molecule mol = parse_smiles(f.smiles.front(), config.mdp.valences);
  config.mdp.initial_molecule = mol;
  auto env = make_environment(config, {});
  const MoleculeState start = env->start(0);
  const auto actions = valid_actions(start.state, config.mdp);
  const auto expansion = env->expand(start);
  const RewardFunction& reward = env->reward(0);

  std::vector<double> q;
  if (f.checkpoint) {
    const ValueNetwork net = checkpoint_network(*f.checkpoint);
    if (net.input_dim() != env->input_dim()) {
      throw ArchitectureMismatch("checkpoint expects " + std::to_string(net.input_dim()) + " inputs, environment has " +
                                 std::to_string(env->input_dim()));
    }
    q = mean_action_values(net, *expansion);
    if (!q.empty()) {
      const auto [lo, hi] = std::minmax_element(q.begin(), q.end());
      const double low = *lo;
      const double span = *hi - *lo;
      for (double& v : q) v = span > 0.0 ? (v - low) / span : 0.0;
    }
  }

  out << "index\tedit\tsmiles\treward" << (f.checkpoint ? "\tq" : "") << '\n';
  for (std::size_t i = 0; i < actions.size(); ++i) {
    out << i << '\t' << describe(actions[i].edit) << '\t' << actions[i].key.text() << '\t'
        << format_double(reward.raw(actions[i].successor));
    if (f.checkpoint) out << '\t' << format_double(q[i]);
    out << '\n';
  }
  return 0;
}

int cmd_props(const Flags& f, std::ostream& out) {
  const RunConfig config = resolve(f);
  const auto registry = config.registry();
  out << "input\tsmiles\theavy_atoms\tmolecular_weight\tlogp\tpenalized_logp\trings\tring_sizes\tlong_cycles\n";
  for (const auto& text : f.smiles) {
    if (text.empty()) throw ConfigError("props needs a non-empty SMILES");
    const Molecule mol = parse_smiles(text, config.mdp.valences);
    const RingInfo rings = ring_info(mol);
    std::string sizes;
    for (int s : rings.ring_sizes) sizes += (sizes.empty() ? "" : ",") + std::to_string(s);
    out << text << '\t' << canonical_key(mol).text() << '\t' << mol.atom_count() << '\t'
        << format_double(molecular_weight(mol)) << '\t' << format_double(logp(mol, registry->logp_table())) << '\t'
        << format_double(registry->evaluate({PropertyId::PenalizedLogP, {}}, mol)) << '\t' << rings.ring_count()
        << '\t' << (sizes.empty() ? "-" : sizes) << '\t' << long_cycle_count(mol) << '\n';
  }
  return 0;
}

int cmd_sim(const Flags& f, std::ostream& out) {
  const Molecule a = parse_smiles(f.smiles.at(0));
  const Molecule b = parse_smiles(f.smiles.at(1));
  out << format_double(tanimoto(morgan_fingerprint(a, f.radius, f.length), morgan_fingerprint(b, f.radius, f.length)))
      << '\n';
  return 0;
}

int cmd_fp(const Flags& f, std::ostream& out) {
  for (const auto& text : f.smiles) {
    out << morgan_fingerprint(parse_smiles(text), f.radius, f.length).to_hex() << '\n';
  }
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Flags f;
  CLI::App app{"Molecule optimization by bootstrapped deep Q-learning over graph edits", "molforge"};
  app.require_subcommand(1);

  auto config_flags = [&f](CLI::App* cmd) {
    cmd->add_option("--config", f.config, "key=value config file")->check(CLI::ExistingFile);
    cmd->add_option("--preset", f.preset, "default set: full or desk")->check(CLI::IsMember({"full", "desk"}));
    cmd->add_option("--seed", f.seed, "random seed");
    cmd->add_option("--out-dir", f.out_dir, "output directory");
  };

  auto* train_cmd = app.add_subcommand("train", "train a value network");
  config_flags(train_cmd);
  train_cmd->add_option("--checkpoint", f.checkpoint, "resume from this checkpoint")->check(CLI::ExistingFile);
  train_cmd->add_option("--episodes", f.episodes, "training episodes")->check(CLI::NonNegativeNumber);
  train_cmd->add_option("--origins", f.origins, "file of origin SMILES, one per line")->check(CLI::ExistingFile);
  train_cmd->add_option("--restart-from", f.restart_from, "ledger whose top five molecules seed five fine-tuning runs")
      ->check(CLI::ExistingFile);

  auto* eval_cmd = app.add_subcommand("eval", "roll a trained policy without learning");
  config_flags(eval_cmd);
  eval_cmd->add_option("--checkpoint", f.checkpoint, "trained checkpoint")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--episodes", f.episodes, "evaluation episodes")->check(CLI::NonNegativeNumber);
  eval_cmd->add_option("--epsilon", f.epsilon, "exploration rate")->check(CLI::Range(0.0, 1.0));
  eval_cmd->add_option("--origins", f.origins, "file of origin SMILES")->check(CLI::ExistingFile);
  eval_cmd->add_flag("--per-origin", f.per_origin, "cycle episodes over origins and report each");

  auto* baseline_cmd = app.add_subcommand("baseline", "roll a fixed policy: random, greedy or eps-greedy");
  config_flags(baseline_cmd);
  baseline_cmd->add_option("kind", f.baseline, "random, greedy or eps-greedy")
      ->required()
      ->check(CLI::IsMember({"random", "greedy", "eps-greedy"}));
  baseline_cmd->add_option("--episodes", f.episodes, "episodes")->check(CLI::NonNegativeNumber);
  baseline_cmd->add_option("--epsilon", f.epsilon, "exploration rate for eps-greedy")->check(CLI::Range(0.0, 1.0));
  baseline_cmd->add_option("--origins", f.origins, "file of origin SMILES")->check(CLI::ExistingFile);
  baseline_cmd->add_flag("--per-origin", f.per_origin, "cycle episodes over origins and report each");

  auto* inspect_cmd = app.add_subcommand("inspect", "list the valid actions of a molecule");
  config_flags(inspect_cmd);
  inspect_cmd->add_option("smiles", f.smiles, "molecule")->required()->expected(1);
  inspect_cmd->add_option("--checkpoint", f.checkpoint, "add Q-values rescaled to [0, 1]")->check(CLI::ExistingFile);

  auto* props_cmd = app.add_subcommand("props", "print molecular properties");
  props_cmd->add_option("--config", f.config, "key=value config file")->check(CLI::ExistingFile);
  props_cmd->add_option("smiles", f.smiles, "molecules")->required();

  auto* sim_cmd = app.add_subcommand("sim", "Tanimoto similarity of two molecules");
  sim_cmd->add_option("smiles", f.smiles, "two molecules")->required()->expected(2);
  sim_cmd->add_option("--radius", f.radius, "fingerprint radius")->check(CLI::NonNegativeNumber);
  sim_cmd->add_option("--length", f.length, "fingerprint length")->check(CLI::PositiveNumber);

  auto* fp_cmd = app.add_subcommand("fp", "hex-encoded fingerprints");
  fp_cmd->add_option("smiles", f.smiles, "molecules")->required();
  fp_cmd->add_option("--radius", f.radius, "fingerprint radius")->check(CLI::NonNegativeNumber);
  fp_cmd->add_option("--length", f.length, "fingerprint length")->check(CLI::PositiveNumber);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 1;
  }

  try {
    if (train_cmd->parsed()) return cmd_train(f, out, err);
    if (eval_cmd->parsed()) return cmd_eval(f, out);
    if (baseline_cmd->parsed()) return cmd_baseline(f, out);
    if (inspect_cmd->parsed()) return cmd_inspect(f, out);
    if (props_cmd->parsed()) return cmd_props(f, out);
    if (sim_cmd->parsed()) return cmd_sim(f, out);
    if (fp_cmd->parsed()) return cmd_fp(f, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return 1;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return 1;
  } catch (const UnknownProperty& e) {
    err << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}

}  // namespace molforge::cli
