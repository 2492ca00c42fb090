// Acceptance suite: one PASS/FAIL line per criterion.

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <unordered_set>

#include "chain_env.hpp"
#include "commands.hpp"
#include "config.hpp"
#include "molforge/actions.hpp"
#include "molforge/exploration.hpp"
#include "molforge/fingerprint.hpp"
#include "molforge/network.hpp"
#include "molforge/properties.hpp"
#include "molforge/smiles.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace molforge;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

struct Options {
  int mw_seeds = 10;
  fs::path work_dir;
  fs::path config_dir = MOLFORGE_CONFIG_DIR;
};

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fixed(double x, int digits = 3) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(digits);
  s << x;
  return s.str();
}

MdpConfig mdp_over(std::vector<Element> elements, int max_steps) {
  MdpConfig cfg;
  cfg.elements = std::move(elements);
  cfg.max_steps = max_steps;
  return cfg;
}

cli::RunConfig load(const Options& opt, const std::string& name) {
  return cli::load_config(opt.config_dir / name, std::nullopt);
}

double sim2(const Molecule& a, const Molecule& b) {
  return tanimoto(morgan_fingerprint(a, 2, 2048), morgan_fingerprint(b, 2, 2048));
}

// 1 ------------------------------------------------------------------------
Verdict validity(const Options&) {
  Stopwatch clock;
  const MdpConfig cfg = mdp_over({Element::C, Element::N, Element::O}, 40);
  std::mt19937_64 rng(1);
  long states = 0;
  long violations = 0;
  for (int episode = 0; episode < 10000; ++episode) {
    State s{Molecule{}, 0};
    while (!s.terminal(cfg)) {
      const auto actions = valid_actions(s, cfg);
      s = apply(s, actions[std::uniform_int_distribution<std::size_t>(0, actions.size() - 1)(rng)], cfg);
      const auto raw = testing::to_raw(s.molecule);
      ++states;
      if (!testing::raw_valence_ok(raw) || testing::raw_components(raw).size() > 1) ++violations;
    }
  }
  const double t = clock.seconds();
  return {violations == 0 && t <= 120.0, "10000 episodes, " + std::to_string(states) + " states, " +
                                             std::to_string(violations) + " violations, " + fixed(t, 1) + " s"};
}

// 2 ------------------------------------------------------------------------
Verdict enumeration_oracle(const Options&) {
  Stopwatch clock;
  const MdpConfig cfg = mdp_over({Element::C, Element::O}, 40);
  std::unordered_set<std::string> seen{canonical_key(Molecule{}).text()};
  std::deque<std::pair<Molecule, int>> frontier{{Molecule{}, 0}};
  int checked = 0;
  int mismatched = 0;
  while (!frontier.empty()) {
    auto [mol, depth] = frontier.front();
    frontier.pop_front();
    const auto actions = valid_actions({mol, 0}, cfg);
    std::set<std::string> actual;
    for (const auto& a : actions) actual.insert(a.key.text());
    ++checked;
    if (actual != testing::oracle_successor_keys(mol, cfg)) ++mismatched;
    if (depth == 3) continue;
    for (const auto& a : actions) {
      if (seen.insert(a.key.text()).second) frontier.emplace_back(a.successor, depth + 1);
    }
  }
  const double t = clock.seconds();
  return {mismatched == 0 && t <= 60.0, std::to_string(checked) + " molecules within 3 steps, " +
                                            std::to_string(mismatched) + " mismatches, " + fixed(t, 1) + " s"};
}

// 3 ------------------------------------------------------------------------
Verdict cyclohexane(const Options&) {
  const auto actions =
      enumerate_atom_additions(parse_smiles("C1CCCCC1"), mdp_over({Element::C, Element::O}, 40));
  std::set<std::string> keys;
  for (const auto& a : actions) keys.insert(a.key.text());
  std::string listed;
  for (const auto& k : keys) listed += (listed.empty() ? "" : " ") + k;
  return {keys.size() == 4, std::to_string(keys.size()) + " unique atom additions: " + listed};
}

// 4 ------------------------------------------------------------------------
Verdict gradient_check(const Options&) {
  Stopwatch clock;
  std::mt19937_64 rng(4);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::bernoulli_distribution coin(0.5);
  constexpr double kStep = 1e-5;
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<int> dims{std::uniform_int_distribution<int>(4, 12)(rng)};
    const int hidden_layers = std::uniform_int_distribution<int>(0, 2)(rng);
    for (int l = 0; l < hidden_layers; ++l) dims.push_back(std::uniform_int_distribution<int>(3, 9)(rng));
    const int heads = std::uniform_int_distribution<int>(1, 4)(rng);
    ValueNetwork net = ValueNetwork::initialized(dims, heads, rng);
    for (auto& b : net.params().biases) {
      for (Eigen::Index i = 0; i < b.size(); ++i) b[i] = 0.1 * normal(rng);
    }
    const int n = std::uniform_int_distribution<int>(1, 8)(rng);
    std::vector<SparseVector> xs;
    for (int j = 0; j < n; ++j) {
      std::vector<double> dense(static_cast<std::size_t>(dims.front()));
      for (auto& x : dense) x = coin(rng) ? normal(rng) : 0.0;
      xs.push_back(SparseVector::from_dense(dense));
    }
    Eigen::MatrixXd target(heads, n), weight(heads, n);
    for (int j = 0; j < n; ++j) {
      for (int h = 0; h < heads; ++h) {
        target(h, j) = 2.0 * normal(rng);
        weight(h, j) = coin(rng) ? 1.0 / n : 0.0;
      }
    }
    Gradients grad;
    net.weighted_huber(xs, target, weight, grad);
    const std::vector<double> analytic = grad.flatten();
    std::vector<double> theta = net.parameters();
    Gradients scratch;
    for (std::size_t k = 0; k < theta.size(); ++k) {
      const double saved = theta[k];
      theta[k] = saved + kStep;
      net.set_parameters(theta);
      const double up = net.weighted_huber(xs, target, weight, scratch);
      theta[k] = saved - kStep;
      net.set_parameters(theta);
      const double down = net.weighted_huber(xs, target, weight, scratch);
      theta[k] = saved;
      const double numeric = (up - down) / (2 * kStep);
      const double scale = std::max({std::abs(numeric), std::abs(analytic[k]), 1e-6});
      worst = std::max(worst, std::abs(numeric - analytic[k]) / scale);
    }
    net.set_parameters(theta);
  }
  const double t = clock.seconds();
  std::ostringstream detail;
  detail << "max relative error " << worst << " over 100 random (net, batch) pairs, " << fixed(t, 1) << " s";
  return {worst <= 1e-4 && t <= 60.0, detail.str()};
}

// 5 ------------------------------------------------------------------------
Verdict mw_targeting(const Options& opt) {
  int hits = 0;
  std::string detail;
  double slowest = 0.0;
  for (int seed = 1; seed <= opt.mw_seeds; ++seed) {
    Stopwatch clock;
    cli::RunConfig config = load(opt, "mw_target.cfg");
    config.seed = static_cast<std::uint64_t>(seed);
    config.out_dir = opt.work_dir / ("mw_seed" + std::to_string(seed));
    config.finalize();
    std::ostringstream quiet;
    const auto result = cli::train(config, {}, quiet);
    const double mw = molecular_weight(parse_smiles(result.greedy_smiles));
    const bool in_range = mw >= 150.0 && mw <= 200.0;
    hits += in_range;
    slowest = std::max(slowest, clock.seconds());
    std::cout << "    seed " << seed << ": " << result.greedy_smiles << " MW " << fixed(mw, 2)
              << (in_range ? "" : " (out of range)") << ", " << fixed(clock.seconds(), 0) << " s\n"
              << std::flush;
  }
  const int needed = (9 * opt.mw_seeds + 9) / 10;
  detail = std::to_string(hits) + "/" + std::to_string(opt.mw_seeds) + " seeds with greedy MW in [150, 200] (need " +
           std::to_string(needed) + "), slowest seed " + fixed(slowest, 0) + " s";
  return {hits >= needed && slowest <= 1800.0, detail};
}

// 6 ------------------------------------------------------------------------
Verdict alkane_linearity(const Options&) {
  Stopwatch clock;
  cli::RunConfig config = cli::preset("desk");
  config.set("mdp.elements", "C");
  config.set("mdp.max_steps", "38");
  config.set("reward.kind", "maximize");
  config.set("reward.property", "penalized_logp");
  config.finalize();
  auto env = cli::make_environment(config, {});
  std::mt19937_64 rng(6);
  const auto record = rollout(*env, cli::zero_network(env->input_dim()), env->start(0), 0.0, rng);
  const PropertyRegistry& registry = env->reward(0).registry();

  std::vector<double> xs, ys;
  bool increasing = true;
  bool acyclic = true;
  for (const auto& s : record.visited) {
    const Molecule& m = s.state.molecule;
    xs.push_back(static_cast<double>(m.atom_count()));
    ys.push_back(registry.evaluate({PropertyId::PenalizedLogP, {}}, m));
    if (ys.size() > 1 && !(ys.back() > ys[ys.size() - 2])) increasing = false;
    if (m.bond_count() + 1 != m.atom_count()) acyclic = false;
  }
  const double n = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) mx += xs[i] / n, my += ys[i] / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  const double r2 = sxx > 0 && syy > 0 ? sxy * sxy / (sxx * syy) : 0.0;
  const double t = clock.seconds();
  std::ostringstream detail;
  detail << "R^2 " << fixed(r2, 5) << ", slope " << fixed(sxy / sxx, 4) << " per carbon, " << record.visited.size()
         << " steps to " << record.terminal().key << ", strictly increasing " << (increasing ? "yes" : "no")
         << ", acyclic " << (acyclic ? "yes" : "no") << ", " << fixed(t, 1) << " s";
  return {r2 >= 0.99 && t <= 60.0, detail.str()};
}

// 7 ------------------------------------------------------------------------
Verdict constrained(const Options& opt) {
  Stopwatch clock;
  cli::RunConfig config = load(opt, "constrained.cfg");
  config.seed = 1;
  config.out_dir = opt.work_dir / "constrained";
  config.finalize();
  const auto origins = cli::read_smiles_file(opt.config_dir / "origins.smi", config.mdp.valences);
  std::ostringstream quiet;
  const auto result = cli::train(config, {origins, std::nullopt}, quiet);

  cli::EvalOptions eval;
  eval.episodes = static_cast<int>(origins.size());
  eval.epsilon = 0.0;
  eval.per_origin = true;
  const auto report = cli::evaluate_policy(config, origins, result.network, eval);
  cli::write_eval_report(report, config.out_dir / "eval");
  int similar = 0;
  for (const auto& e : report.episodes) similar += *e.similarity >= 0.6;
  const double share = static_cast<double>(similar) / static_cast<double>(report.episodes.size());
  const auto summary = report.summary();
  std::ostringstream detail;
  detail << similar << "/" << report.episodes.size() << " episodes with similarity >= 0.6, penalized logP improvement "
         << fixed(*summary.improvement_mean) << " +/- " << fixed(*summary.improvement_sd) << ", "
         << origins.size() << " origins, " << config.train.episodes << " episodes, " << fixed(clock.seconds(), 0)
         << " s";
  return {share >= 0.8 && *summary.improvement_mean > 0.0, detail.str()};
}

// 8 ------------------------------------------------------------------------
Verdict multi_objective(const Options& opt) {
  Stopwatch clock;
  const std::vector<std::string> weights{"0", "0.5", "1"};
  std::vector<double> means;
  std::ostringstream detail;
  for (const auto& w : weights) {
    double total = 0.0;
    for (int seed = 1; seed <= 5; ++seed) {
      cli::RunConfig config = load(opt, "multi_objective.cfg");
      config.set("reward.weight", w);
      config.seed = static_cast<std::uint64_t>(seed);
      config.out_dir = opt.work_dir / ("multi_w" + w + "_seed" + std::to_string(seed));
      config.finalize();
      std::ostringstream quiet;
      const auto result = cli::train(config, {}, quiet);
      total += sim2(parse_smiles(result.greedy_smiles), *config.origin_molecule());
    }
    means.push_back(total / 5.0);
    detail << "w=" << w << " similarity " << fixed(means.back()) << "; ";
  }
  const bool monotone = means[0] <= means[1] && means[1] <= means[2];
  detail << fixed(clock.seconds(), 0) << " s";
  return {monotone, detail.str()};
}

// 9 ------------------------------------------------------------------------
Verdict metrics(const Options&) {
  std::mt19937_64 rng(9);
  int failures = 0;
  for (int i = 0; i < 10000; ++i) {
    const int length = 64 << std::uniform_int_distribution<int>(0, 5)(rng);
    BitFingerprint a(length, 2), b(length, 2);
    const double pa = std::uniform_real_distribution<double>(0.0, 0.5)(rng);
    const double pb = std::uniform_real_distribution<double>(0.0, 0.5)(rng);
    for (int bit = 0; bit < length; ++bit) {
      if (std::bernoulli_distribution(pa)(rng)) a.set(static_cast<std::size_t>(bit));
      if (std::bernoulli_distribution(pb)(rng)) b.set(static_cast<std::size_t>(bit));
    }
    const double ab = tanimoto(a, b);
    failures += tanimoto(a, a) != 1.0;
    failures += tanimoto(b, b) != 1.0;
    failures += ab != tanimoto(b, a);
    failures += !(ab >= 0.0 && ab <= 1.0);
  }
  const bool huber_ok = std::abs(huber(0.0) - 0.0) <= 1e-12 && std::abs(huber(0.5) - 0.125) <= 1e-12 &&
                        std::abs(huber(2.0) - 1.5) <= 1e-12 && std::abs(huber(-2.0) - 1.5) <= 1e-12;
  const EpsilonSchedule schedule = EpsilonSchedule::linear(2500);
  cli::RunConfig desk = cli::preset("desk");
  desk.finalize();
  const bool schedule_ok = schedule(0) == 1.0 && schedule(2500) == 0.01 && schedule(5000) == 0.01 &&
                           desk.train.schedule(0) == 1.0 && desk.train.schedule(desk.train.episodes - 1) == 0.01;
  std::ostringstream detail;
  detail << failures << " Tanimoto property failures on 10000 pairs; Huber(0, 0.5, 2) = " << huber(0.0) << ", "
         << huber(0.5) << ", " << huber(2.0) << "; epsilon endpoints " << schedule(0) << " -> " << schedule(2500);
  return {failures == 0 && huber_ok && schedule_ok, detail.str()};
}

// 10 -----------------------------------------------------------------------
Verdict reproducibility(const Options& opt) {
  Stopwatch clock;
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  };
  std::vector<fs::path> dirs;
  for (const char* name : {"repro_a", "repro_b"}) {
    dirs.push_back(opt.work_dir / name);
    std::ostringstream out, err;
    const int code = cli::run({"train", "--config", (opt.config_dir / "mw_target.cfg").string(), "--seed", "7",
                               "--episodes", "60", "--out-dir", dirs.back().string()},
                              out, err);
    if (code != 0) return {false, "train exited with " + std::to_string(code) + ": " + err.str()};
  }
  std::string detail;
  bool same = true;
  for (const char* file : {"checkpoint.bin", "runlog.tsv", "ledger.tsv", "train_summary.json"}) {
    const std::string a = slurp(dirs[0] / file);
    const std::string b = slurp(dirs[1] / file);
    const bool eq = !a.empty() && a == b;
    same = same && eq;
    detail += std::string(file) + (eq ? " identical" : " DIFFERS") + " (" + std::to_string(a.size()) + " bytes); ";
  }
  detail += fixed(clock.seconds(), 0) + " s";
  return {same, detail};
}

// 11 -----------------------------------------------------------------------
Verdict chain(const Options&) {
  Stopwatch clock;
  const int horizon = 10;
  testing::ChainEnvironment env(horizon);
  const auto q_star = env.optimal_q();
  int solved = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    Trainer trainer(env, testing::chain_config(), seed);
    for (int e = 0; e < trainer.config().episodes; ++e) trainer.run_episode(e);
    int mismatches = 0;
    for (int t = 0; t < horizon; ++t) {
      for (int p = 0; p < testing::ChainEnvironment::kPositions; ++p) {
        const auto& q = q_star[t][p];
        if (std::abs(q[0] - q[1]) < 1e-9) continue;
        if (argmax(mean_action_values(trainer.online(), *env.expand({p, t}))) != argmax(q)) ++mismatches;
      }
    }
    solved += mismatches == 0;
  }
  const double t = clock.seconds();
  return {solved == 10 && t <= 60.0,
          std::to_string(solved) + "/10 seeds match the value-iteration policy, " + fixed(t, 1) + " s"};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Verdict(const Options&)> check;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria{
      {1, "validity of random walks", validity},
      {2, "action enumeration matches brute force", enumeration_oracle},
      {3, "cyclohexane atom additions", cyclohexane},
      {4, "gradient check", gradient_check},
      {5, "molecular weight targeting", mw_targeting},
      {6, "alkane penalized logP linearity", alkane_linearity},
      {7, "constrained optimization", constrained},
      {8, "multi-objective similarity monotone in weight", multi_objective},
      {9, "metric properties", metrics},
      {10, "bitwise reproducible training", reproducibility},
      {11, "chain MDP matches value iteration", chain},
  };

  CLI::App app{"molforge acceptance checks"};
  std::vector<int> selected;
  Options opt;
  std::string work_dir;
  app.add_option("--criterion", selected, "criteria to run (default: all)")->check(CLI::Range(1, 11));
  app.add_option("--mw-seeds", opt.mw_seeds, "seeds for the molecular weight criterion")->check(CLI::PositiveNumber);
  app.add_option("--work-dir", work_dir, "directory for training outputs");
  app.add_option("--config-dir", opt.config_dir, "directory with the example configs")->check(CLI::ExistingDirectory);
  CLI11_PARSE(app, argc, argv);

  opt.work_dir = work_dir.empty() ? fs::temp_directory_path() / "molforge_acceptance" : fs::path(work_dir);
  fs::create_directories(opt.work_dir);

  int failed = 0;
  for (const auto& c : criteria) {
    if (!selected.empty() && std::find(selected.begin(), selected.end(), c.id) == selected.end()) continue;
    Verdict v;
    try {
      v = c.check(opt);
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failed += !v.pass;
    std::cout << (v.pass ? "PASS" : "FAIL") << "  " << c.id << ". " << c.name << ": " << v.detail << '\n'
              << std::flush;
  }
  return failed == 0 ? 0 : 1;
}
