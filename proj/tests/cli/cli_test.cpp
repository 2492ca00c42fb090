#include <gtest/gtest.h>

#include <charconv>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

#include "commands.hpp"
#include "config.hpp"
#include "molforge/actions.hpp"
#include "molforge/error.hpp"
#include "molforge/smiles.hpp"
#include "runlog.hpp"

namespace molforge::cli {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

class Scratch : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("molforge_cli_") + info->test_suite_name() + "_" + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

 public:
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(dir_ / name) << text;
    return path(name);
  }

 protected:
  fs::path dir_;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

using Table = std::vector<std::vector<std::string>>;

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> cols;
  std::istringstream row(line);
  for (std::string col; std::getline(row, col, '\t');) cols.push_back(col);
  if (!line.empty() && line.back() == '\t') cols.emplace_back();
  return cols;
}

/// Header must match; every row must have the header's width.
Table read_tsv(const std::string& text, const std::vector<std::string>& header) {
  std::istringstream in(text);
  std::string line;
  EXPECT_TRUE(std::getline(in, line));
  EXPECT_EQ(split_tabs(line), header);
  Table rows;
  while (std::getline(in, line)) {
    auto cols = split_tabs(line);
    EXPECT_EQ(cols.size(), header.size()) << line;
    rows.push_back(std::move(cols));
  }
  return rows;
}

bool is_number(const std::string& s) {
  double x = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

double number(const std::string& s) {
  EXPECT_TRUE(is_number(s)) << s;
  double x = 0;
  std::from_chars(s.data(), s.data() + s.size(), x);
  return x;
}

bool is_smiles(const std::string& s) {
  try {
    parse_smiles(s);
    return true;
  } catch (const ParseError&) {
    return false;
  }
}

const std::vector<std::string> kEvalHeader{"episode",  "origin",   "smiles",         "reward",
                                           "return",   "molecular_weight", "logp", "penalized_logp",
                                           "property", "similarity", "improvement", "success"};

void check_eval_files(const fs::path& dir, int episodes) {
  const Table rows = read_tsv(slurp(dir / "eval.tsv"), kEvalHeader);
  ASSERT_EQ(rows.size(), static_cast<std::size_t>(episodes));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i][0], std::to_string(i));
    EXPECT_TRUE(is_smiles(rows[i][2])) << rows[i][2];
    for (int c : {1, 3, 4, 5, 6, 7, 8}) EXPECT_TRUE(is_number(rows[i][c])) << rows[i][c];
    for (int c : {9, 10}) EXPECT_TRUE(rows[i][c] == "NA" || is_number(rows[i][c])) << rows[i][c];
    EXPECT_TRUE(rows[i][11] == "NA" || rows[i][11] == "0" || rows[i][11] == "1");
  }
  const auto j = nlohmann::json::parse(slurp(dir / "eval_summary.json"));
  for (const char* key : {"policy", "epsilon", "episodes", "unique_molecules", "mean_reward", "success_rate",
                          "mean_similarity", "improvement_mean", "improvement_sd", "best"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_EQ(j["episodes"].get<int>(), episodes);
  EXPECT_LE(j["best"].size(), 3u);
}

// Small enough to train in about a second.
std::string tiny_config(const Scratch& s, const std::string& name, const std::string& extra = "") {
  return s.write(name,
                 "io.preset=desk\n"
                 "mdp.max_steps=4\n"
                 "reward.kind=target_range\n"
                 "reward.property=molecular_weight\n"
                 "reward.lower=40\nreward.upper=60\n"
                 "train.episodes=12\n"
                 "train.hidden=16\n"
                 "train.heads=3\n"
                 "train.batch_size=8\n"
                 "train.warmup=8\n"
                 "train.train_every=1\n"
                 "train.target_sync=10\n"
                 "train.checkpoint_every=5\n"
                 "eval.episodes=6\n" +
                     extra);
}

// ---------------------------------------------------------------- config

TEST(Config, UnknownKeyIsNamed) {
  RunConfig c;
  try {
    c.set("gamm", "0.9");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("gamm"), std::string::npos);
  }
}

TEST_F(Scratch, MalformedKeyExitsOneNamingIt) {
  const auto cfg = write("bad.cfg", "gamm=0.9\n");
  const Outcome r = invoke({"train", "--config", cfg, "--out-dir", path("out")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("gamm"), std::string::npos) << r.err;
  EXPECT_FALSE(fs::exists(path("out")));
}

TEST_F(Scratch, LineWithoutEqualsIsConfigError) {
  const auto cfg = write("bad.cfg", "mdp.max_steps 40\n");
  EXPECT_EQ(invoke({"baseline", "random", "--config", cfg, "--out-dir", path("out")}).code, 1);
}

TEST(Config, BadValuesRejected) {
  RunConfig c;
  EXPECT_THROW(c.set("mdp.max_steps", "forty"), ConfigError);
  EXPECT_THROW(c.set("mdp.max_steps", "40x"), ConfigError);
  EXPECT_THROW(c.set("mdp.elements", "C,Xx"), ConfigError);
  EXPECT_THROW(c.set("reward.kind", "maximise"), ConfigError);
  EXPECT_THROW(c.set("reward.property", "qed"), ConfigError);
  EXPECT_THROW(c.set("mdp.allow_bond_removal", "maybe"), ConfigError);
  EXPECT_THROW(c.set("train.epsilon_schedule", "0:1,10:2"), ConfigError);
  EXPECT_THROW(c.set("train.epsilon_schedule", "0:0.1,10:0.5"), ConfigError);
}

TEST(Config, RangesCheckedOnFinalize) {
  RunConfig c = preset("desk");
  c.set("reward.gamma", "1.5");
  EXPECT_THROW(c.finalize(), ConfigError);

  RunConfig d = preset("desk");
  d.set("train.batch_size", "0");
  EXPECT_THROW(d.finalize(), ConfigError);

  RunConfig e = preset("desk");
  e.set("mdp.initial", "C(");
  EXPECT_THROW(e.finalize(), ConfigError);
}

TEST(Config, Presets) {
  const RunConfig full = preset("full");
  EXPECT_EQ(full.train.hidden, (std::vector<int>{1024, 512, 128, 32}));
  EXPECT_EQ(full.train.episodes, 5000);
  EXPECT_EQ(full.mdp.max_steps, 40);
  EXPECT_EQ(full.reward.gamma, 0.9);
  EXPECT_EQ(full.train.adam.learning_rate, 1e-4);
  const RunConfig desk = preset("desk");
  EXPECT_EQ(desk.train.hidden, (std::vector<int>{256, 128, 32}));
  EXPECT_EQ(desk.train.episodes, 2000);
  EXPECT_THROW(preset("laptop"), ConfigError);
}

TEST(Config, DefaultScheduleAnnealsOverHalfTheRun) {
  RunConfig c = preset("desk");
  c.set("train.episodes", "400");
  c.finalize();
  EXPECT_EQ(c.train.schedule(0), 1.0);
  EXPECT_EQ(c.train.schedule(200), 0.01);
  EXPECT_EQ(c.train.schedule(399), 0.01);

  c.set("train.epsilon_schedule", "0:0.5,100:0.05");
  c.finalize();
  EXPECT_EQ(c.train.schedule(0), 0.5);
  EXPECT_EQ(c.train.schedule(100), 0.05);
}

TEST(Config, EntriesRoundTrip) {
  RunConfig c = preset("desk");
  c.set("mdp.elements", "C,O,S");
  c.set("mdp.ring_sizes", "5,6");
  c.set("mdp.valences", "S:6");
  c.set("reward.kind", "multi_objective");
  c.set("reward.origin", "CC(O)CCN");
  c.set("reward.weight", "0.25");
  c.set("train.epsilon_schedule", "0:1,50:0.2,100:0.01");
  c.set("io.seed", "18446744073709551615");

  RunConfig d = preset("desk");
  for (const auto& [k, v] : c.entries()) d.set(k, v);
  EXPECT_EQ(c.entries(), d.entries());
  EXPECT_EQ(d.mdp.valences.max_valence(Element::S), 6);
  EXPECT_EQ(d.seed, 18446744073709551615ull);
}

TEST(Config, SimilarityRewardsStartAtTheOrigin) {
  RunConfig c = preset("desk");
  c.set("reward.kind", "constrained_logp");
  c.set("reward.origin", "CCOC");
  c.finalize();
  EXPECT_EQ(canonical_key(c.mdp.initial_molecule), canonical_key(parse_smiles("CCOC")));
  ASSERT_NE(c.reward_spec().origin(), nullptr);
}

TEST_F(Scratch, HashInsideSmilesIsNotAComment) {
  const auto cfg = write("a.cfg", "mdp.initial=C#CC # alkyne\n");
  EXPECT_EQ(load_config(fs::path(cfg), std::nullopt).initial, "C#CC");
  const auto smi = write("o.smi", "C#N\n  # note\n");
  EXPECT_EQ(read_smiles_file(smi, ValenceTable::defaults()).size(), 1u);
}

TEST_F(Scratch, FileThenPresetOverride) {
  const auto cfg = write("a.cfg", "# comment\nio.preset=desk\n\ntrain.episodes = 7  # trailing\n");
  const RunConfig from_file = load_config(fs::path(cfg), std::nullopt);
  EXPECT_EQ(from_file.preset, "desk");
  EXPECT_EQ(from_file.train.episodes, 7);
  EXPECT_EQ(from_file.train.hidden, (std::vector<int>{256, 128, 32}));
  const RunConfig overridden = load_config(fs::path(cfg), std::string("full"));
  EXPECT_EQ(overridden.train.hidden, (std::vector<int>{1024, 512, 128, 32}));
  EXPECT_EQ(overridden.train.episodes, 7);
}

// ---------------------------------------------------------------- run log

TEST_F(Scratch, RunLogRejectsNonIncreasingEpisodes) {
  RunLog log(path("log.tsv"));
  log.append({0, 1.0, 0, 0, "C", 1.0, 1.0, std::nullopt});
  log.append({1, 0.5, 1, 0, "CC", 2.0, 2.0, 0.25});
  EXPECT_THROW(log.append({1, 0.5, 1, 0, "CC", 2.0, 2.0, 0.25}), std::invalid_argument);
  const Table rows = read_tsv(slurp(path("log.tsv")), split_tabs(RunLog::kHeader));
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0][7], "NA");
  EXPECT_EQ(rows[1][7], "0.25");
}

TEST_F(Scratch, LedgerTracksUniqueMolecules) {
  UniqueLedger ledger;
  ledger.record("CC", 1.0, 0);
  ledger.record("CCC", 3.0, 1);
  ledger.record("CC", 2.0, 2);
  ledger.record("CO", 3.0, 3);
  ASSERT_EQ(ledger.size(), 3u);
  const auto top = ledger.top(2);
  EXPECT_EQ(top[0].smiles, "CCC");  // tie on reward, earlier first episode
  EXPECT_EQ(top[1].smiles, "CO");
  const auto recent = ledger.recent(2);
  EXPECT_EQ(recent[0].smiles, "CO");
  EXPECT_EQ(recent[1].smiles, "CC");
  EXPECT_EQ(recent[1].visits, 2);
  EXPECT_EQ(recent[1].best_reward, 2.0);

  ledger.write(path("ledger.tsv"));
  const UniqueLedger back = UniqueLedger::read(path("ledger.tsv"));
  ASSERT_EQ(back.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(back.entries()[i].smiles, ledger.entries()[i].smiles);
    EXPECT_EQ(back.entries()[i].best_reward, ledger.entries()[i].best_reward);
    EXPECT_EQ(back.entries()[i].visits, ledger.entries()[i].visits);
  }
}

// ---------------------------------------------------------------- small commands

TEST(Props, Methane) {
  const Outcome r = invoke({"props", "C"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Table rows = read_tsv(r.out, {"input", "smiles", "heavy_atoms", "molecular_weight", "logp",
                                      "penalized_logp", "rings", "ring_sizes", "long_cycles"});
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_NEAR(number(rows[0][3]), 16.043, 1e-3);
  EXPECT_EQ(rows[0][6], "0");
}

TEST(Props, RingStats) {
  const Outcome r = invoke({"props", "C1CCCCCCC1", "C1CCC2CCCC2C1"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  std::getline(in, line);
  EXPECT_EQ(split_tabs(line)[7], "8");
  EXPECT_EQ(split_tabs(line)[8], "1");
  std::getline(in, line);
  EXPECT_EQ(split_tabs(line)[7], "5,6");
}

TEST(Props, EmptyInputIsUsageError) {
  EXPECT_EQ(invoke({"props", ""}).code, 1);
  EXPECT_EQ(invoke({"props"}).code, 1);
  EXPECT_EQ(invoke({"props", "C(("}).code, 1);
}

TEST(Sim, Reflexive) {
  const Outcome r = invoke({"sim", "CC(O)CCN", "CC(O)CCN"});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "1\n");
  const Outcome s = invoke({"sim", "CCCC", "CC(O)CCN"});
  ASSERT_EQ(s.code, 0);
  const double v = number(s.out.substr(0, s.out.size() - 1));
  EXPECT_GE(v, 0.0);
  EXPECT_LT(v, 1.0);
  EXPECT_EQ(invoke({"sim", "CCCC"}).code, 1);
}

TEST(Fingerprint, HexLength) {
  const Outcome r = invoke({"fp", "CCO", "--length", "64"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.size(), 16u + 1u);
}

TEST(Usage, ExitCodes) {
  EXPECT_EQ(invoke({}).code, 1);
  EXPECT_EQ(invoke({"frobnicate"}).code, 1);
  EXPECT_EQ(invoke({"--help"}).code, 0);
  EXPECT_EQ(invoke({"train", "--preset", "laptop"}).code, 1);
  EXPECT_EQ(invoke({"eval"}).code, 1);  // --checkpoint is required
}

TEST_F(Scratch, InspectMatchesActionEnumeration) {
  const auto cfg = write("c.cfg", "mdp.elements=C,O\n");
  const Outcome r = invoke({"inspect", "C1CCCCC1", "--config", cfg});
  ASSERT_EQ(r.code, 0) << r.err;
  const Table rows = read_tsv(r.out, {"index", "edit", "smiles", "reward"});

  MdpConfig mdp;
  mdp.elements = {Element::C, Element::O};
  const auto actions = valid_actions(State{parse_smiles("C1CCCCC1"), 0}, mdp);
  ASSERT_EQ(rows.size(), actions.size());
  std::set<std::string> listed;
  for (const auto& row : rows) listed.insert(row[2]);
  std::set<std::string> expected;
  for (const auto& a : actions) expected.insert(a.key.text());
  EXPECT_EQ(listed, expected);
}

// ---------------------------------------------------------------- baselines and eval

TEST_F(Scratch, EpsGreedyAtZeroEqualsGreedy) {
  const auto cfg = tiny_config(*this, "c.cfg");
  ASSERT_EQ(invoke({"baseline", "greedy", "--config", cfg, "--out-dir", path("g")}).code, 0);
  ASSERT_EQ(invoke({"baseline", "eps-greedy", "--epsilon", "0", "--config", cfg, "--out-dir", path("e")}).code, 0);
  check_eval_files(path("g"), 6);
  EXPECT_EQ(slurp(path("g") + "/eval.tsv"), slurp(path("e") + "/eval.tsv"));
  EXPECT_EQ(invoke({"baseline", "eps-greedy", "--config", cfg, "--out-dir", path("x")}).code, 1);
}

TEST_F(Scratch, RandomBaselineIsValidAndSpreads) {
  const auto cfg = tiny_config(*this, "c.cfg");
  const Outcome r = invoke({"baseline", "random", "--episodes", "30", "--config", cfg, "--out-dir", path("r")});
  ASSERT_EQ(r.code, 0) << r.err;
  check_eval_files(path("r"), 30);
  const auto j = nlohmann::json::parse(slurp(path("r") + "/eval_summary.json"));
  EXPECT_GT(j["unique_molecules"].get<int>(), 5);
}

TEST_F(Scratch, TargetRangeSuccessFlag) {
  const auto cfg = tiny_config(*this, "c.cfg");
  ASSERT_EQ(invoke({"baseline", "random", "--episodes", "40", "--config", cfg, "--out-dir", path("r")}).code, 0);
  const Table rows = read_tsv(slurp(path("r") + "/eval.tsv"), kEvalHeader);
  int successes = 0;
  for (const auto& row : rows) {
    const double mw = number(row[5]);
    EXPECT_EQ(number(row[8]), mw);
    EXPECT_EQ(row[11], (mw >= 40 && mw <= 60) ? "1" : "0");
    successes += row[11] == "1";
  }
  const auto j = nlohmann::json::parse(slurp(path("r") + "/eval_summary.json"));
  EXPECT_DOUBLE_EQ(j["success_rate"].get<double>(), successes / 40.0);
}

TEST_F(Scratch, EvaluationIndependentOfThreadCount) {
  RunConfig config = load_config(fs::path(tiny_config(*this, "c.cfg")), std::nullopt);
  config.finalize();
  const auto env = make_environment(config, {});
  const ValueNetwork net = zero_network(env->input_dim());
  EvalOptions one;
  one.episodes = 9;
  one.epsilon = 0.5;
  one.threads = 1;
  EvalOptions three = one;
  three.threads = 3;
  write_eval_report(evaluate_policy(config, {}, net, one), path("one"));
  write_eval_report(evaluate_policy(config, {}, net, three), path("three"));
  EXPECT_EQ(slurp(path("one") + "/eval.tsv"), slurp(path("three") + "/eval.tsv"));
  EXPECT_EQ(slurp(path("one") + "/eval_summary.json"), slurp(path("three") + "/eval_summary.json"));
}

TEST_F(Scratch, PerOriginReport) {
  const auto cfg = tiny_config(*this, "c.cfg",
                               "reward.kind=constrained_logp\nreward.origin=CCO\nreward.delta=0.4\nmdp.max_steps=2\n");
  const auto origins = write("origins.smi", "CCO\n# skipped\nCCN  # trailing\n\nCC(C)O\n");
  const Outcome r = invoke({"baseline", "random", "--episodes", "9", "--per-origin", "--origins", origins, "--config",
                            cfg, "--out-dir", path("p")});
  ASSERT_EQ(r.code, 0) << r.err;
  check_eval_files(path("p"), 9);
  const Table rows = read_tsv(slurp(path("p") + "/eval_origins.tsv"),
                              {"origin", "smiles", "episodes", "success_rate", "mean_similarity", "improvement_mean",
                               "improvement_sd"});
  ASSERT_EQ(rows.size(), 3u);
  for (const auto& row : rows) {
    EXPECT_EQ(row[2], "3");
    for (int c = 3; c < 7; ++c) EXPECT_TRUE(is_number(row[c])) << row[c];
  }
  const Table episodes = read_tsv(slurp(path("p") + "/eval.tsv"), kEvalHeader);
  for (const auto& row : episodes) {
    EXPECT_EQ(number(row[1]), number(row[0]) - 3 * std::floor(number(row[0]) / 3));
    EXPECT_EQ(row[11], number(row[9]) >= 0.4 ? "1" : "0");
  }
}

// ---------------------------------------------------------------- train

TEST_F(Scratch, TrainWritesParseableArtifacts) {
  const auto cfg = tiny_config(*this, "c.cfg");
  const Outcome r = invoke({"train", "--config", cfg, "--seed", "5", "--out-dir", path("t")});
  ASSERT_EQ(r.code, 0) << r.err;

  const Table log = read_tsv(slurp(path("t") + "/runlog.tsv"), split_tabs(RunLog::kHeader));
  ASSERT_EQ(log.size(), 12u);
  bool trained = false;
  for (std::size_t i = 0; i < log.size(); ++i) {
    EXPECT_EQ(log[i][0], std::to_string(i));
    EXPECT_TRUE(is_number(log[i][1]));
    const int head = static_cast<int>(number(log[i][2]));
    EXPECT_TRUE(head >= 0 && head < 3);
    EXPECT_TRUE(is_smiles(log[i][4]));
    EXPECT_TRUE(is_number(log[i][5]));
    EXPECT_TRUE(is_number(log[i][6]));
    if (log[i][7] != "NA") {
      EXPECT_TRUE(is_number(log[i][7]));
      trained = true;
    } else {
      EXPECT_FALSE(trained) << "loss average vanished after training began";
    }
  }
  EXPECT_TRUE(trained);

  const UniqueLedger ledger = UniqueLedger::read(path("t") + "/ledger.tsv");
  int visits = 0;
  for (const auto& e : ledger.entries()) visits += e.visits;
  EXPECT_EQ(visits, 12);

  const auto summary = nlohmann::json::parse(slurp(path("t") + "/train_summary.json"));
  EXPECT_EQ(summary["episodes"].get<int>(), 12);
  EXPECT_TRUE(is_smiles(summary["greedy"]["smiles"].get<std::string>()));
  EXPECT_LE(summary["top"].size(), 3u);
  EXPECT_EQ(summary["last_unique"].size(), std::min<std::size_t>(20, ledger.size()));

  // the resolved config reloads to the same settings
  const RunConfig resolved = load_config(fs::path(path("t") + "/config.resolved"), std::nullopt);
  RunConfig original = load_config(fs::path(cfg), std::nullopt);
  original.seed = 5;
  original.out_dir = path("t");
  EXPECT_EQ(resolved.entries(), original.entries());

  EXPECT_NE(r.out.find("rank\tsmiles\treward\tfirst_episode"), std::string::npos);
}

TEST_F(Scratch, TrainIsBitReproducible) {
  const auto cfg = tiny_config(*this, "c.cfg");
  ASSERT_EQ(invoke({"train", "--config", cfg, "--seed", "11", "--out-dir", path("a")}).code, 0);
  ASSERT_EQ(invoke({"train", "--config", cfg, "--seed", "11", "--out-dir", path("b")}).code, 0);
  ASSERT_EQ(invoke({"train", "--config", cfg, "--seed", "12", "--out-dir", path("c")}).code, 0);
  for (const char* file : {"runlog.tsv", "ledger.tsv", "checkpoint.bin", "train_summary.json"}) {
    EXPECT_EQ(slurp(path("a") + "/" + file), slurp(path("b") + "/" + file)) << file;
  }
  EXPECT_NE(slurp(path("a") + "/checkpoint.bin"), slurp(path("c") + "/checkpoint.bin"));
}

TEST_F(Scratch, EvalOfTrainedCheckpoint) {
  const auto cfg = tiny_config(*this, "c.cfg");
  ASSERT_EQ(invoke({"train", "--config", cfg, "--out-dir", path("t")}).code, 0);
  const std::string ck = path("t") + "/checkpoint.bin";

  ASSERT_EQ(invoke({"eval", "--checkpoint", ck, "--config", cfg, "--out-dir", path("g")}).code, 0);
  check_eval_files(path("g"), 6);
  const auto greedy = nlohmann::json::parse(slurp(path("g") + "/eval_summary.json"));
  EXPECT_EQ(greedy["unique_molecules"].get<int>(), 1);

  ASSERT_EQ(invoke({"eval", "--checkpoint", ck, "--config", cfg, "--epsilon", "1", "--episodes", "40", "--out-dir",
                    path("r")})
                .code,
            0);
  const auto random = nlohmann::json::parse(slurp(path("r") + "/eval_summary.json"));
  EXPECT_GT(random["unique_molecules"].get<int>(), 5);

  const Outcome inspect = invoke({"inspect", "CC", "--config", cfg, "--checkpoint", ck});
  ASSERT_EQ(inspect.code, 0) << inspect.err;
  const Table rows = read_tsv(inspect.out, {"index", "edit", "smiles", "reward", "q"});
  double lo = 2, hi = -1;
  for (const auto& row : rows) {
    lo = std::min(lo, number(row[4]));
    hi = std::max(hi, number(row[4]));
  }
  EXPECT_EQ(lo, 0.0);
  EXPECT_EQ(hi, 1.0);
}

TEST_F(Scratch, CorruptCheckpointIsRuntimeError) {
  const auto cfg = tiny_config(*this, "c.cfg");
  const auto ck = write("bad.bin", "MOLFCKPT but not really");
  EXPECT_EQ(invoke({"eval", "--checkpoint", ck, "--config", cfg, "--out-dir", path("o")}).code, 2);
}

TEST_F(Scratch, ResumeAndRestart) {
  const auto cfg = tiny_config(*this, "c.cfg");
  ASSERT_EQ(invoke({"train", "--config", cfg, "--out-dir", path("t")}).code, 0);
  const Outcome resumed =
      invoke({"train", "--config", cfg, "--checkpoint", path("t") + "/checkpoint.bin", "--out-dir", path("u")});
  ASSERT_EQ(resumed.code, 0) << resumed.err;

  const Outcome restart = invoke({"train", "--config", cfg, "--episodes", "3", "--restart-from",
                                  path("t") + "/ledger.tsv", "--out-dir", path("s")});
  ASSERT_EQ(restart.code, 0) << restart.err;
  const auto top = UniqueLedger::read(path("t") + "/ledger.tsv").top(5);
  for (std::size_t i = 0; i < top.size(); ++i) {
    const fs::path run = fs::path(path("s")) / ("restart_" + std::to_string(i));
    ASSERT_TRUE(fs::exists(run / "runlog.tsv")) << run;
    const RunConfig c = load_config(run / "config.resolved", std::nullopt);
    EXPECT_EQ(c.initial, top[i].smiles);
  }
  EXPECT_FALSE(fs::exists(fs::path(path("s")) / ("restart_" + std::to_string(top.size()))));
}

}  // namespace
}  // namespace molforge::cli
