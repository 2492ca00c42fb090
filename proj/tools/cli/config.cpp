#include "config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>

#include "molforge/error.hpp"
#include "molforge/smiles.hpp"

namespace molforge::cli {
namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  if (trim(s).empty()) return out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  return out;
}

// '#' opens a comment at line start or after whitespace; SMILES use it for triple bonds.
void strip_comment(std::string& line) {
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '#' && (i == 0 || line[i - 1] == ' ' || line[i - 1] == '\t')) {
      line.erase(i);
      return;
    }
  }
}

template <class T>
T parse_integer(const std::string& key, const std::string& value) {
  T out{};
  const char* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc{} || ptr != end) throw ConfigError(key + ": expected an integer, got '" + value + "'");
  return out;
}

double parse_real(const std::string& key, const std::string& value) {
  double out = 0.0;
  const char* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc{} || ptr != end) throw ConfigError(key + ": expected a number, got '" + value + "'");
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError(key + ": expected true or false, got '" + value + "'");
}

Element parse_element(const std::string& key, const std::string& text) {
  const auto e = element_from_symbol(text);
  if (!e) throw ConfigError(key + ": unknown element '" + text + "'");
  return *e;
}

template <class T>
std::string join(const std::vector<T>& items, const std::function<std::string(const T&)>& show, char sep = ',') {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += sep;
    out += show(items[i]);
  }
  return out;
}

const char* kind_name(RewardKind kind) {
  switch (kind) {
    case RewardKind::Maximize: return "maximize";
    case RewardKind::TargetRange: return "target_range";
    case RewardKind::ConstrainedLogP: return "constrained_logp";
    case RewardKind::MultiObjective: return "multi_objective";
  }
  return "";
}

struct Field {
  std::string key;
  std::function<void(RunConfig&, const std::string&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

template <class T>
Field integer(std::string key, std::function<T&(RunConfig&)> ref) {
  return {key, [ref](RunConfig& c, const std::string& k, const std::string& v) { ref(c) = parse_integer<T>(k, v); },
          [ref](const RunConfig& c) { return std::to_string(ref(const_cast<RunConfig&>(c))); }};
}

Field real(std::string key, std::function<double&(RunConfig&)> ref) {
  return {key, [ref](RunConfig& c, const std::string& k, const std::string& v) { ref(c) = parse_real(k, v); },
          [ref](const RunConfig& c) { return format_double(ref(const_cast<RunConfig&>(c))); }};
}

Field boolean(std::string key, std::function<bool&(RunConfig&)> ref) {
  return {key, [ref](RunConfig& c, const std::string& k, const std::string& v) { ref(c) = parse_bool(k, v); },
          [ref](const RunConfig& c) { return std::string(ref(const_cast<RunConfig&>(c)) ? "true" : "false"); }};
}

Field text(std::string key, std::function<std::string&(RunConfig&)> ref) {
  return {key, [ref](RunConfig& c, const std::string&, const std::string& v) { ref(c) = v; },
          [ref](const RunConfig& c) { return ref(const_cast<RunConfig&>(c)); }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    std::vector<Field> f;
    f.push_back(integer<int>("mdp.max_steps", [](RunConfig& c) -> int& { return c.mdp.max_steps; }));
    f.push_back({"mdp.elements",
                 [](RunConfig& c, const std::string& k, const std::string& v) {
                   c.mdp.elements.clear();
                   for (const auto& s : split(v, ',')) c.mdp.elements.push_back(parse_element(k, s));
                 },
                 [](const RunConfig& c) {
                   return join<Element>(c.mdp.elements, [](const Element& e) { return std::string(symbol(e)); });
                 }});
    f.push_back({"mdp.ring_sizes",
                 [](RunConfig& c, const std::string& k, const std::string& v) {
                   c.mdp.allowed_ring_sizes.clear();
                   for (const auto& s : split(v, ',')) c.mdp.allowed_ring_sizes.insert(parse_integer<int>(k, s));
                 },
                 [](const RunConfig& c) {
                   const std::vector<int> sizes(c.mdp.allowed_ring_sizes.begin(), c.mdp.allowed_ring_sizes.end());
                   return join<int>(sizes, [](const int& n) { return std::to_string(n); });
                 }});
    f.push_back({"mdp.valences",
                 [](RunConfig& c, const std::string& k, const std::string& v) {
                   for (const auto& item : split(v, ',')) {
                     const auto colon = item.find(':');
                     if (colon == std::string::npos) throw ConfigError(k + ": expected Element:valence, got '" + item + "'");
                     c.mdp.valences.set(parse_element(k, trim(item.substr(0, colon))),
                                        parse_integer<int>(k, trim(item.substr(colon + 1))));
                   }
                 },
                 [](const RunConfig& c) {
                   std::string out;
                   for (Element e : kAllElements) {
                     if (e == Element::H) continue;
                     if (!out.empty()) out += ',';
                     out += std::string(symbol(e)) + ':' + std::to_string(c.mdp.valences.max_valence(e));
                   }
                   return out;
                 }});
    f.push_back(boolean("mdp.allow_bond_removal", [](RunConfig& c) -> bool& { return c.mdp.allow_bond_removal; }));
    f.push_back(
        boolean("mdp.allow_no_modification", [](RunConfig& c) -> bool& { return c.mdp.allow_no_modification; }));
    f.push_back(text("mdp.initial", [](RunConfig& c) -> std::string& { return c.initial; }));

    f.push_back({"reward.kind",
                 [](RunConfig& c, const std::string& k, const std::string& v) {
                   for (RewardKind kind : {RewardKind::Maximize, RewardKind::TargetRange, RewardKind::ConstrainedLogP,
                                           RewardKind::MultiObjective}) {
                     if (v == kind_name(kind)) {
                       c.reward.kind = kind;
                       return;
                     }
                   }
                   throw ConfigError(k + ": unknown reward kind '" + v + "'");
                 },
                 [](const RunConfig& c) { return std::string(kind_name(c.reward.kind)); }});
    f.push_back({"reward.property",
                 [](RunConfig& c, const std::string& k, const std::string& v) {
                   try {
                     c.reward.property = parse_property_kind(v);
                   } catch (const UnknownProperty&) {
                     throw ConfigError(k + ": unknown property '" + v + "'");
                   }
                 },
                 [](const RunConfig& c) { return to_string(c.reward.property); }});
    f.push_back(real("reward.lower", [](RunConfig& c) -> double& { return c.reward.lower; }));
    f.push_back(real("reward.upper", [](RunConfig& c) -> double& { return c.reward.upper; }));
    f.push_back(real("reward.gamma", [](RunConfig& c) -> double& { return c.reward.gamma; }));
    f.push_back(boolean("reward.per_step", [](RunConfig& c) -> bool& { return c.reward.per_step; }));
    f.push_back(text("reward.origin", [](RunConfig& c) -> std::string& { return c.reward.origin; }));
    f.push_back(real("reward.delta", [](RunConfig& c) -> double& { return c.reward.delta; }));
    f.push_back(real("reward.lambda", [](RunConfig& c) -> double& { return c.reward.lambda; }));
    f.push_back(real("reward.weight", [](RunConfig& c) -> double& { return c.reward.weight; }));
    f.push_back({"reward.sa_proxy",
                 [](RunConfig& c, const std::string& k, const std::string& v) {
                   if (v != "zero" && v != "ring_complexity") {
                     throw ConfigError(k + ": expected zero or ring_complexity, got '" + v + "'");
                   }
                   c.reward.sa_proxy = v;
                 },
                 [](const RunConfig& c) { return c.reward.sa_proxy; }});
    f.push_back(text("reward.logp_table", [](RunConfig& c) -> std::string& { return c.reward.logp_table; }));

    f.push_back(integer<int>("train.episodes", [](RunConfig& c) -> int& { return c.train.episodes; }));
    f.push_back({"train.hidden",
                 [](RunConfig& c, const std::string& k, const std::string& v) {
                   c.train.hidden.clear();
                   for (const auto& s : split(v, ',')) c.train.hidden.push_back(parse_integer<int>(k, s));
                 },
                 [](const RunConfig& c) {
                   return join<int>(c.train.hidden, [](const int& n) { return std::to_string(n); });
                 }});
    f.push_back(integer<int>("train.heads", [](RunConfig& c) -> int& { return c.train.heads; }));
    f.push_back(integer<std::size_t>("train.replay_capacity",
                                     [](RunConfig& c) -> std::size_t& { return c.train.replay_capacity; }));
    f.push_back(integer<int>("train.batch_size", [](RunConfig& c) -> int& { return c.train.batch_size; }));
    f.push_back(integer<int>("train.warmup", [](RunConfig& c) -> int& { return c.train.warmup; }));
    f.push_back(integer<int>("train.train_every", [](RunConfig& c) -> int& { return c.train.train_every; }));
    f.push_back(integer<int>("train.target_sync", [](RunConfig& c) -> int& { return c.train.target_sync; }));
    f.push_back(real("train.learning_rate", [](RunConfig& c) -> double& { return c.train.adam.learning_rate; }));
    f.push_back(real("train.adam_beta1", [](RunConfig& c) -> double& { return c.train.adam.beta1; }));
    f.push_back(real("train.adam_beta2", [](RunConfig& c) -> double& { return c.train.adam.beta2; }));
    f.push_back(real("train.adam_epsilon", [](RunConfig& c) -> double& { return c.train.adam.epsilon; }));
    f.push_back(real("train.grad_clip", [](RunConfig& c) -> double& { return c.train.grad_clip; }));
    f.push_back(real("train.bootstrap_p", [](RunConfig& c) -> double& { return c.train.bootstrap_p; }));
    f.push_back({"train.epsilon_schedule",
                 [](RunConfig& c, const std::string& k, const std::string& v) {
                   if (v == "auto") {
                     c.schedule.reset();
                     return;
                   }
                   std::vector<EpsilonSchedule::Breakpoint> points;
                   for (const auto& item : split(v, ',')) {
                     const auto colon = item.find(':');
                     if (colon == std::string::npos) throw ConfigError(k + ": expected episode:epsilon, got '" + item + "'");
                     points.push_back({parse_real(k, trim(item.substr(0, colon))),
                                       parse_real(k, trim(item.substr(colon + 1)))});
                   }
                   EpsilonSchedule{points};
                   c.schedule = points;
                 },
                 [](const RunConfig& c) {
                   if (!c.schedule) return std::string("auto");
                   return join<EpsilonSchedule::Breakpoint>(*c.schedule, [](const EpsilonSchedule::Breakpoint& p) {
                     return format_double(p.episode) + ':' + format_double(p.epsilon);
                   });
                 }});
    f.push_back(integer<int>("train.checkpoint_every", [](RunConfig& c) -> int& { return c.checkpoint_every; }));
    f.push_back(
        integer<std::size_t>("train.cache_capacity", [](RunConfig& c) -> std::size_t& { return c.cache_capacity; }));

    f.push_back(integer<int>("eval.episodes", [](RunConfig& c) -> int& { return c.eval_episodes; }));

    f.push_back({"io.out_dir", [](RunConfig& c, const std::string&, const std::string& v) { c.out_dir = v; },
                 [](const RunConfig& c) { return c.out_dir.string(); }});
    f.push_back(integer<std::uint64_t>("io.seed", [](RunConfig& c) -> std::uint64_t& { return c.seed; }));
    f.push_back(text("io.preset", [](RunConfig& c) -> std::string& { return c.preset; }));
    return f;
  }();
  return table;
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

void RunConfig::set(const std::string& key, const std::string& value) {
  for (const Field& f : fields()) {
    if (f.key == key) {
      f.set(*this, key, value);
      return;
    }
  }
  throw ConfigError("unknown config key '" + key + "'");
}

std::vector<std::pair<std::string, std::string>> RunConfig::entries() const {
  std::vector<std::pair<std::string, std::string>> out;
  for (const Field& f : fields()) out.emplace_back(f.key, f.get(*this));
  return out;
}

RewardSpec RunConfig::reward_spec() const {
  RewardSpec spec;
  spec.gamma = reward.gamma;
  spec.per_step = reward.per_step;
  const Molecule origin = origin_molecule().value_or(Molecule{});
  switch (reward.kind) {
    case RewardKind::Maximize: spec.variant = Maximize{reward.property}; break;
    case RewardKind::TargetRange: spec.variant = TargetRange{reward.property, reward.lower, reward.upper}; break;
    case RewardKind::ConstrainedLogP: spec.variant = ConstrainedLogP{origin, reward.delta, reward.lambda}; break;
    case RewardKind::MultiObjective: spec.variant = MultiObjective{origin, reward.weight, reward.property}; break;
  }
  return spec;
}

std::optional<Molecule> RunConfig::origin_molecule() const {
  if (reward.origin.empty()) return std::nullopt;
  return parse_smiles(reward.origin, mdp.valences);
}

std::shared_ptr<const PropertyRegistry> RunConfig::registry() const {
  auto out = std::make_shared<PropertyRegistry>();
  if (!reward.logp_table.empty()) out->set_logp_table(LogPTable::load(reward.logp_table));
  if (reward.sa_proxy == "ring_complexity") out->set_sa_proxy(ring_complexity_proxy);
  return out;
}

void RunConfig::finalize() {
  try {
    mdp.initial_molecule = parse_smiles(initial, mdp.valences);
    if (initial.empty() && (reward.kind == RewardKind::ConstrainedLogP || reward.kind == RewardKind::MultiObjective)) {
      if (auto origin = origin_molecule()) mdp.initial_molecule = *origin;
    }
    origin_molecule();
  } catch (const ParseError& e) {
    throw ConfigError(std::string("bad SMILES in config: ") + e.what());
  }
  train.schedule = schedule ? EpsilonSchedule(*schedule)
                            : EpsilonSchedule::linear(std::max(1.0, train.episodes / 2.0));
  if (checkpoint_every < 1) throw ConfigError("train.checkpoint_every must be positive");
  if (eval_episodes < 0) throw ConfigError("eval.episodes must be non-negative");
  mdp.validate();
  train.validate();
  reward_spec().validate();
  if (reward.kind == RewardKind::TargetRange && !(reward.lower <= reward.upper)) {
    throw ConfigError("reward.lower must not exceed reward.upper");
  }
}

std::vector<std::string> preset_names() { return {"full", "desk"}; }

RunConfig preset(const std::string& name) {
  RunConfig c;
  c.preset = name;
  if (name == "full") {
    c.train.hidden = {1024, 512, 128, 32};
    c.train.episodes = 5000;
  } else if (name == "desk") {
    c.train.hidden = {256, 128, 32};
    c.train.episodes = 2000;
    c.train.batch_size = 32;
    c.train.train_every = 4;
  } else {
    throw ConfigError("unknown preset '" + name + "' (expected full or desk)");
  }
  return c;
}

std::vector<std::pair<std::string, std::string>> read_key_values(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    strip_comment(line);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path.string() + ":" + std::to_string(number) + ": expected key=value, got '" + body + "'");
    }
    out.emplace_back(trim(body.substr(0, eq)), trim(body.substr(eq + 1)));
  }
  return out;
}

RunConfig load_config(const std::optional<std::filesystem::path>& path,
                      const std::optional<std::string>& preset_override) {
  std::vector<std::pair<std::string, std::string>> pairs;
  if (path) pairs = read_key_values(*path);
  std::string name = "full";
  for (const auto& [k, v] : pairs) {
    if (k == "io.preset") name = v;
  }
  if (preset_override) name = *preset_override;
  RunConfig config = preset(name);
  for (const auto& [k, v] : pairs) {
    if (k != "io.preset") config.set(k, v);
  }
  return config;
}

void write_config(const RunConfig& config, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  for (const auto& [k, v] : config.entries()) out << k << '=' << v << '\n';
  if (!out) throw IoError("failed writing " + path.string());
}

std::vector<Molecule> read_smiles_file(const std::filesystem::path& path, const ValenceTable& valences) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<Molecule> out;
  std::string line;
  while (std::getline(in, line)) {
    strip_comment(line);
    const std::string body = trim(line);
    if (!body.empty()) out.push_back(parse_smiles(body, valences));
  }
  return out;
}

}  // namespace molforge::cli
