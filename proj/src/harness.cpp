#include "ibandit/harness.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "ibandit/cfr.hpp"
#include "ibandit/eval.hpp"
#include "ibandit/online_mccfr.hpp"
#include "ibandit/session.hpp"

namespace ibandit {

namespace {

using nlohmann::json;

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

// Runs `count` jobs on up to `threads` workers; rethrows the first failure.
template <class Fn>
void parallel_for(std::size_t count, int threads, Fn fn) {
  std::size_t workers = threads > 0 ? static_cast<std::size_t>(threads)
                                    : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(count);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::unique_ptr<DiscoveringAgent> make_agent(const GameTree& game, const ExperimentConfig& c,
                                             Player p, StreamKey stream) {
  if (c.algo == Algorithm::kMccfr) {
    return std::make_unique<OnlineMccfrAgent>(c.eps, c.rm, stream);
  }
  AgentConfig ac;
  ac.rm = c.rm;
  ac.variant = c.variant;
  ac.schedule.k = c.k;
  ac.exploration = make_exploration(c.exploration, game.problem(p));
  return std::make_unique<BanditAgent>(std::move(ac), stream);
}

double agent_beta(const ExperimentConfig& c, const DiscoveringAgent& agent) {
  if (c.algo == Algorithm::kMccfr) return c.eps;
  if (c.algo == Algorithm::kCfr) return 0.0;
  return static_cast<const BanditAgent&>(agent).beta();
}

class Clock {
 public:
  explicit Clock(bool enabled) : enabled_(enabled), start_(std::chrono::steady_clock::now()) {}
  double elapsed_ms() const {
    if (!enabled_) return 0.0;
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  bool enabled_;
  std::chrono::steady_clock::time_point start_;
};

std::vector<CurvePoint> run_cfr_seed(const GameTree& game, const ExperimentConfig& config,
                                     std::uint64_t seed) {
  const Clock clock(config.timing);
  CfrSelfPlay cfr(game, config.rm, false);
  RegretAudit audit1(game.problem(Player::kOne));
  RegretAudit audit2(game.problem(Player::kTwo));
  const std::vector<std::int64_t> checkpoints = config.cadence.checkpoints(config.iters);
  std::vector<CurvePoint> out;
  std::size_t next = 0;
  for (std::int64_t t = 1; t <= config.iters; ++t) {
    const std::vector<double> y1(cfr.current(Player::kOne).begin(), cfr.current(Player::kOne).end());
    const std::vector<double> y2(cfr.current(Player::kTwo).begin(), cfr.current(Player::kTwo).end());
    cfr.step();
    if (config.audit) {
      const auto g1 = cfr.last_gradient(Player::kOne);
      const auto g2 = cfr.last_gradient(Player::kTwo);
      audit1.add(g1, expected_value<double>(y1, g1));
      audit2.add(g2, expected_value<double>(y2, g2));
    }
    if (next < checkpoints.size() && checkpoints[next] == t) {
      ++next;
      CurvePoint pt;
      pt.iter = t;
      pt.seed = seed;
      pt.exploitability =
          exploitability(game, cfr.average(Player::kOne), cfr.average(Player::kTwo));
      pt.regret_p1 = config.audit ? hindsight_regret(audit1) : kNan;
      pt.regret_p2 = config.audit ? hindsight_regret(audit2) : kNan;
      pt.beta = 0.0;
      pt.wallclock_ms = clock.elapsed_ms();
      out.push_back(pt);
    }
  }
  return out;
}

GameTree load_config_game(const std::string& name) {
  if (name != "kuhn" && name != "leduc" && name != "trivial" && !std::filesystem::exists(name)) {
    throw ConfigError("game", "'" + name + "' is neither a built-in game nor an existing file");
  }
  try {
    return load_game(name);
  } catch (const GameError& e) {
    throw ConfigError("game", e.what());
  }
}

double dot(std::span<const double> a, std::span<const double> b) {
  return expected_value<double>(a, b);
}

}  // namespace

// ---------------------------------------------------------------------------
// Configuration.

Algorithm parse_algorithm(std::string_view name) {
  if (name == "ib") return Algorithm::kBandit;
  if (name == "mccfr") return Algorithm::kMccfr;
  if (name == "cfr") return Algorithm::kCfr;
  throw ConfigError("algo", "unknown algorithm '" + std::string(name) + "'");
}

std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::kBandit:
      return "ib";
    case Algorithm::kMccfr:
      return "mccfr";
    case Algorithm::kCfr:
      return "cfr";
  }
  return "?";
}

EvalCadence EvalCadence::parse(const std::string& spec) {
  EvalCadence c;
  try {
    if (spec == "geom") return c;
    if (spec.rfind("geom:", 0) == 0) {
      std::size_t used = 0;
      c.per_decade = std::stoll(spec.substr(5), &used);
      if (used != spec.size() - 5 || c.per_decade < 1) throw std::invalid_argument(spec);
      return c;
    }
    std::size_t used = 0;
    c.stride = std::stoll(spec, &used);
    if (used != spec.size() || c.stride < 1) throw std::invalid_argument(spec);
    return c;
  } catch (const std::logic_error&) {
    throw ConfigError("eval_every", "expected 'geom', 'geom:<n>' or a positive stride, got '" +
                                        spec + "'");
  }
}

std::string EvalCadence::to_string() const {
  if (stride > 0) return std::to_string(stride);
  return "geom:" + std::to_string(per_decade);
}

std::vector<std::int64_t> EvalCadence::checkpoints(std::int64_t iterations) const {
  std::vector<std::int64_t> out;
  if (stride > 0) {
    for (std::int64_t t = stride; t < iterations; t += stride) out.push_back(t);
  } else {
    for (std::int64_t i = 0;; ++i) {
      const auto t = static_cast<std::int64_t>(
          std::llround(std::pow(10.0, static_cast<double>(i) / static_cast<double>(per_decade))));
      if (t >= iterations) break;
      if (out.empty() || out.back() < t) out.push_back(t);
    }
  }
  out.push_back(iterations);
  return out;
}

std::vector<std::uint64_t> parse_seeds(const std::string& spec) {
  std::vector<std::uint64_t> out;
  try {
    if (spec.find(',') == std::string::npos) {
      std::size_t used = 0;
      const long long n = std::stoll(spec, &used);
      if (used != spec.size() || n < 1) throw std::invalid_argument(spec);
      for (long long s = 0; s < n; ++s) out.push_back(static_cast<std::uint64_t>(s));
      return out;
    }
    std::stringstream in(spec);
    std::string item;
    while (std::getline(in, item, ',')) {
      std::size_t used = 0;
      const unsigned long long s = std::stoull(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(s);
    }
  } catch (const std::logic_error&) {
    throw ConfigError("seeds", "expected a count or a comma-separated list, got '" + spec + "'");
  }
  if (out.empty()) throw ConfigError("seeds", "no seeds given");
  return out;
}

void ExperimentConfig::validate() const {
  if (game.empty()) throw ConfigError("game", "missing");
  if (iters < 1) throw ConfigError("iters", "must be at least 1");
  if (seeds.empty()) throw ConfigError("seeds", "must not be empty");
  if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size()) {
    throw ConfigError("seeds", "duplicate seed");
  }
  if (algo == Algorithm::kBandit && !(k > 0.0 && std::isfinite(k))) {
    throw ConfigError("k", "must be positive");
  }
  if (!(eps >= 0.0 && eps <= 1.0)) throw ConfigError("eps", "must be in [0, 1]");
  if (exploration != "uniform" && exploration != "balanced") {
    throw ConfigError("exploration", "expected uniform or balanced");
  }
  if (cadence.stride < 0 || cadence.per_decade < 1) throw ConfigError("eval_every", "invalid");
}

json ExperimentConfig::to_json() const {
  json j;
  j["game"] = game;
  j["algo"] = std::string(ibandit::to_string(algo));
  j["variant"] = std::string(ibandit::to_string(variant));
  j["k"] = k;
  j["exploration"] = exploration;
  j["eps"] = eps;
  j["rm"] = rm == RmVariant::kRm ? "rm" : "rm+";
  j["iters"] = iters;
  j["seeds"] = seeds;
  j["eval_every"] = cadence.to_string();
  j["audit"] = audit;
  j["audit_mode"] = audit_mode == AuditMode::kSampled ? "sampled" : "expected";
  j["timing"] = timing;
  if (!opponent.empty()) {
    j["opponent"] = opponent;
    j["player"] = number(agent);
  }
  return j;
}

ExperimentConfig ExperimentConfig::from_json(const json& j, const ExperimentConfig& base,
                                             const std::string& path) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
  ExperimentConfig c = base;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& key = it.key();
    const json& v = it.value();
    const std::string field = path + "." + key;
    try {
      if (key == "game") {
        c.game = v.get<std::string>();
      } else if (key == "algo") {
        c.algo = parse_algorithm(v.get<std::string>());
      } else if (key == "variant") {
        c.variant = parse_rollout_variant(v.get<std::string>());
      } else if (key == "k") {
        c.k = v.get<double>();
      } else if (key == "exploration") {
        c.exploration = v.get<std::string>();
      } else if (key == "eps") {
        c.eps = v.get<double>();
      } else if (key == "rm") {
        c.rm = parse_rm_variant(v.get<std::string>());
      } else if (key == "iters") {
        c.iters = v.get<std::int64_t>();
      } else if (key == "seeds") {
        if (v.is_array()) {
          c.seeds = v.get<std::vector<std::uint64_t>>();
        } else if (v.is_number_integer()) {
          c.seeds = parse_seeds(std::to_string(v.get<std::int64_t>()));
        } else {
          c.seeds = parse_seeds(v.get<std::string>());
        }
      } else if (key == "eval_every") {
        c.cadence = EvalCadence::parse(v.is_string() ? v.get<std::string>()
                                                     : std::to_string(v.get<std::int64_t>()));
      } else if (key == "audit") {
        c.audit = v.get<bool>();
      } else if (key == "audit_mode") {
        const std::string m = v.get<std::string>();
        if (m == "sampled") {
          c.audit_mode = AuditMode::kSampled;
        } else if (m == "expected") {
          c.audit_mode = AuditMode::kExpected;
        } else {
          throw ConfigError(field, "expected sampled or expected");
        }
      } else if (key == "timing") {
        c.timing = v.get<bool>();
      } else if (key == "threads") {
        c.threads = v.get<int>();
      } else if (key == "opponent") {
        c.opponent = v.get<std::string>();
      } else if (key == "player") {
        c.agent = player_from_number(v.get<int>());
      } else {
        throw ConfigError(field, "unknown setting");
      }
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError(field, e.what());
    }
  }
  return c;
}

// ---------------------------------------------------------------------------
// Runs.

std::vector<CurvePoint> run_selfplay_seed(const GameTree& game, const ExperimentConfig& config,
                                          std::uint64_t seed) {
  config.validate();
  if (config.algo == Algorithm::kCfr) return run_cfr_seed(game, config, seed);
  const Clock clock(config.timing);
  const StreamKey root(seed);
  const StreamKey chance = root.derive("chance");
  auto a1 = make_agent(game, config, Player::kOne, root.derive("p1"));
  auto a2 = make_agent(game, config, Player::kTwo, root.derive("p2"));
  RegretAudit audit1(game.problem(Player::kOne));
  RegretAudit audit2(game.problem(Player::kTwo));
  EnvironmentSession session(game, Player::kOne, *a2, chance);
  const std::vector<std::int64_t> checkpoints = config.cadence.checkpoints(config.iters);
  std::vector<CurvePoint> out;
  std::size_t next = 0;
  for (std::int64_t t = 1; t <= config.iters; ++t) {
    a1->begin_iteration(t);
    session.begin(t);
    play_session(session, *a1);
    const double u = session.payoff();
    if (config.audit) {
      if (config.audit_mode == AuditMode::kSampled) {
        audit1.add(true_gradient(game, Player::kOne, chance, t, *a2), u);
        audit2.add(true_gradient(game, Player::kTwo, chance, t, *a1), -u);
      } else {
        const auto& p1 = game.problem(Player::kOne);
        const auto& p2 = game.problem(Player::kTwo);
        const auto g1 = expected_gradient(game, Player::kOne, mixed_sequence_form(p2, *a2));
        const auto g2 = expected_gradient(game, Player::kTwo, mixed_sequence_form(p1, *a1));
        audit1.add(g1, dot(g1, committed_sequence_form(p1, *a1)));
        audit2.add(g2, dot(g2, committed_sequence_form(p2, *a2)));
      }
    }
    const double beta = agent_beta(config, *a1);
    a1->end_iteration(u);
    session.close();
    if (next < checkpoints.size() && checkpoints[next] == t) {
      ++next;
      CurvePoint pt;
      pt.iter = t;
      pt.seed = seed;
      pt.exploitability = exploitability(game, a1->average_strategy(), a2->average_strategy());
      pt.regret_p1 = config.audit ? hindsight_regret(audit1) : kNan;
      pt.regret_p2 = config.audit ? hindsight_regret(audit2) : kNan;
      pt.beta = beta;
      pt.wallclock_ms = clock.elapsed_ms();
      out.push_back(pt);
    }
  }
  return out;
}

std::vector<CurvePoint> run_vs_fixed_seed(const GameTree& game, const ExperimentConfig& config,
                                          const BehavioralStrategy* opponent, std::uint64_t seed) {
  config.validate();
  if (config.algo == Algorithm::kCfr) {
    throw ConfigError("algo", "fixed-opponent runs need a learning agent (ib or mccfr)");
  }
  const Clock clock(config.timing);
  const Player p = config.agent;
  const Player o = ibandit::opponent(p);
  const StreamKey root(seed);
  const StreamKey chance = root.derive("chance");
  const StreamKey opp_stream = root.derive("opponent");
  auto agent = make_agent(game, config, p, root.derive(p == Player::kOne ? "p1" : "p2"));
  RegretAudit audit(game.problem(p));
  std::vector<double> opp_seq;
  std::unique_ptr<FixedController> fixed;
  if (opponent != nullptr) {
    opp_seq = sequence_form_of(game, o, *opponent);
    fixed = std::make_unique<FixedController>(*opponent, opp_stream);
  }
  const std::vector<std::int64_t> checkpoints = config.cadence.checkpoints(config.iters);
  std::vector<CurvePoint> out;
  std::size_t next = 0;
  for (std::int64_t t = 1; t <= config.iters; ++t) {
    agent->begin_iteration(t);
    if (opponent == nullptr) {
      // Best response to the agent's current mixed strategy.
      const auto w = mixed_sequence_form(game.problem(p), *agent);
      const BestResponse br = best_response(game, o, w);
      DenseBehavioral<double> pure(game.problem(o).num_decisions());
      for (std::size_t j = 0; j < pure.size(); ++j) {
        pure[j].assign(game.problem(o).decision(static_cast<DecisionId>(j)).num_actions(), 0.0);
        pure[j][br.choice[j]] = 1.0;
      }
      fixed = std::make_unique<FixedController>(to_labeled(game.problem(o), pure), opp_stream);
    }
    EnvironmentSession session(game, p, *fixed, chance);
    session.begin(t);
    play_session(session, *agent);
    const double u = session.payoff();
    if (config.audit) audit.add(true_gradient(game, p, chance, t, *fixed), u);
    const double beta = agent_beta(config, *agent);
    agent->end_iteration(u);
    session.close();
    if (next < checkpoints.size() && checkpoints[next] == t) {
      ++next;
      CurvePoint pt;
      pt.iter = t;
      pt.seed = seed;
      const auto avg = sequence_form_of(game, p, agent->average_strategy());
      if (opponent != nullptr) {
        const auto g = expected_gradient(game, p, opp_seq);
        const double br = best_pure_response<double>(game.problem(p), g).value;
        pt.exploitability = std::max(0.0, br - dot(avg, g));
      } else {
        // Against an adaptive adversary: how much a best-responding opponent
        // wins from the average strategy.
        pt.exploitability = best_response(game, o, avg).value;
      }
      const double r = config.audit ? hindsight_regret(audit) : kNan;
      pt.regret_p1 = p == Player::kOne ? r : kNan;
      pt.regret_p2 = p == Player::kTwo ? r : kNan;
      pt.beta = beta;
      pt.wallclock_ms = clock.elapsed_ms();
      out.push_back(pt);
    }
  }
  return out;
}

namespace {

std::vector<CurvePoint> run_all_seeds(const ExperimentConfig& config,
                                      const std::function<std::vector<CurvePoint>(
                                          const GameTree&, std::uint64_t)>& run_one,
                                      const GameTree& game) {
  std::vector<std::vector<CurvePoint>> per_seed(config.seeds.size());
  parallel_for(config.seeds.size(), config.threads,
               [&](std::size_t i) { per_seed[i] = run_one(game, config.seeds[i]); });
  std::vector<CurvePoint> out;
  for (auto& rows : per_seed) out.insert(out.end(), rows.begin(), rows.end());
  return out;
}

}  // namespace

std::vector<CurvePoint> run_selfplay(const ExperimentConfig& config) {
  config.validate();
  const GameTree game = load_config_game(config.game);
  return run_all_seeds(
      config,
      [&](const GameTree& g, std::uint64_t seed) { return run_selfplay_seed(g, config, seed); },
      game);
}

std::vector<CurvePoint> run_vs_fixed(const ExperimentConfig& config) {
  config.validate();
  if (config.opponent.empty()) throw ConfigError("opponent", "missing");
  const GameTree game = load_config_game(config.game);
  std::optional<BehavioralStrategy> opponent;
  if (config.opponent != "adversarial") {
    std::ifstream in(config.opponent);
    if (!in) throw ConfigError("opponent", "cannot open '" + config.opponent + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    try {
      opponent = load_strategy_json(buf.str(), game, ibandit::opponent(config.agent));
    } catch (const StructuralError& e) {
      throw ConfigError("opponent", e.what());
    }
  }
  const BehavioralStrategy* opp = opponent ? &*opponent : nullptr;
  return run_all_seeds(
      config,
      [&](const GameTree& g, std::uint64_t seed) {
        return run_vs_fixed_seed(g, config, opp, seed);
      },
      game);
}

// ---------------------------------------------------------------------------
// Strategies and files.

BehavioralStrategy load_strategy_json(const std::string& text, const GameTree& game, Player p) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw StructuralError(std::string("invalid strategy JSON: ") + e.what());
  }
  if (!doc.is_object()) throw StructuralError("strategy JSON must be an object");
  const DecisionProblem& problem = game.problem(p);
  BehavioralStrategy out;
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    if (!problem.find_decision(it.key())) {
      throw StructuralError("strategy names '" + it.key() + "', which is not a decision of player " +
                            std::to_string(number(p)));
    }
  }
  for (const DecisionInfo& info : problem.decisions()) {
    auto it = doc.find(info.label);
    if (it == doc.end() || !it->is_object()) {
      throw StructuralError("strategy is missing decision '" + info.label + "'");
    }
    std::vector<double> dist(info.num_actions(), 0.0);
    double total = 0.0;
    for (auto a = it->begin(); a != it->end(); ++a) {
      auto pos = std::find(info.actions.begin(), info.actions.end(), a.key());
      if (pos == info.actions.end()) {
        throw StructuralError("unknown action '" + a.key() + "' at '" + info.label + "'");
      }
      const double v = a.value().get<double>();
      if (!(v >= 0.0)) throw StructuralError("negative probability at '" + info.label + "'");
      dist[static_cast<std::size_t>(pos - info.actions.begin())] = v;
      total += v;
    }
    if (std::abs(total - 1.0) > 1e-9) {
      throw StructuralError("probabilities at '" + info.label + "' do not sum to 1");
    }
    out.emplace(info.label, std::move(dist));
  }
  return out;
}

std::string dump_strategy_json(const BehavioralStrategy& s, const GameTree& game, Player p) {
  json doc = json::object();
  const DenseBehavioral<double> dense = to_dense_with_uniform_default(game.problem(p), s);
  for (std::size_t j = 0; j < dense.size(); ++j) {
    const DecisionInfo& info = game.problem(p).decision(static_cast<DecisionId>(j));
    json row = json::object();
    for (std::size_t a = 0; a < info.num_actions(); ++a) row[info.actions[a]] = dense[j][a];
    doc[info.label] = std::move(row);
  }
  return doc.dump(2) + "\n";
}

std::string format_curve_csv(const std::vector<CurvePoint>& points) {
  std::string out = std::string(kCurveHeader) + "\n";
  for (const CurvePoint& p : points) {
    out += std::to_string(p.iter) + "," + std::to_string(p.seed) + "," +
           format_number(p.exploitability) + "," + format_number(p.regret_p1) + "," +
           format_number(p.regret_p2) + "," + format_number(p.beta) + "," +
           format_number(p.wallclock_ms) + "\n";
  }
  return out;
}

void write_file_atomic(const std::string& path, const std::string& contents) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
    out << contents;
    out.flush();
    if (!out) throw std::runtime_error("write failed for '" + tmp.string() + "'");
  }
  fs::rename(tmp, target);
}

std::string config_hash(const ExperimentConfig& config) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(hash_label(config.to_json().dump())));
  return buf;
}

// ---------------------------------------------------------------------------
// Sweeps.

json run_sweep(const json& grid, const std::string& out_dir) {
  if (!grid.is_object()) throw ConfigError("grid", "expected an object");
  ExperimentConfig base;
  if (auto it = grid.find("base"); it != grid.end()) {
    base = ExperimentConfig::from_json(*it, base, "base");
  }
  auto axes_it = grid.find("grid");
  if (axes_it == grid.end() || !axes_it->is_object() || axes_it->empty()) {
    throw ConfigError("grid", "the grid must name at least one setting");
  }
  std::vector<std::pair<std::string, std::vector<json>>> axes;
  for (auto it = axes_it->begin(); it != axes_it->end(); ++it) {
    if (!it.value().is_array() || it.value().empty()) {
      throw ConfigError("grid." + it.key(), "expected a non-empty list of values");
    }
    axes.emplace_back(it.key(), std::vector<json>(it.value().begin(), it.value().end()));
  }

  struct Cell {
    json params;
    ExperimentConfig config;
    std::string file;
  };
  std::vector<Cell> cells;
  std::vector<std::size_t> idx(axes.size(), 0);
  for (;;) {
    Cell cell;
    cell.params = json::object();
    std::string name;
    for (std::size_t a = 0; a < axes.size(); ++a) {
      const json& v = axes[a].second[idx[a]];
      cell.params[axes[a].first] = v;
      std::string text = v.is_string() ? v.get<std::string>() : v.dump();
      if (!name.empty()) name += "_";
      name += axes[a].first + "=" + text;
    }
    for (char& ch : name) {
      if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '.' && ch != '=' && ch != '_' &&
          ch != '-' && ch != '+') {
        ch = '-';
      }
    }
    char prefix[16];
    std::snprintf(prefix, sizeof(prefix), "cell%03zu_", cells.size());
    cell.file = std::string(prefix) + name + ".csv";
    cell.config = ExperimentConfig::from_json(cell.params, base, "grid");
    cell.config.validate();
    cell.config.threads = 1;
    cells.push_back(std::move(cell));
    std::size_t a = axes.size();
    while (a > 0) {
      --a;
      if (++idx[a] < axes[a].second.size()) break;
      idx[a] = 0;
      if (a == 0) {
        a = axes.size() + 1;
        break;
      }
    }
    if (a == axes.size() + 1) break;
  }

  std::vector<json> entries(cells.size());
  std::mutex mu;
  parallel_for(cells.size(), base.threads, [&](std::size_t i) {
    json e;
    e["params"] = cells[i].params;
    e["file"] = cells[i].file;
    e["config_hash"] = config_hash(cells[i].config);
    try {
      const auto rows = cells[i].config.opponent.empty() ? run_selfplay(cells[i].config)
                                                         : run_vs_fixed(cells[i].config);
      write_file_atomic((std::filesystem::path(out_dir) / cells[i].file).string(),
                        format_curve_csv(rows));
      e["status"] = "ok";
    } catch (const std::exception& ex) {
      e["status"] = "failed";
      e["error"] = ex.what();
    }
    std::lock_guard<std::mutex> lock(mu);
    entries[i] = std::move(e);
  });
  json manifest;
  manifest["cells"] = entries;
  write_file_atomic((std::filesystem::path(out_dir) / "manifest.json").string(),
                    manifest.dump(2) + "\n");
  return manifest;
}

}  // namespace ibandit
