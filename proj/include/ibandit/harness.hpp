#pragma once

// Experiment driver: self-play and fixed-opponent runs, evaluation
// checkpoints, CSV curves and parameter sweeps.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ibandit/bandit_agent.hpp"
#include "ibandit/game.hpp"
#include "ibandit/local_rm.hpp"
#include "json.hpp"

namespace ibandit {

// Invalid experiment configuration; `field()` names the offending setting.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::invalid_argument(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

enum class Algorithm { kBandit, kMccfr, kCfr };
enum class AuditMode { kSampled, kExpected };

Algorithm parse_algorithm(std::string_view name);  // ib|mccfr|cfr
std::string_view to_string(Algorithm a);

// Evaluation checkpoints: geometric (N points per decade) or a fixed stride.
// The final iteration is always included.
struct EvalCadence {
  std::int64_t per_decade = 20;
  std::int64_t stride = 0;  // > 0 selects the fixed stride

  static EvalCadence parse(const std::string& spec);  // "geom", "geom:N" or "<stride>"
  std::string to_string() const;
  std::vector<std::int64_t> checkpoints(std::int64_t iterations) const;
};

struct ExperimentConfig {
  std::string game = "kuhn";
  Algorithm algo = Algorithm::kBandit;
  RolloutVariant variant = RolloutVariant::kOnPath;
  double k = 10.0;
  std::string exploration = "uniform";
  double eps = 0.6;
  RmVariant rm = RmVariant::kRmPlus;
  std::int64_t iters = 1000;
  std::vector<std::uint64_t> seeds{0};
  EvalCadence cadence;
  bool audit = true;
  AuditMode audit_mode = AuditMode::kSampled;
  bool timing = true;  // false writes 0 in wallclock_ms for byte-stable output
  int threads = 0;     // 0: one per hardware thread

  // Fixed-opponent runs: a strategy JSON path, or "adversarial" for a best
  // response recomputed against the agent's current strategy every step.
  std::string opponent;
  Player agent = Player::kOne;

  void validate() const;  // throws ConfigError
  nlohmann::json to_json() const;
  // Unknown keys are rejected; missing keys keep the values of `base`.
  static ExperimentConfig from_json(const nlohmann::json& j, const ExperimentConfig& base,
                                    const std::string& path = "config");
};

// "5" means seeds 0..4; "3,7,11" lists them.
std::vector<std::uint64_t> parse_seeds(const std::string& spec);

struct CurvePoint {
  std::int64_t iter = 0;
  std::uint64_t seed = 0;
  double exploitability = 0.0;
  double regret_p1 = 0.0;
  double regret_p2 = 0.0;
  double beta = 0.0;
  double wallclock_ms = 0.0;
};

inline constexpr const char* kCurveHeader =
    "iter,seed,exploitability,regret_p1,regret_p2,beta,wallclock_ms";

std::vector<CurvePoint> run_selfplay_seed(const GameTree& game, const ExperimentConfig& config,
                                          std::uint64_t seed);
std::vector<CurvePoint> run_vs_fixed_seed(const GameTree& game, const ExperimentConfig& config,
                                          const BehavioralStrategy* opponent, std::uint64_t seed);

// All seeds, concurrently; rows grouped by seed in the order of config.seeds.
std::vector<CurvePoint> run_selfplay(const ExperimentConfig& config);
std::vector<CurvePoint> run_vs_fixed(const ExperimentConfig& config);

// Strategy JSON: {infoset: {action label: probability}}. Every decision of
// `p` must be covered.
BehavioralStrategy load_strategy_json(const std::string& text, const GameTree& game, Player p);
std::string dump_strategy_json(const BehavioralStrategy& s, const GameTree& game, Player p);

std::string format_curve_csv(const std::vector<CurvePoint>& points);
// Writes to a temporary file in the same directory, then renames.
void write_file_atomic(const std::string& path, const std::string& contents);

std::string config_hash(const ExperimentConfig& config);

// Grid JSON: {"base": {config}, "grid": {key: [values...]}}. Cells are the
// cartesian product of the grid values in key order. Returns the manifest,
// which is also written to <out_dir>/manifest.json.
nlohmann::json run_sweep(const nlohmann::json& grid, const std::string& out_dir);

}  // namespace ibandit
