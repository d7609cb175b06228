#pragma once

// Regret minimization under interactive bandit feedback with a decision
// space discovered on the fly. The agent never sees the game: it learns the
// structure from the signals and action sets presented during play.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ibandit/discovered_tree.hpp"
#include "ibandit/rng.hpp"
#include "ibandit/session.hpp"
#include "ibandit/tfsdm.hpp"

namespace ibandit {

// beta_t = min(1, k * t^(-1/4)), or a constant when `fixed` is set.
struct Schedule {
  double k = 10.0;
  std::optional<double> fixed;

  double beta(std::int64_t t) const;
};

enum class RolloutVariant { kOnPath, kUpfront, kAlternating };

RolloutVariant parse_rollout_variant(std::string_view name);  // on-path|upfront|alternating
std::string_view to_string(RolloutVariant v);

// Positive weights over (decision, action), looked up by the signal the agent
// saw just before the decision.
class ExplorationFunction {
 public:
  enum class Kind { kUniform, kBalanced, kCustom };
  using Fn = std::function<double(std::string_view signal, std::size_t action,
                                  std::span<const std::string> actions)>;

  static ExplorationFunction uniform();
  // Number of terminals of `problem` under each sequence; decisions are
  // identified by their labels.
  static ExplorationFunction balanced(const DecisionProblem& problem);
  static ExplorationFunction custom(Fn fn);

  Kind kind() const { return kind_; }
  double value(std::string_view signal, std::size_t action,
               std::span<const std::string> actions) const;
  // h(j, .) / sum h(j, .); throws std::invalid_argument on a nonpositive value.
  std::vector<double> normalized(std::string_view signal,
                                 std::span<const std::string> actions) const;

 private:
  Kind kind_ = Kind::kUniform;
  Fn fn_;
};

ExplorationFunction make_exploration(std::string_view name, const DecisionProblem& problem);

struct TrajectoryStep {
  std::int32_t node = -1;
  std::int32_t action = -1;
  double x = 1.0;        // recommended probability of the action
  double h = 1.0;        // normalized exploration weight of the action
  double sampled = 1.0;  // probability the action was actually drawn with
};

struct TrajectoryRecord {
  std::vector<TrajectoryStep> steps;
  double payoff = 0.0;
  double beta = 0.0;
  double gamma = 1.0;  // probability of the trajectory under the mixed strategy
  RolloutVariant variant = RolloutVariant::kOnPath;
  bool explore = false;  // upfront coin outcome
  bool closed = false;
};

// Single nonzero entry of the importance-weighted gradient estimate. `node`
// is -1 when no decision was reached (mass on the empty sequence).
struct SparseEstimate {
  std::int32_t node = -1;
  std::int32_t action = -1;
  double value = 0.0;
};

SparseEstimate estimate_gradient(const TrajectoryRecord& record);

// Local gradient handed to one node during the last regret update.
struct LocalGradient {
  std::int32_t node = -1;
  std::vector<double> gradient;
};

// Shared machinery of agents that learn over a DiscoveredTree from sampled
// trajectories: history tracking, discovery, committed sampling, the average
// phase and the path regret update.
class DiscoveringAgent : public Controller {
 public:
  DiscoveringAgent(RmVariant rm, StreamKey stream);

  void begin_iteration(std::int64_t t) override;
  void observe_signal(std::string_view signal) override;
  std::size_t act(std::span<const std::string> actions) override;
  void end_iteration(double payoff) override;

  PlayerCursor root_cursor() const override { return {}; }
  PlayerCursor after_signal(const PlayerCursor& c, std::string_view signal) const override;
  PlayerCursor after_action(const PlayerCursor& c, std::size_t action,
                            std::span<const std::string> actions) const override;
  std::size_t committed_action(const PlayerCursor& c,
                               std::span<const std::string> actions) const override;
  std::vector<double> mixed_distribution(const PlayerCursor& c,
                                         std::span<const std::string> actions) const override;

  const DiscoveredTree& tree() const { return tree_; }
  const TrajectoryRecord& last_trajectory() const { return record_; }
  std::span<const LocalGradient> last_local_gradients() const { return last_gradients_; }
  std::int64_t iteration() const { return t_; }
  bool in_iteration() const { return active_; }

  BehavioralStrategy average_strategy() const { return tree_.average_strategy(); }
  BehavioralStrategy current_strategy() const { return tree_.current_strategy(); }

  // Node data as seen from a cursor; uniform recommendation and freshly
  // computed exploration weights where the history is undiscovered.
  struct NodeView {
    std::vector<double> x;
    std::vector<double> h;
  };
  NodeView view(const PlayerCursor& c, std::span<const std::string> actions) const;

 protected:
  // Unnormalized weights the committed action is drawn from.
  virtual std::vector<double> sampling_weights(const PlayerCursor& c, const NodeView& v) const = 0;
  // Normalized action distribution of the mixed strategy at the cursor.
  virtual std::vector<double> conditional(const PlayerCursor& c, const NodeView& v) const = 0;
  virtual std::vector<double> exploration_weights(std::string_view signal,
                                                  std::span<const std::string> actions) const = 0;
  virtual void on_begin(std::int64_t t) = 0;
  virtual double trajectory_probability(const TrajectoryRecord& r) const = 0;

  std::int64_t t_ = 0;
  TrajectoryRecord record_;
  StreamKey stream_;

 private:
  DiscoveredTree tree_;
  StreamKey act_stream_;
  bool active_ = false;
  PlayerCursor live_;
  std::string live_signal_;
  std::vector<LocalGradient> last_gradients_;
};

struct AgentConfig {
  RmVariant rm = RmVariant::kRmPlus;
  RolloutVariant variant = RolloutVariant::kOnPath;
  Schedule schedule;
  ExplorationFunction exploration = ExplorationFunction::uniform();
};

class BanditAgent final : public DiscoveringAgent {
 public:
  BanditAgent(AgentConfig config, StreamKey stream);

  const AgentConfig& config() const { return config_; }
  double beta() const { return beta_; }
  RolloutVariant current_variant() const { return current_; }
  bool exploring() const { return explore_; }

 protected:
  std::vector<double> sampling_weights(const PlayerCursor& c, const NodeView& v) const override;
  std::vector<double> conditional(const PlayerCursor& c, const NodeView& v) const override;
  std::vector<double> exploration_weights(std::string_view signal,
                                          std::span<const std::string> actions) const override;
  void on_begin(std::int64_t t) override;
  double trajectory_probability(const TrajectoryRecord& r) const override;

 private:
  AgentConfig config_;
  double beta_ = 1.0;
  RolloutVariant current_ = RolloutVariant::kOnPath;
  bool explore_ = false;
};

// Exploration strategy xi in sequence form over a fully known problem.
std::vector<double> exploration_strategy(const DecisionProblem& problem,
                                         const ExplorationFunction& h);

}  // namespace ibandit
