#pragma once

// Playing a game from one player's seat. The other seat (and chance) form the
// agent's environment; the agent only sees signals, its own actions and the
// final payoff.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ibandit/game.hpp"
#include "ibandit/rng.hpp"

namespace ibandit {

// Where a controller is within one iteration, as a value that can be copied
// and branched. `position` indexes the controller's own model (-1 when the
// history is unknown to it); `key` hashes the full history.
struct PlayerCursor {
  std::int64_t position = 0;
  std::uint64_t key = 0;
  double reach = 1.0;          // exploitation reach of the sampled path
  double explore_reach = 1.0;  // exploration reach of the sampled path
  std::string_view signal;     // last observed signal
};

// A player that can be asked to act during an iteration. The read-only half
// exposes the pure strategy the controller has committed to for the current
// iteration, for any history, without touching its state; `act` must return
// `committed_action` of the live cursor.
class Controller {
 public:
  virtual ~Controller() = default;

  virtual void begin_iteration(std::int64_t t) = 0;
  virtual void observe_signal(std::string_view signal) = 0;
  virtual std::size_t act(std::span<const std::string> actions) = 0;
  virtual void end_iteration(double payoff) = 0;

  virtual PlayerCursor root_cursor() const = 0;
  virtual PlayerCursor after_signal(const PlayerCursor& c, std::string_view signal) const = 0;
  virtual PlayerCursor after_action(const PlayerCursor& c, std::size_t action,
                                    std::span<const std::string> actions) const = 0;
  virtual std::size_t committed_action(const PlayerCursor& c,
                                       std::span<const std::string> actions) const = 0;
  // Distribution the committed action was drawn from, conditioned on the
  // path leading to `c`.
  virtual std::vector<double> mixed_distribution(const PlayerCursor& c,
                                                 std::span<const std::string> actions) const = 0;
};

// Plays a fixed behavioral strategy keyed by the last signal (the infoset
// label in games). A fresh action is drawn per infoset and iteration.
class FixedController final : public Controller {
 public:
  FixedController(BehavioralStrategy strategy, StreamKey stream);

  void begin_iteration(std::int64_t t) override;
  void observe_signal(std::string_view signal) override;
  std::size_t act(std::span<const std::string> actions) override;
  void end_iteration(double) override {}

  PlayerCursor root_cursor() const override { return {}; }
  PlayerCursor after_signal(const PlayerCursor& c, std::string_view signal) const override;
  PlayerCursor after_action(const PlayerCursor& c, std::size_t action,
                            std::span<const std::string> actions) const override;
  std::size_t committed_action(const PlayerCursor& c,
                               std::span<const std::string> actions) const override;
  std::vector<double> mixed_distribution(const PlayerCursor& c,
                                         std::span<const std::string> actions) const override;

  const BehavioralStrategy& strategy() const { return strategy_; }

 private:
  BehavioralStrategy strategy_;
  StreamKey stream_;
  std::int64_t t_ = 0;
  PlayerCursor live_;
};

// Chance outcome committed at node `n` for iteration t.
std::size_t chance_outcome(const GameTree& game, NodeIndex n, const StreamKey& chance,
                           std::int64_t t);

// One iteration from the agent's seat. The opponent controller is driven
// lazily as the game reaches its decisions.
class EnvironmentSession {
 public:
  EnvironmentSession(const GameTree& game, Player agent, Controller& opponent,
                     StreamKey chance);

  // Starts iteration t (and the opponent's iteration) and advances to the
  // agent's first decision or to a terminal.
  void begin(std::int64_t t);
  bool finished() const;
  // Signal shown to the agent before its pending decision.
  std::string_view signal() const;
  std::span<const std::string> actions() const;
  // Throws std::logic_error when finished, std::out_of_range on a bad index.
  void step(std::size_t action);

  NodeIndex terminal() const;
  double payoff() const;  // agent's payoff, game units
  // Reports the outcome to the opponent; the session can then begin again.
  void close();

  Player agent() const { return agent_; }
  const GameTree& game() const { return *game_; }

 private:
  void advance();

  const GameTree* game_;
  Player agent_;
  Controller* opponent_;
  StreamKey chance_;
  std::int64_t t_ = 0;
  NodeIndex node_ = -1;
  bool active_ = false;
};

// Drives `agent` through an open session until a terminal is reached.
void play_session(EnvironmentSession& session, Controller& agent);

// Exact gradient of the agent's reward for iteration t, given the
// environment's committed choices (chance stream and the opponent's committed
// pure strategy). Sequence-indexed over game.problem(p).
std::vector<double> true_gradient(const GameTree& game, Player p, const StreamKey& chance,
                                  std::int64_t t, const Controller& opponent);

// Gradient against a fixed opponent sequence-form strategy, with chance in
// expectation.
std::vector<double> expected_gradient(const GameTree& game, Player p,
                                      std::span<const double> opponent_strategy);

// Sequence-form strategy of a controller over a player's problem: the mixed
// one (w^t for a learning agent) or the committed pure one.
std::vector<double> mixed_sequence_form(const DecisionProblem& problem,
                                        const Controller& controller);
std::vector<double> committed_sequence_form(const DecisionProblem& problem,
                                            const Controller& controller);

}  // namespace ibandit
