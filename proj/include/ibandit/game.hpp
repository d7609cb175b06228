#pragma once

// Two-player zero-sum extensive-form games with chance, and the per-player
// decision-problem view of them.

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ibandit/tfsdm.hpp"

namespace ibandit {

enum class Player : std::uint8_t { kOne = 0, kTwo = 1 };

inline std::size_t index(Player p) { return static_cast<std::size_t>(p); }
inline Player opponent(Player p) { return p == Player::kOne ? Player::kTwo : Player::kOne; }
inline int number(Player p) { return static_cast<int>(p) + 1; }
// Accepts 1 or 2.
Player player_from_number(int n);

// Malformed game description. `path()` points at the offending JSON element
// ("nodes.<id>.outcomes") when the game came from JSON.
class GameError : public std::runtime_error {
 public:
  GameError(std::string path, const std::string& message)
      : std::runtime_error(path + ": " + message), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

struct GameNode {
  enum class Kind { kDecision, kChance, kTerminal };

  std::string id;
  Kind kind = Kind::kTerminal;
  Player player = Player::kOne;      // decision
  std::string infoset;               // decision
  std::vector<std::string> labels;   // action or outcome labels
  std::vector<NodeIndex> children;
  std::vector<double> probs;         // chance
  double payoff_p1 = 0.0;            // terminal
};

class GameTree {
 public:
  // Validates the game (chance sums, infoset consistency, perfect recall,
  // tree shape) and renumbers nodes in depth-first preorder from the root.
  static GameTree create(std::vector<GameNode> nodes, NodeIndex root,
                         std::string name = "game");

  const std::string& name() const { return name_; }
  std::span<const GameNode> nodes() const { return nodes_; }
  const GameNode& node(NodeIndex n) const { return nodes_[n]; }
  NodeIndex root() const { return 0; }
  std::span<const NodeIndex> terminals() const { return terminals_; }

  // The agent's view of the game for one player.
  const DecisionProblem& problem(Player p) const { return problems_[index(p)]; }
  // Decision id (in problem(acting player)) of a decision node.
  DecisionId decision_of(NodeIndex n) const { return decision_of_[n]; }
  // Last own sequence of `p` on the root path of `n` (inclusive of nothing
  // below `n`).
  SequenceId last_sequence(Player p, NodeIndex n) const {
    return last_sequence_[index(p)][n];
  }
  double payoff(Player p, NodeIndex terminal) const {
    const double u = nodes_[terminal].payoff_p1;
    return p == Player::kOne ? u : -u;
  }
  // Product of chance probabilities on the root path.
  double chance_reach(NodeIndex n) const { return chance_reach_[n]; }
  // Largest |payoff| over terminals.
  double max_abs_payoff() const { return max_abs_payoff_; }
  NodeIndex find(std::string_view id) const;  // -1 when absent

 private:
  std::string name_;
  std::vector<GameNode> nodes_;
  std::vector<NodeIndex> terminals_;
  std::array<DecisionProblem, 2> problems_;
  std::vector<DecisionId> decision_of_;
  std::array<std::vector<SequenceId>, 2> last_sequence_;
  std::vector<double> chance_reach_;
  double max_abs_payoff_ = 0.0;
};

// Benchmarks.
GameTree build_kuhn();
GameTree build_leduc();

// A single decision for player 1 with two terminals; used as a smoke
// fixture. Payoffs are +1 for "win" and -1 for "lose".
GameTree build_trivial();

// JSON interchange:
// {players:2, root:<id>, nodes:{<id>:{kind, player?, infoset?,
//   actions?:[{label, child}], outcomes?:[{label, prob, child}], payoff_p1?}}}
GameTree load_game_json(std::string_view text);
GameTree load_game_file(const std::string& path);
std::string dump_game_json(const GameTree& game);

// Resolves "kuhn", "leduc", "trivial" or a path to a JSON file.
GameTree load_game(const std::string& name_or_path);

}  // namespace ibandit
