#include "ibandit/session.hpp"

#include <stdexcept>

namespace ibandit {

FixedController::FixedController(BehavioralStrategy strategy, StreamKey stream)
    : strategy_(std::move(strategy)), stream_(stream) {
  for (const auto& [label, dist] : strategy_) {
    double total = 0.0;
    for (double p : dist) {
      if (!(p >= 0.0)) throw std::invalid_argument("negative probability at '" + label + "'");
      total += p;
    }
    if (!(total > 0.0)) throw std::invalid_argument("empty distribution at '" + label + "'");
  }
}

void FixedController::begin_iteration(std::int64_t t) {
  t_ = t;
  live_ = root_cursor();
}

void FixedController::observe_signal(std::string_view signal) {
  live_ = after_signal(live_, signal);
}

std::size_t FixedController::act(std::span<const std::string> actions) {
  const std::size_t a = committed_action(live_, actions);
  live_ = after_action(live_, a, actions);
  return a;
}

PlayerCursor FixedController::after_signal(const PlayerCursor& c, std::string_view signal) const {
  PlayerCursor next = c;
  next.signal = signal;
  return next;
}

PlayerCursor FixedController::after_action(const PlayerCursor& c, std::size_t,
                                           std::span<const std::string>) const {
  return c;
}

std::vector<double> FixedController::mixed_distribution(
    const PlayerCursor& c, std::span<const std::string> actions) const {
  auto it = strategy_.find(std::string(c.signal));
  if (it == strategy_.end()) {
    throw StructuralError("fixed strategy has no entry for '" + std::string(c.signal) + "'");
  }
  if (it->second.size() != actions.size()) {
    throw StructuralError("fixed strategy has the wrong action count at '" +
                          std::string(c.signal) + "'");
  }
  return it->second;
}

std::size_t FixedController::committed_action(const PlayerCursor& c,
                                              std::span<const std::string> actions) const {
  const std::vector<double> dist = mixed_distribution(c, actions);
  return sample_index(dist, stream_.uniform(static_cast<std::uint64_t>(t_), hash_label(c.signal)));
}

std::size_t chance_outcome(const GameTree& game, NodeIndex n, const StreamKey& chance,
                           std::int64_t t) {
  return sample_index(game.node(n).probs,
                      chance.uniform(static_cast<std::uint64_t>(t), static_cast<std::uint64_t>(n)));
}

EnvironmentSession::EnvironmentSession(const GameTree& game, Player agent, Controller& opponent,
                                       StreamKey chance)
    : game_(&game), agent_(agent), opponent_(&opponent), chance_(chance) {}

void EnvironmentSession::begin(std::int64_t t) {
  if (active_) throw std::logic_error("session iteration already in progress");
  t_ = t;
  active_ = true;
  node_ = game_->root();
  opponent_->begin_iteration(t);
  advance();
}

void EnvironmentSession::advance() {
  for (;;) {
    const GameNode& n = game_->node(node_);
    if (n.kind == GameNode::Kind::kTerminal) return;
    if (n.kind == GameNode::Kind::kChance) {
      node_ = n.children[chance_outcome(*game_, node_, chance_, t_)];
      continue;
    }
    if (n.player == agent_) return;
    opponent_->observe_signal(n.infoset);
    const std::size_t a = opponent_->act(n.labels);
    if (a >= n.children.size()) throw std::out_of_range("opponent chose an illegal action");
    node_ = n.children[a];
  }
}

bool EnvironmentSession::finished() const {
  return node_ >= 0 && game_->node(node_).kind == GameNode::Kind::kTerminal;
}

std::string_view EnvironmentSession::signal() const {
  if (!active_ || finished()) throw std::logic_error("no pending decision");
  return game_->node(node_).infoset;
}

std::span<const std::string> EnvironmentSession::actions() const {
  if (!active_ || finished()) throw std::logic_error("no pending decision");
  return game_->node(node_).labels;
}

void EnvironmentSession::step(std::size_t action) {
  if (!active_ || finished()) throw std::logic_error("stepping a finished session");
  const GameNode& n = game_->node(node_);
  if (action >= n.children.size()) {
    throw std::out_of_range("illegal action index " + std::to_string(action));
  }
  node_ = n.children[action];
  advance();
}

NodeIndex EnvironmentSession::terminal() const {
  if (!finished()) throw std::logic_error("session has not reached a terminal");
  return node_;
}

double EnvironmentSession::payoff() const { return game_->payoff(agent_, terminal()); }

void EnvironmentSession::close() {
  const double u = payoff();
  active_ = false;
  opponent_->end_iteration(-u);
}

void play_session(EnvironmentSession& session, Controller& agent) {
  while (!session.finished()) {
    agent.observe_signal(session.signal());
    session.step(agent.act(session.actions()));
  }
}

namespace {

void gradient_walk(const GameTree& game, Player p, const StreamKey& chance, std::int64_t t,
                   const Controller& opponent, NodeIndex n, const PlayerCursor& cursor,
                   std::vector<double>& out) {
  const GameNode& node = game.node(n);
  switch (node.kind) {
    case GameNode::Kind::kTerminal:
      out[game.last_sequence(p, n)] += game.payoff(p, n);
      return;
    case GameNode::Kind::kChance:
      gradient_walk(game, p, chance, t, opponent, node.children[chance_outcome(game, n, chance, t)],
                    cursor, out);
      return;
    case GameNode::Kind::kDecision:
      if (node.player == p) {
        for (NodeIndex child : node.children) {
          gradient_walk(game, p, chance, t, opponent, child, cursor, out);
        }
      } else {
        const PlayerCursor seen = opponent.after_signal(cursor, node.infoset);
        const std::size_t a = opponent.committed_action(seen, node.labels);
        gradient_walk(game, p, chance, t, opponent, node.children.at(a),
                      opponent.after_action(seen, a, node.labels), out);
      }
      return;
  }
}

template <bool kMixed>
void strategy_walk(const DecisionProblem& problem, const Controller& controller, NodeIndex n,
                   const PlayerCursor& cursor, std::vector<double>& q) {
  const TfsdmNode& node = problem.nodes()[n];
  switch (node.kind) {
    case NodeKind::kTerminal:
      return;
    case NodeKind::kObservation:
      for (std::size_t s = 0; s < node.children.size(); ++s) {
        const NodeIndex child = node.children[s];
        if (problem.nodes()[child].kind == NodeKind::kTerminal) continue;
        strategy_walk<kMixed>(problem, controller, child,
                              controller.after_signal(cursor, node.edges[s]), q);
      }
      return;
    case NodeKind::kDecision: {
      const DecisionInfo& info = problem.decision(node.decision);
      const double parent = q[info.parent_sequence];
      if constexpr (kMixed) {
        const std::vector<double> dist = controller.mixed_distribution(cursor, info.actions);
        for (std::size_t a = 0; a < info.num_actions(); ++a) {
          q[info.sequence(a)] = parent * dist[a];
        }
        for (std::size_t a = 0; a < info.num_actions(); ++a) {
          strategy_walk<kMixed>(problem, controller, node.children[a],
                                controller.after_action(cursor, a, info.actions), q);
        }
      } else {
        const std::size_t chosen = controller.committed_action(cursor, info.actions);
        for (std::size_t a = 0; a < info.num_actions(); ++a) {
          q[info.sequence(a)] = a == chosen ? parent : 0.0;
          strategy_walk<kMixed>(problem, controller, node.children[a],
                                controller.after_action(cursor, a, info.actions), q);
        }
      }
      return;
    }
  }
}

}  // namespace

std::vector<double> true_gradient(const GameTree& game, Player p, const StreamKey& chance,
                                  std::int64_t t, const Controller& opponent) {
  std::vector<double> out(game.problem(p).num_sequences(), 0.0);
  gradient_walk(game, p, chance, t, opponent, game.root(), opponent.root_cursor(), out);
  return out;
}

std::vector<double> expected_gradient(const GameTree& game, Player p,
                                      std::span<const double> opponent_strategy) {
  const Player o = opponent(p);
  if (opponent_strategy.size() != game.problem(o).num_sequences()) {
    throw StructuralError("opponent strategy does not match the opponent's sequence set");
  }
  std::vector<double> out(game.problem(p).num_sequences(), 0.0);
  for (NodeIndex z : game.terminals()) {
    const double reach = game.chance_reach(z) * opponent_strategy[game.last_sequence(o, z)];
    if (reach == 0.0) continue;
    out[game.last_sequence(p, z)] += game.payoff(p, z) * reach;
  }
  return out;
}

std::vector<double> mixed_sequence_form(const DecisionProblem& problem,
                                        const Controller& controller) {
  std::vector<double> q(problem.num_sequences(), 0.0);
  q[kEmptySequence] = 1.0;
  strategy_walk<true>(problem, controller, problem.root(), controller.root_cursor(), q);
  return q;
}

std::vector<double> committed_sequence_form(const DecisionProblem& problem,
                                            const Controller& controller) {
  std::vector<double> q(problem.num_sequences(), 0.0);
  q[kEmptySequence] = 1.0;
  strategy_walk<false>(problem, controller, problem.root(), controller.root_cursor(), q);
  return q;
}

}  // namespace ibandit
