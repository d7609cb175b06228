#include "ibandit/game.hpp"

#include <cmath>
#include <map>
#include <set>

namespace ibandit {

Player player_from_number(int n) {
  if (n == 1) return Player::kOne;
  if (n == 2) return Player::kTwo;
  throw std::invalid_argument("player must be 1 or 2, got " + std::to_string(n));
}

namespace {

std::string node_path(const GameNode& n) { return "nodes." + n.id; }

struct InfosetRecord {
  Player player;
  std::vector<std::string> labels;
  std::pair<std::string, std::int32_t> last_own;  // ("", -1) when empty
  std::string first_node;
};

using SeqKey = std::pair<std::string, std::int32_t>;

struct ChildRef {
  bool decision = false;
  std::string infoset;
  NodeIndex node = -1;
};

TreeSpec build_spec(const std::map<SeqKey, std::vector<ChildRef>>& children,
                    const std::map<std::string, std::vector<std::string>>& actions,
                    const SeqKey& seq) {
  auto it = children.find(seq);
  std::vector<std::string> signals;
  std::vector<TreeSpec> specs;
  bool has_terminal = false;
  if (it != children.end()) {
    for (const ChildRef& c : it->second) {
      if (c.decision) {
        const auto& acts = actions.at(c.infoset);
        std::vector<TreeSpec> below;
        for (std::size_t a = 0; a < acts.size(); ++a) {
          below.push_back(build_spec(children, actions, SeqKey{c.infoset, static_cast<std::int32_t>(a)}));
        }
        signals.push_back(c.infoset);
        specs.push_back(TreeSpec::decision(c.infoset, acts, std::move(below)));
      } else if (!has_terminal) {
        // The agent only learns that the game ended (and its payoff), so all
        // game terminals behind one sequence collapse into one terminal.
        has_terminal = true;
        const std::string name =
            seq.second < 0 ? "end" : "end@" + seq.first + "/" + std::to_string(seq.second);
        signals.push_back(name);
        specs.push_back(TreeSpec::terminal(name));
      }
    }
  }
  return TreeSpec::observation(std::move(signals), std::move(specs));
}

}  // namespace

GameTree GameTree::create(std::vector<GameNode> input, NodeIndex root, std::string name) {
  const auto n = static_cast<NodeIndex>(input.size());
  if (root < 0 || root >= n) throw GameError("root", "root node does not exist");

  // Shape checks and depth-first renumbering.
  std::vector<NodeIndex> order;
  std::vector<NodeIndex> new_index(input.size(), -1);
  std::vector<NodeIndex> stack{root};
  std::vector<int> visits(input.size(), 0);
  while (!stack.empty()) {
    const NodeIndex cur = stack.back();
    stack.pop_back();
    if (visits[cur]++ > 0) {
      throw GameError(node_path(input[cur]), "node has more than one parent");
    }
    new_index[cur] = static_cast<NodeIndex>(order.size());
    order.push_back(cur);
    const GameNode& g = input[cur];
    for (std::size_t c = g.children.size(); c-- > 0;) {
      const NodeIndex child = g.children[c];
      if (child < 0 || child >= n) {
        throw GameError(node_path(g), "dangling child reference");
      }
      stack.push_back(child);
    }
  }
  for (NodeIndex i = 0; i < n; ++i) {
    if (visits[i] == 0) throw GameError(node_path(input[i]), "node unreachable from root");
  }

  GameTree tree;
  tree.name_ = std::move(name);
  tree.nodes_.resize(input.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    GameNode node = std::move(input[order[k]]);
    for (NodeIndex& c : node.children) c = new_index[c];
    tree.nodes_[k] = std::move(node);
  }

  std::map<std::string, InfosetRecord> infosets;
  for (const GameNode& g : tree.nodes_) {
    const std::string path = node_path(g);
    switch (g.kind) {
      case GameNode::Kind::kTerminal:
        if (!g.children.empty()) throw GameError(path, "terminal node with children");
        if (!std::isfinite(g.payoff_p1)) throw GameError(path + ".payoff_p1", "non-finite payoff");
        break;
      case GameNode::Kind::kChance: {
        if (g.children.empty()) throw GameError(path + ".outcomes", "chance node without outcomes");
        if (g.probs.size() != g.children.size() || g.labels.size() != g.children.size()) {
          throw GameError(path + ".outcomes", "outcome arrays of different lengths");
        }
        double total = 0.0;
        for (double p : g.probs) {
          if (!(p >= 0.0) || !std::isfinite(p)) {
            throw GameError(path + ".outcomes", "negative or non-finite probability");
          }
          total += p;
        }
        if (std::abs(total - 1.0) > 1e-9) {
          throw GameError(path + ".outcomes",
                          "chance probabilities sum to " + std::to_string(total));
        }
        break;
      }
      case GameNode::Kind::kDecision: {
        if (g.children.empty()) throw GameError(path + ".actions", "decision node without actions");
        if (g.labels.size() != g.children.size()) {
          throw GameError(path + ".actions", "action labels and children differ in length");
        }
        std::set<std::string> distinct(g.labels.begin(), g.labels.end());
        if (distinct.size() != g.labels.size()) {
          throw GameError(path + ".actions", "duplicate action label");
        }
        if (g.infoset.empty()) throw GameError(path + ".infoset", "missing information set");
        break;
      }
    }
  }

  // Information sets and perfect recall, in one preorder pass that tracks the
  // last own (infoset, action) of each player.
  const std::size_t size = tree.nodes_.size();
  std::array<std::vector<SeqKey>, 2> last_own;
  last_own[0].assign(size, SeqKey{"", -1});
  last_own[1].assign(size, SeqKey{"", -1});
  tree.chance_reach_.assign(size, 1.0);
  std::array<std::map<SeqKey, std::vector<ChildRef>>, 2> seq_children;
  std::array<std::map<std::string, std::vector<std::string>>, 2> actions;
  for (std::size_t k = 0; k < size; ++k) {
    const GameNode& g = tree.nodes_[k];
    const std::string path = node_path(g);
    if (g.kind == GameNode::Kind::kDecision) {
      auto [it, inserted] = infosets.emplace(
          g.infoset, InfosetRecord{g.player, g.labels, last_own[index(g.player)][k], g.id});
      if (!inserted) {
        const InfosetRecord& rec = it->second;
        if (rec.player != g.player) {
          throw GameError(path + ".infoset", "information set '" + g.infoset +
                                                 "' mixes both players");
        }
        if (rec.labels != g.labels) {
          throw GameError(path + ".infoset", "information set '" + g.infoset +
                                                 "' has inconsistent action sets");
        }
        if (rec.last_own != last_own[index(g.player)][k]) {
          throw GameError(path + ".infoset", "perfect recall violated at '" + g.infoset + "'");
        }
      } else {
        seq_children[index(g.player)][last_own[index(g.player)][k]].push_back(
            ChildRef{true, g.infoset, -1});
        actions[index(g.player)][g.infoset] = g.labels;
      }
    } else if (g.kind == GameNode::Kind::kTerminal) {
      tree.terminals_.push_back(static_cast<NodeIndex>(k));
      for (std::size_t p = 0; p < 2; ++p) {
        seq_children[p][last_own[p][k]].push_back(
            ChildRef{false, "", static_cast<NodeIndex>(k)});
      }
      tree.max_abs_payoff_ = std::max(tree.max_abs_payoff_, std::abs(g.payoff_p1));
    }
    for (std::size_t c = 0; c < g.children.size(); ++c) {
      const NodeIndex child = g.children[c];
      last_own[0][child] = last_own[0][k];
      last_own[1][child] = last_own[1][k];
      tree.chance_reach_[child] = tree.chance_reach_[k];
      if (g.kind == GameNode::Kind::kDecision) {
        last_own[index(g.player)][child] = SeqKey{g.infoset, static_cast<std::int32_t>(c)};
      } else if (g.kind == GameNode::Kind::kChance) {
        tree.chance_reach_[child] *= g.probs[c];
      }
    }
  }

  for (std::size_t p = 0; p < 2; ++p) {
    tree.problems_[p] = DecisionProblem::from_tree(
        build_spec(seq_children[p], actions[p], SeqKey{"", -1}));
  }

  tree.decision_of_.assign(size, -1);
  for (std::size_t p = 0; p < 2; ++p) tree.last_sequence_[p].assign(size, kEmptySequence);
  for (std::size_t k = 0; k < size; ++k) {
    const GameNode& g = tree.nodes_[k];
    if (g.kind == GameNode::Kind::kDecision) {
      tree.decision_of_[k] = *tree.problems_[index(g.player)].find_decision(g.infoset);
    }
    for (std::size_t c = 0; c < g.children.size(); ++c) {
      const NodeIndex child = g.children[c];
      tree.last_sequence_[0][child] = tree.last_sequence_[0][k];
      tree.last_sequence_[1][child] = tree.last_sequence_[1][k];
      if (g.kind == GameNode::Kind::kDecision) {
        const DecisionInfo& info = tree.problems_[index(g.player)].decision(tree.decision_of_[k]);
        tree.last_sequence_[index(g.player)][child] = info.sequence(c);
      }
    }
  }
  return tree;
}

NodeIndex GameTree::find(std::string_view id) const {
  for (std::size_t k = 0; k < nodes_.size(); ++k) {
    if (nodes_[k].id == id) return static_cast<NodeIndex>(k);
  }
  return -1;
}

GameTree build_trivial() {
  std::vector<GameNode> nodes(3);
  nodes[0].id = "root";
  nodes[0].kind = GameNode::Kind::kDecision;
  nodes[0].player = Player::kOne;
  nodes[0].infoset = "P1:root";
  nodes[0].labels = {"win", "lose"};
  nodes[0].children = {1, 2};
  nodes[1].id = "won";
  nodes[1].payoff_p1 = 1.0;
  nodes[2].id = "lost";
  nodes[2].payoff_p1 = -1.0;
  return GameTree::create(std::move(nodes), 0, "trivial");
}

GameTree load_game(const std::string& name_or_path) {
  if (name_or_path == "kuhn") return build_kuhn();
  if (name_or_path == "leduc") return build_leduc();
  if (name_or_path == "trivial") return build_trivial();
  return load_game_file(name_or_path);
}

}  // namespace ibandit
