#include "ibandit/game.hpp"

#include <string>

namespace ibandit {

namespace {

constexpr const char* kRanks = "JQK";

struct Builder {
  std::vector<GameNode> nodes;

  NodeIndex add(GameNode node) {
    nodes.push_back(std::move(node));
    return static_cast<NodeIndex>(nodes.size() - 1);
  }

  NodeIndex terminal(std::string id, double payoff_p1) {
    GameNode n;
    n.id = std::move(id);
    n.kind = GameNode::Kind::kTerminal;
    n.payoff_p1 = payoff_p1;
    return add(std::move(n));
  }

  // Children are filled in after the node is added so that the vector can
  // grow during recursion.
  NodeIndex decision(std::string id, Player p, std::string infoset,
                     std::vector<std::string> labels) {
    GameNode n;
    n.id = std::move(id);
    n.kind = GameNode::Kind::kDecision;
    n.player = p;
    n.infoset = std::move(infoset);
    n.labels = std::move(labels);
    return add(std::move(n));
  }

  NodeIndex chance(std::string id, std::vector<std::string> labels, std::vector<double> probs) {
    GameNode n;
    n.id = std::move(id);
    n.kind = GameNode::Kind::kChance;
    n.labels = std::move(labels);
    n.probs = std::move(probs);
    return add(std::move(n));
  }
};

// ---------------------------------------------------------------------------
// Kuhn: ante 1, one bet of 1, P1 acts first.

NodeIndex kuhn_history(Builder& b, int c1, int c2, const std::string& h) {
  const std::string deal = {kRanks[c1], kRanks[c2]};
  const std::string id = deal + ":" + h;
  const double showdown = c1 > c2 ? 1.0 : -1.0;
  if (h == "kk") return b.terminal(id, showdown);
  if (h == "bc" || h == "kbc") return b.terminal(id, 2.0 * showdown);
  if (h == "bf") return b.terminal(id, 1.0);
  if (h == "kbf") return b.terminal(id, -1.0);

  const bool facing = !h.empty() && h.back() == 'b';
  const Player p = h.size() % 2 == 0 ? Player::kOne : Player::kTwo;
  const int card = p == Player::kOne ? c1 : c2;
  const std::string infoset = "P" + std::to_string(number(p)) + ":" + kRanks[card] + ":" + h;
  const std::vector<std::string> labels =
      facing ? std::vector<std::string>{"fold", "call"} : std::vector<std::string>{"check", "bet"};
  const std::string tokens = facing ? "fc" : "kb";
  const NodeIndex n = b.decision(id, p, infoset, labels);
  for (char t : tokens) {
    const NodeIndex child = kuhn_history(b, c1, c2, h + t);
    b.nodes[n].children.push_back(child);
  }
  return n;
}

// ---------------------------------------------------------------------------
// Leduc: ante 1, bets of 2 then 4, at most a bet and a raise per round.

struct LeducState {
  int c1 = 0;
  int c2 = 0;
  int pub = -1;
  std::string r1;
  std::string r2;
  double contrib[2] = {1.0, 1.0};
  int bets = 0;          // bets and raises in the current round
  int acted = 0;         // actions in the current round
  bool facing = false;
};

std::string leduc_id(const LeducState& s) {
  std::string id = {kRanks[s.c1], kRanks[s.c2], ':'};
  id += s.r1;
  if (s.pub >= 0) {
    id += '/';
    id += kRanks[s.pub];
    id += ':';
    id += s.r2;
  }
  return id;
}

double leduc_showdown(const LeducState& s) {
  const double pot_share = s.contrib[0];  // equal at showdown
  if (s.c1 == s.pub) return pot_share;
  if (s.c2 == s.pub) return -pot_share;
  if (s.c1 > s.c2) return pot_share;
  if (s.c1 < s.c2) return -pot_share;
  return 0.0;
}

NodeIndex leduc_round(Builder& b, LeducState s);

NodeIndex leduc_public(Builder& b, const LeducState& s) {
  // Remaining deck: two of each rank minus the private cards.
  std::vector<std::string> labels;
  std::vector<double> probs;
  std::vector<int> ranks;
  for (int r = 0; r < 3; ++r) {
    const int left = 2 - (s.c1 == r) - (s.c2 == r);
    if (left == 0) continue;
    labels.emplace_back(1, kRanks[r]);
    probs.push_back(left / 4.0);
    ranks.push_back(r);
  }
  const NodeIndex n = b.chance(leduc_id(s) + "/", labels, probs);
  for (int r : ranks) {
    LeducState next = s;
    next.pub = r;
    next.bets = 0;
    next.acted = 0;
    next.facing = false;
    const NodeIndex child = leduc_round(b, next);
    b.nodes[n].children.push_back(child);
  }
  return n;
}

NodeIndex leduc_round(Builder& b, LeducState s) {
  const bool second = s.pub >= 0;
  const Player p = s.acted % 2 == 0 ? Player::kOne : Player::kTwo;
  const int card = p == Player::kOne ? s.c1 : s.c2;
  std::string infoset = "P" + std::to_string(number(p)) + ":" + kRanks[card] + ":" + s.r1;
  if (second) infoset += std::string("/") + kRanks[s.pub] + ":" + s.r2;

  std::vector<std::string> labels;
  std::string tokens;
  if (s.facing) {
    labels = {"fold", "call"};
    tokens = "fc";
    if (s.bets < 2) {
      labels.push_back("raise");
      tokens += 'r';
    }
  } else {
    labels = {"check", "bet"};
    tokens = "kb";
  }
  const NodeIndex n = b.decision(leduc_id(s), p, infoset, labels);
  const double size = second ? 4.0 : 2.0;
  const std::size_t me = index(p);
  const std::size_t other = 1 - me;
  for (char t : tokens) {
    LeducState next = s;
    (second ? next.r2 : next.r1) += t;
    next.acted = s.acted + 1;
    NodeIndex child = -1;
    switch (t) {
      case 'f': {
        const double loss = s.contrib[me];
        child = b.terminal(leduc_id(next), p == Player::kOne ? -loss : loss);
        break;
      }
      case 'c':
        next.contrib[me] = s.contrib[other];
        next.facing = false;
        if (second) {
          child = b.terminal(leduc_id(next), leduc_showdown(next));
        } else {
          child = leduc_public(b, next);
        }
        break;
      case 'k':
        if (s.acted == 0) {
          child = leduc_round(b, next);
        } else if (second) {
          child = b.terminal(leduc_id(next), leduc_showdown(next));
        } else {
          child = leduc_public(b, next);
        }
        break;
      case 'b':
      case 'r':
        next.contrib[me] = s.contrib[other] + size;
        next.bets = s.bets + 1;
        next.facing = true;
        child = leduc_round(b, next);
        break;
      default:
        throw std::logic_error("unknown Leduc action token");
    }
    b.nodes[n].children.push_back(child);
  }
  return n;
}

}  // namespace

GameTree build_kuhn() {
  Builder b;
  std::vector<std::string> labels;
  std::vector<std::pair<int, int>> deals;
  for (int c1 = 0; c1 < 3; ++c1) {
    for (int c2 = 0; c2 < 3; ++c2) {
      if (c1 == c2) continue;
      labels.push_back(std::string{kRanks[c1], kRanks[c2]});
      deals.emplace_back(c1, c2);
    }
  }
  const NodeIndex root = b.chance("deal", labels, std::vector<double>(6, 1.0 / 6.0));
  for (auto [c1, c2] : deals) {
    const NodeIndex child = kuhn_history(b, c1, c2, "");
    b.nodes[root].children.push_back(child);
  }
  return GameTree::create(std::move(b.nodes), root, "kuhn");
}

GameTree build_leduc() {
  Builder b;
  std::vector<std::string> labels;
  std::vector<double> probs;
  std::vector<std::pair<int, int>> deals;
  for (int c1 = 0; c1 < 3; ++c1) {
    for (int c2 = 0; c2 < 3; ++c2) {
      labels.push_back(std::string{kRanks[c1], kRanks[c2]});
      // Six cards, two per rank.
      probs.push_back(c1 == c2 ? 1.0 / 15.0 : 2.0 / 15.0);
      deals.emplace_back(c1, c2);
    }
  }
  const NodeIndex root = b.chance("deal", labels, probs);
  for (auto [c1, c2] : deals) {
    LeducState s;
    s.c1 = c1;
    s.c2 = c2;
    const NodeIndex child = leduc_round(b, s);
    b.nodes[root].children.push_back(child);
  }
  return GameTree::create(std::move(b.nodes), root, "leduc");
}

}  // namespace ibandit
