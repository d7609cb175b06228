#pragma once

// The part of a decision problem an agent has seen so far. Histories
// (observed signals and own actions) are stored as a trie of positions; a
// position where the agent was asked to act carries a decision node.
// Per-action state of all nodes lives in flat arrays indexed by slot, which
// keeps the every-iteration average phase a tight loop.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ibandit/local_rm.hpp"
#include "ibandit/tfsdm.hpp"

namespace ibandit {

struct DiscoveredNode {
  std::string label;                  // last signal before the decision
  std::vector<std::string> actions;
  std::int64_t position = -1;
  std::int32_t parent_node = -1;      // last own decision on the path, -1 if none
  std::int32_t parent_action = -1;
  std::int64_t discovered_at = 0;
  std::size_t offset = 0;             // first slot of this node's actions
  std::vector<std::int64_t> next;     // position after each action, -1 if unseen

  std::size_t num_actions() const { return actions.size(); }
};

struct OpCounters {
  std::uint64_t rollout = 0;
  std::uint64_t average = 0;
  std::uint64_t regret = 0;
};

class DiscoveredTree {
 public:
  explicit DiscoveredTree(RmVariant variant) : variant_(variant) { positions_.emplace_back(); }

  static constexpr std::int64_t kRoot = 0;

  // -1 when the signal was never seen at `position`.
  std::int64_t find_signal(std::int64_t position, std::string_view signal) const;
  std::int64_t add_signal(std::int64_t position, std::string_view signal);

  // Decision node at a position, -1 if none.
  std::int32_t node_at(std::int64_t position) const { return positions_[position].node; }
  // Creates the decision node at `position` (which must not have one) and
  // initializes its average accumulator from the parent sequence.
  // `explore` is the normalized exploration distribution.
  std::int32_t discover(std::int64_t position, std::string_view label,
                        std::span<const std::string> actions, std::span<const double> explore,
                        std::int64_t t);

  std::int64_t next_position(std::int32_t node, std::size_t action) const {
    return nodes_[node].next[action];
  }
  std::int64_t ensure_next_position(std::int32_t node, std::size_t action);

  std::size_t size() const { return nodes_.size(); }
  std::size_t num_slots() const { return recommendation_.size(); }
  const DiscoveredNode& node(std::int32_t j) const { return nodes_[j]; }
  std::span<const DiscoveredNode> nodes() const { return nodes_; }

  std::span<const double> recommendation(std::int32_t j) const { return slice(recommendation_, j); }
  std::span<const double> cumulative_regret(std::int32_t j) const { return slice(regret_, j); }
  std::span<const double> explore(std::int32_t j) const { return slice(explore_, j); }
  // Compensated accumulator values.
  std::vector<double> average(std::int32_t j) const;

  // Feeds a local gradient to node j's regret minimizer.
  void observe(std::int32_t j, std::span<const double> gradient);

  // Average-policy phase: every node, in discovery order, adds
  // its recommendation weighted by the parent's reach.
  void update_average();

  // Normalized accumulators keyed by node label.
  BehavioralStrategy average_strategy() const;
  BehavioralStrategy current_strategy() const;

  const OpCounters& ops() const { return ops_; }
  OpCounters& ops() { return ops_; }
  RmVariant variant() const { return variant_; }

 private:
  struct Position {
    std::vector<std::pair<std::string, std::int64_t>> signals;
    std::int32_t node = -1;
    std::int32_t last_node = -1;    // last own decision on the path
    std::int32_t last_action = -1;
  };

  std::span<const double> slice(const std::vector<double>& v, std::int32_t j) const {
    return {v.data() + nodes_[j].offset, nodes_[j].num_actions()};
  }

  RmVariant variant_;
  std::vector<Position> positions_;
  std::vector<DiscoveredNode> nodes_;
  // Per-slot state.
  std::vector<double> regret_;
  std::vector<double> recommendation_;
  std::vector<double> explore_;
  std::vector<double> average_;
  std::vector<double> average_carry_;  // compensation terms
  std::vector<double> reach_;
  std::vector<std::int64_t> parent_slot_;  // per node, -1 for root-level nodes
  OpCounters ops_;
};

}  // namespace ibandit
