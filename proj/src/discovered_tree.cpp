#include "ibandit/discovered_tree.hpp"

#include <cmath>
#include <stdexcept>

namespace ibandit {

namespace {

// Neumaier's compensated addition.
inline void compensated_add(double& sum, double& carry, double v) {
  const double t = sum + v;
  if (std::abs(sum) >= std::abs(v)) {
    carry += (sum - t) + v;
  } else {
    carry += (v - t) + sum;
  }
  sum = t;
}

}  // namespace

std::int64_t DiscoveredTree::find_signal(std::int64_t position, std::string_view signal) const {
  for (const auto& [label, next] : positions_[position].signals) {
    if (label == signal) return next;
  }
  return -1;
}

std::int64_t DiscoveredTree::add_signal(std::int64_t position, std::string_view signal) {
  if (const std::int64_t found = find_signal(position, signal); found >= 0) return found;
  const auto next = static_cast<std::int64_t>(positions_.size());
  Position p;
  p.last_node = positions_[position].last_node;
  p.last_action = positions_[position].last_action;
  positions_.push_back(std::move(p));
  positions_[position].signals.emplace_back(std::string(signal), next);
  return next;
}

std::int32_t DiscoveredTree::discover(std::int64_t position, std::string_view label,
                                      std::span<const std::string> actions,
                                      std::span<const double> explore, std::int64_t t) {
  if (positions_[position].node >= 0) throw std::logic_error("position already has a node");
  if (actions.empty()) throw StructuralError("decision node '" + std::string(label) + "' without actions");
  if (explore.size() != actions.size()) {
    throw std::invalid_argument("exploration distribution has the wrong size");
  }
  const auto j = static_cast<std::int32_t>(nodes_.size());
  DiscoveredNode node;
  node.label = std::string(label);
  node.actions.assign(actions.begin(), actions.end());
  node.position = position;
  node.parent_node = positions_[position].last_node;
  node.parent_action = positions_[position].last_action;
  node.discovered_at = t;
  node.offset = recommendation_.size();
  node.next.assign(actions.size(), -1);

  const std::size_t n = actions.size();
  double init = static_cast<double>(t) / static_cast<double>(n);
  std::int64_t parent_slot = -1;
  if (node.parent_node >= 0) {
    const DiscoveredNode& parent = nodes_[node.parent_node];
    parent_slot = static_cast<std::int64_t>(parent.offset) + node.parent_action;
    init = (average_[parent_slot] + average_carry_[parent_slot]) / static_cast<double>(n);
  }
  regret_.resize(regret_.size() + n, 0.0);
  recommendation_.resize(recommendation_.size() + n, 0.0);
  rm_refresh(std::span<const double>(regret_.data() + node.offset, n),
             std::span<double>(recommendation_.data() + node.offset, n));
  explore_.insert(explore_.end(), explore.begin(), explore.end());
  average_.resize(average_.size() + n, init);
  average_carry_.resize(average_carry_.size() + n, 0.0);
  reach_.resize(reach_.size() + n, 0.0);
  parent_slot_.push_back(parent_slot);
  nodes_.push_back(std::move(node));
  positions_[position].node = j;
  return j;
}

std::int64_t DiscoveredTree::ensure_next_position(std::int32_t node, std::size_t action) {
  const std::int64_t existing = nodes_[node].next[action];
  if (existing >= 0) return existing;
  const auto next = static_cast<std::int64_t>(positions_.size());
  Position p;
  p.last_node = node;
  p.last_action = static_cast<std::int32_t>(action);
  positions_.push_back(std::move(p));
  nodes_[node].next[action] = next;
  return next;
}

std::vector<double> DiscoveredTree::average(std::int32_t j) const {
  const DiscoveredNode& node = nodes_[j];
  std::vector<double> out(node.num_actions());
  for (std::size_t a = 0; a < out.size(); ++a) {
    out[a] = average_[node.offset + a] + average_carry_[node.offset + a];
  }
  return out;
}

void DiscoveredTree::observe(std::int32_t j, std::span<const double> gradient) {
  const DiscoveredNode& node = nodes_[j];
  const std::size_t n = node.num_actions();
  rm_observe(variant_, std::span<double>(regret_.data() + node.offset, n),
             std::span<double>(recommendation_.data() + node.offset, n), gradient);
  ops_.regret += n;
}

void DiscoveredTree::update_average() {
  // Parents are discovered before their children, so one pass in discovery
  // order sees every parent reach already refreshed.
  for (std::size_t j = 0; j < nodes_.size(); ++j) {
    const std::size_t offset = nodes_[j].offset;
    const std::size_t n = nodes_[j].num_actions();
    const std::int64_t ps = parent_slot_[j];
    const double parent_reach = ps < 0 ? 1.0 : reach_[ps];
    for (std::size_t a = 0; a < n; ++a) {
      const double v = parent_reach * recommendation_[offset + a];
      reach_[offset + a] = v;
      compensated_add(average_[offset + a], average_carry_[offset + a], v);
    }
    ops_.average += n;
  }
}

BehavioralStrategy DiscoveredTree::average_strategy() const {
  BehavioralStrategy out;
  for (std::size_t j = 0; j < nodes_.size(); ++j) {
    std::vector<double> avg = average(static_cast<std::int32_t>(j));
    double total = 0.0;
    for (double v : avg) total += v;
    if (total > 0.0) {
      for (double& v : avg) v /= total;
    } else {
      for (double& v : avg) v = 1.0 / static_cast<double>(avg.size());
    }
    out.emplace(nodes_[j].label, std::move(avg));
  }
  return out;
}

BehavioralStrategy DiscoveredTree::current_strategy() const {
  BehavioralStrategy out;
  for (std::size_t j = 0; j < nodes_.size(); ++j) {
    const auto rec = recommendation(static_cast<std::int32_t>(j));
    out.emplace(nodes_[j].label, std::vector<double>(rec.begin(), rec.end()));
  }
  return out;
}

}  // namespace ibandit
