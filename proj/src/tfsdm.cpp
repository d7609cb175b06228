#include "ibandit/tfsdm.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace ibandit {

TreeSpec TreeSpec::terminal(std::string label, std::int64_t payoff_index) {
  TreeSpec t;
  t.kind = NodeKind::kTerminal;
  t.label = std::move(label);
  t.payoff_index = payoff_index;
  return t;
}

TreeSpec TreeSpec::decision(std::string label, std::vector<std::string> actions,
                            std::vector<TreeSpec> children) {
  TreeSpec t;
  t.kind = NodeKind::kDecision;
  t.label = std::move(label);
  t.edges = std::move(actions);
  t.children = std::move(children);
  return t;
}

TreeSpec TreeSpec::observation(std::vector<std::string> signals,
                               std::vector<TreeSpec> children) {
  TreeSpec t;
  t.kind = NodeKind::kObservation;
  t.edges = std::move(signals);
  t.children = std::move(children);
  return t;
}

namespace {

struct Builder {
  std::vector<TfsdmNode>& nodes;
  std::vector<DecisionInfo>& decisions;
  std::vector<TerminalInfo>& terminals;
  std::vector<DecisionId>& sequence_decision;
  std::vector<std::vector<DecisionId>>& child_decisions;
  std::vector<std::vector<std::int32_t>>& child_terminals;

  NodeIndex visit(const TreeSpec& spec, NodeIndex parent, std::int32_t edge,
                  SequenceId last, std::int32_t depth) {
    if (spec.kind != NodeKind::kTerminal) {
      if (spec.edges.empty()) {
        throw StructuralError(spec.kind == NodeKind::kDecision
                                  ? "decision node without actions"
                                  : "observation point without signals");
      }
      if (spec.edges.size() != spec.children.size()) {
        throw StructuralError("edge and child counts differ");
      }
      std::set<std::string> seen(spec.edges.begin(), spec.edges.end());
      if (seen.size() != spec.edges.size()) {
        throw StructuralError("duplicate edge label below '" + spec.label + "'");
      }
    } else if (!spec.children.empty()) {
      throw StructuralError("terminal node with children");
    }

    const auto index = static_cast<NodeIndex>(nodes.size());
    nodes.push_back(TfsdmNode{});
    nodes[index].kind = spec.kind;
    nodes[index].edges = spec.edges;
    nodes[index].parent = parent;
    nodes[index].parent_edge = edge;

    switch (spec.kind) {
      case NodeKind::kTerminal: {
        const auto z = static_cast<std::int32_t>(terminals.size());
        std::string label = spec.label.empty() ? "z" + std::to_string(z) : spec.label;
        terminals.push_back(TerminalInfo{std::move(label), last, spec.payoff_index, index});
        child_terminals[last].push_back(z);
        nodes[index].terminal = z;
        return index;
      }
      case NodeKind::kDecision: {
        const auto j = static_cast<DecisionId>(decisions.size());
        DecisionInfo info;
        info.label = spec.label.empty() ? "j" + std::to_string(j) : spec.label;
        info.actions = spec.edges;
        info.parent_sequence = last;
        info.first_sequence = static_cast<SequenceId>(sequence_decision.size());
        info.node = index;
        info.depth = depth;
        decisions.push_back(std::move(info));
        child_decisions[last].push_back(j);
        for (std::size_t a = 0; a < spec.edges.size(); ++a) {
          sequence_decision.push_back(j);
          child_decisions.emplace_back();
          child_terminals.emplace_back();
        }
        nodes[index].decision = j;
        const SequenceId first = decisions[j].first_sequence;
        for (std::size_t a = 0; a < spec.children.size(); ++a) {
          const NodeIndex child =
              visit(spec.children[a], index, static_cast<std::int32_t>(a),
                    first + static_cast<SequenceId>(a), depth + 1);
          nodes[index].children.push_back(child);
        }
        return index;
      }
      case NodeKind::kObservation: {
        for (std::size_t s = 0; s < spec.children.size(); ++s) {
          const NodeIndex child =
              visit(spec.children[s], index, static_cast<std::int32_t>(s), last, depth);
          nodes[index].children.push_back(child);
        }
        return index;
      }
    }
    return index;
  }
};

}  // namespace

DecisionProblem DecisionProblem::from_tree(const TreeSpec& root) {
  DecisionProblem p;
  p.sequence_decision_.push_back(-1);
  p.child_decisions_.emplace_back();
  p.child_terminals_.emplace_back();
  Builder b{p.nodes_, p.decisions_, p.terminals_, p.sequence_decision_,
            p.child_decisions_, p.child_terminals_};
  b.visit(root, -1, -1, kEmptySequence, 0);
  for (std::size_t j = 0; j < p.decisions_.size(); ++j) {
    auto [it, inserted] =
        p.by_label_.emplace(p.decisions_[j].label, static_cast<DecisionId>(j));
    if (!inserted) {
      throw StructuralError("duplicate decision label '" + p.decisions_[j].label + "'");
    }
  }
  return p;
}

Sequence DecisionProblem::sequence(SequenceId id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= num_sequences()) {
    throw StructuralError("sequence id out of range: " + std::to_string(id));
  }
  if (id == kEmptySequence) return Sequence::empty();
  const DecisionId j = sequence_decision_[id];
  return Sequence{j, id - decisions_[j].first_sequence};
}

SequenceId DecisionProblem::sequence_id(Sequence s) const {
  if (s.is_empty()) return kEmptySequence;
  if (static_cast<std::size_t>(s.node) >= decisions_.size() || s.action < 0 ||
      static_cast<std::size_t>(s.action) >= decisions_[s.node].num_actions()) {
    throw StructuralError("unknown sequence (" + std::to_string(s.node) + ", " +
                          std::to_string(s.action) + ")");
  }
  return decisions_[s.node].sequence(static_cast<std::size_t>(s.action));
}

std::string DecisionProblem::sequence_label(SequenceId id) const {
  const Sequence s = sequence(id);
  if (s.is_empty()) return "<empty>";
  const DecisionInfo& info = decisions_[s.node];
  return info.label + "/" + info.actions[s.action];
}

std::optional<DecisionId> DecisionProblem::find_decision(const std::string& label) const {
  auto it = by_label_.find(label);
  if (it == by_label_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::pair<NodeIndex, std::int32_t>> DecisionProblem::signals_on_path(
    std::int32_t terminal) const {
  std::vector<std::pair<NodeIndex, std::int32_t>> out;
  NodeIndex n = terminals_.at(terminal).node;
  while (nodes_[n].parent >= 0) {
    const NodeIndex parent = nodes_[n].parent;
    if (nodes_[parent].kind == NodeKind::kObservation) {
      out.emplace_back(parent, nodes_[n].parent_edge);
    }
    n = parent;
  }
  std::reverse(out.begin(), out.end());
  return out;
}

Sequence terminal_sequence(const DecisionProblem& problem, NodeIndex node) {
  if (node < 0 || static_cast<std::size_t>(node) >= problem.nodes().size() ||
      problem.nodes()[node].kind != NodeKind::kTerminal) {
    throw StructuralError("node " + std::to_string(node) + " is not terminal");
  }
  return problem.sequence(problem.terminal(problem.nodes()[node].terminal).sequence);
}

SequenceVector<double> to_dense(const DecisionProblem& problem,
                                const SequenceMap& values) {
  SequenceVector<double> out(problem.num_sequences(), 0.0);
  for (const auto& [seq, v] : values) out[problem.sequence_id(seq)] = v;
  return out;
}

SequenceMap to_map(const DecisionProblem& problem, std::span<const double> values) {
  if (values.size() != problem.num_sequences()) {
    throw StructuralError("vector size does not match the sequence set");
  }
  SequenceMap out;
  for (std::size_t s = 0; s < values.size(); ++s) {
    out.emplace(problem.sequence(static_cast<SequenceId>(s)), values[s]);
  }
  return out;
}

DenseBehavioral<double> to_dense(const DecisionProblem& problem,
                                 const BehavioralStrategy& strategy) {
  DenseBehavioral<double> out(problem.num_decisions());
  for (std::size_t j = 0; j < problem.num_decisions(); ++j) {
    const DecisionInfo& info = problem.decision(static_cast<DecisionId>(j));
    auto it = strategy.find(info.label);
    if (it == strategy.end()) {
      throw StructuralError("behavioral strategy is missing decision node '" +
                            info.label + "'");
    }
    if (it->second.size() != info.num_actions()) {
      throw StructuralError("wrong action count at decision node '" + info.label + "'");
    }
    out[j] = it->second;
  }
  return out;
}

DenseBehavioral<double> uniform_behavioral(const DecisionProblem& problem) {
  DenseBehavioral<double> out(problem.num_decisions());
  for (std::size_t j = 0; j < problem.num_decisions(); ++j) {
    const std::size_t n = problem.decision(static_cast<DecisionId>(j)).num_actions();
    out[j].assign(n, 1.0 / static_cast<double>(n));
  }
  return out;
}

DenseBehavioral<double> to_dense_with_uniform_default(
    const DecisionProblem& problem, const BehavioralStrategy& strategy) {
  DenseBehavioral<double> out = uniform_behavioral(problem);
  for (std::size_t j = 0; j < problem.num_decisions(); ++j) {
    const DecisionInfo& info = problem.decision(static_cast<DecisionId>(j));
    auto it = strategy.find(info.label);
    if (it == strategy.end()) continue;
    if (it->second.size() != info.num_actions()) {
      throw StructuralError("wrong action count at decision node '" + info.label + "'");
    }
    out[j] = it->second;
  }
  return out;
}

BehavioralStrategy to_labeled(const DecisionProblem& problem,
                              const DenseBehavioral<double>& strategy) {
  BehavioralStrategy out;
  for (std::size_t j = 0; j < problem.num_decisions(); ++j) {
    out.emplace(problem.decision(static_cast<DecisionId>(j)).label, strategy.at(j));
  }
  return out;
}

SequenceVector<double> behavioral_to_sequence_form(const DecisionProblem& problem,
                                                   const BehavioralStrategy& b) {
  return behavioral_to_sequence_form<double>(problem, to_dense(problem, b));
}

DenseBehavioral<double> sequence_form_to_behavioral(const DecisionProblem& problem,
                                                    std::span<const double> q) {
  if (q.size() != problem.num_sequences()) {
    throw StructuralError("strategy size does not match the sequence set");
  }
  DenseBehavioral<double> out(problem.num_decisions());
  for (std::size_t j = 0; j < problem.num_decisions(); ++j) {
    const DecisionInfo& info = problem.decision(static_cast<DecisionId>(j));
    const double parent = q[info.parent_sequence];
    const std::size_t n = info.num_actions();
    out[j].resize(n);
    if (parent > 0.0) {
      for (std::size_t a = 0; a < n; ++a) out[j][a] = q[info.sequence(a)] / parent;
    } else {
      std::fill(out[j].begin(), out[j].end(), 1.0 / static_cast<double>(n));
    }
  }
  return out;
}

ValidityReport validate_sequence_form(const DecisionProblem& problem,
                                      const SequenceMap& q, double tolerance) {
  const SequenceVector<double> dense = to_dense(problem, q);
  return validate_sequence_form<double>(problem, dense, tolerance);
}

SequenceVector<double> pure_to_sequence_form(const DecisionProblem& problem,
                                             std::span<const std::int32_t> choice) {
  DenseBehavioral<double> b(problem.num_decisions());
  for (std::size_t j = 0; j < problem.num_decisions(); ++j) {
    b[j].assign(problem.decision(static_cast<DecisionId>(j)).num_actions(), 0.0);
    b[j].at(static_cast<std::size_t>(choice[j])) = 1.0;
  }
  return behavioral_to_sequence_form<double>(problem, b);
}

}  // namespace ibandit
