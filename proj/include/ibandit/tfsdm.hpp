#pragma once

// Tree-form sequential decision problems seen from one agent: decision nodes,
// observation points, terminals, sequences and sequence-form strategies.

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace ibandit {

using DecisionId = std::int32_t;
using SequenceId = std::int32_t;
using NodeIndex = std::int32_t;

inline constexpr SequenceId kEmptySequence = 0;

// Raised when an input does not match the structure it is supposed to index
// (unknown sequence key, missing decision node, conflicting action sets).
class StructuralError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class NodeKind { kDecision, kObservation, kTerminal };

// A (decision node, action) pair, or the empty sequence.
struct Sequence {
  DecisionId node = -1;
  std::int32_t action = -1;

  static Sequence empty() { return {}; }
  bool is_empty() const { return node < 0; }
  auto operator<=>(const Sequence&) const = default;
};

// Nested description used to build a DecisionProblem. Decision labels must be
// unique across the tree; labels on edges must be distinct within a node.
struct TreeSpec {
  NodeKind kind = NodeKind::kTerminal;
  std::string label;                // decision label, or terminal label
  std::vector<std::string> edges;   // action or signal labels
  std::vector<TreeSpec> children;   // one per edge
  std::int64_t payoff_index = -1;   // terminals only

  static TreeSpec terminal(std::string label, std::int64_t payoff_index = -1);
  static TreeSpec decision(std::string label, std::vector<std::string> actions,
                           std::vector<TreeSpec> children);
  static TreeSpec observation(std::vector<std::string> signals,
                              std::vector<TreeSpec> children);
};

struct TfsdmNode {
  NodeKind kind = NodeKind::kTerminal;
  std::vector<std::string> edges;
  std::vector<NodeIndex> children;
  NodeIndex parent = -1;
  std::int32_t parent_edge = -1;
  DecisionId decision = -1;   // decision nodes
  std::int32_t terminal = -1; // terminal nodes
};

struct DecisionInfo {
  std::string label;
  std::vector<std::string> actions;
  SequenceId parent_sequence = kEmptySequence;
  SequenceId first_sequence = 0;  // sequences of this node are contiguous
  NodeIndex node = -1;
  std::int32_t depth = 0;         // number of own decisions above this one

  std::size_t num_actions() const { return actions.size(); }
  SequenceId sequence(std::size_t action) const {
    return first_sequence + static_cast<SequenceId>(action);
  }
};

struct TerminalInfo {
  std::string label;
  SequenceId sequence = kEmptySequence;  // last sequence on the root path
  std::int64_t payoff_index = -1;
  NodeIndex node = -1;
};

// Immutable once built. Sequences are interned to dense ids: 0 is the empty
// sequence, then the actions of each decision node in depth-first order.
class DecisionProblem {
 public:
  static DecisionProblem from_tree(const TreeSpec& root);

  std::size_t num_sequences() const { return sequence_decision_.size(); }
  std::size_t num_decisions() const { return decisions_.size(); }
  std::size_t num_terminals() const { return terminals_.size(); }

  const DecisionInfo& decision(DecisionId j) const { return decisions_.at(j); }
  std::span<const DecisionInfo> decisions() const { return decisions_; }
  const TerminalInfo& terminal(std::int32_t z) const { return terminals_.at(z); }
  std::span<const TerminalInfo> terminals() const { return terminals_; }
  std::span<const TfsdmNode> nodes() const { return nodes_; }
  NodeIndex root() const { return 0; }

  Sequence sequence(SequenceId id) const;
  SequenceId sequence_id(Sequence s) const;  // throws StructuralError
  // Decision node owning a non-empty sequence; -1 for the empty sequence.
  DecisionId sequence_decision(SequenceId id) const { return sequence_decision_[id]; }
  std::string sequence_label(SequenceId id) const;

  // Decision nodes whose parent sequence is `s`, in depth-first order.
  std::span<const DecisionId> child_decisions(SequenceId s) const {
    return child_decisions_[s];
  }
  std::span<const std::int32_t> child_terminals(SequenceId s) const {
    return child_terminals_[s];
  }

  std::optional<DecisionId> find_decision(const std::string& label) const;

  // Observation-point/signal pairs on the root path of a terminal.
  std::vector<std::pair<NodeIndex, std::int32_t>> signals_on_path(
      std::int32_t terminal) const;

 private:
  std::vector<TfsdmNode> nodes_;
  std::vector<DecisionInfo> decisions_;
  std::vector<TerminalInfo> terminals_;
  std::vector<DecisionId> sequence_decision_;
  std::vector<std::vector<DecisionId>> child_decisions_;
  std::vector<std::vector<std::int32_t>> child_terminals_;
  std::unordered_map<std::string, DecisionId> by_label_;
};

// Terminal sequence of a tree node; StructuralError when `node` is not
// a terminal.
Sequence terminal_sequence(const DecisionProblem& problem, NodeIndex node);

// ---------------------------------------------------------------------------
// Strategies.

// Dense sequence-indexed vector (sequence-form strategy or gradient).
template <class Scalar>
using SequenceVector = std::vector<Scalar>;

// Interchange form keyed by Sequence.
using SequenceMap = std::map<Sequence, double>;

SequenceVector<double> to_dense(const DecisionProblem& problem,
                                const SequenceMap& values);
SequenceMap to_map(const DecisionProblem& problem,
                   std::span<const double> values);

// Distribution over actions per decision node, keyed by decision label.
using BehavioralStrategy = std::map<std::string, std::vector<double>>;

// Per decision id; the working form of a behavioral strategy.
template <class Scalar>
using DenseBehavioral = std::vector<std::vector<Scalar>>;

DenseBehavioral<double> to_dense(const DecisionProblem& problem,
                                 const BehavioralStrategy& strategy);
DenseBehavioral<double> uniform_behavioral(const DecisionProblem& problem);
// Missing labels are filled with the uniform distribution.
DenseBehavioral<double> to_dense_with_uniform_default(
    const DecisionProblem& problem, const BehavioralStrategy& strategy);
BehavioralStrategy to_labeled(const DecisionProblem& problem,
                              const DenseBehavioral<double>& strategy);

template <class Scalar>
SequenceVector<Scalar> behavioral_to_sequence_form(
    const DecisionProblem& problem, const DenseBehavioral<Scalar>& b) {
  if (b.size() != problem.num_decisions()) {
    throw StructuralError("behavioral strategy does not cover the problem");
  }
  SequenceVector<Scalar> q(problem.num_sequences(), Scalar(0));
  q[kEmptySequence] = Scalar(1);
  // Decision ids are assigned in depth-first order, so parents come first.
  for (std::size_t j = 0; j < problem.num_decisions(); ++j) {
    const DecisionInfo& info = problem.decision(static_cast<DecisionId>(j));
    if (b[j].size() != info.num_actions()) {
      throw StructuralError("wrong action count at decision '" + info.label + "'");
    }
    const Scalar parent = q[info.parent_sequence];
    for (std::size_t a = 0; a < info.num_actions(); ++a) {
      q[info.sequence(a)] = parent * b[j][a];
    }
  }
  return q;
}

SequenceVector<double> behavioral_to_sequence_form(
    const DecisionProblem& problem, const BehavioralStrategy& b);

// Inverse of the product construction; nodes with zero parent mass map to
// the uniform distribution.
DenseBehavioral<double> sequence_form_to_behavioral(
    const DecisionProblem& problem, std::span<const double> q);

struct ValidityReport {
  enum class Violation { kNone, kEmptySequence, kFlow, kNegative };
  Violation violation = Violation::kNone;
  DecisionId decision = -1;   // kFlow
  SequenceId sequence = -1;   // kNegative / kEmptySequence
  double residual = 0.0;

  bool ok() const { return violation == Violation::kNone; }
};

template <class Scalar>
ValidityReport validate_sequence_form(const DecisionProblem& problem,
                                      std::span<const Scalar> q,
                                      const Scalar& tolerance = Scalar(0)) {
  if (q.size() != problem.num_sequences()) {
    throw StructuralError("strategy size does not match the sequence set");
  }
  auto abs_diff = [](const Scalar& a, const Scalar& b) {
    return a > b ? Scalar(a - b) : Scalar(b - a);
  };
  ValidityReport report;
  if (abs_diff(q[kEmptySequence], Scalar(1)) > tolerance) {
    report.violation = ValidityReport::Violation::kEmptySequence;
    report.sequence = kEmptySequence;
    report.residual = static_cast<double>(Scalar(q[kEmptySequence] - Scalar(1)));
    return report;
  }
  for (std::size_t s = 0; s < q.size(); ++s) {
    if (q[s] < Scalar(0)) {
      report.violation = ValidityReport::Violation::kNegative;
      report.sequence = static_cast<SequenceId>(s);
      report.residual = static_cast<double>(q[s]);
      return report;
    }
  }
  for (std::size_t j = 0; j < problem.num_decisions(); ++j) {
    const DecisionInfo& info = problem.decision(static_cast<DecisionId>(j));
    Scalar total(0);
    for (std::size_t a = 0; a < info.num_actions(); ++a) total += q[info.sequence(a)];
    if (abs_diff(total, q[info.parent_sequence]) > tolerance) {
      report.violation = ValidityReport::Violation::kFlow;
      report.decision = static_cast<DecisionId>(j);
      report.residual = static_cast<double>(Scalar(total - q[info.parent_sequence]));
      return report;
    }
  }
  return report;
}

ValidityReport validate_sequence_form(const DecisionProblem& problem,
                                      const SequenceMap& q,
                                      double tolerance = 1e-12);

template <class Scalar>
Scalar expected_value(std::span<const Scalar> q, std::span<const Scalar> gradient) {
  if (q.size() != gradient.size()) {
    throw StructuralError("strategy and gradient sizes differ");
  }
  Scalar total(0);
  for (std::size_t i = 0; i < q.size(); ++i) total += gradient[i] * q[i];
  return total;
}

// Best pure strategy against a fixed gradient, by one bottom-up pass.
// Ties go to the lowest action index.
template <class Scalar>
struct PureResponse {
  Scalar value{};
  std::vector<std::int32_t> choice;  // action per decision id
};

template <class Scalar>
PureResponse<Scalar> best_pure_response(const DecisionProblem& problem,
                                        std::span<const Scalar> gradient) {
  if (gradient.size() != problem.num_sequences()) {
    throw StructuralError("gradient size does not match the sequence set");
  }
  const std::size_t n = problem.num_decisions();
  std::vector<Scalar> seq_value(gradient.begin(), gradient.end());
  PureResponse<Scalar> out;
  out.choice.assign(n, 0);
  // Children have larger decision ids than their parents.
  for (std::size_t jj = n; jj-- > 0;) {
    const DecisionInfo& info = problem.decision(static_cast<DecisionId>(jj));
    std::int32_t best = 0;
    for (std::size_t a = 1; a < info.num_actions(); ++a) {
      if (seq_value[info.sequence(a)] > seq_value[info.sequence(best)]) {
        best = static_cast<std::int32_t>(a);
      }
    }
    out.choice[jj] = best;
    seq_value[info.parent_sequence] += seq_value[info.sequence(best)];
  }
  out.value = seq_value[kEmptySequence];
  return out;
}

SequenceVector<double> pure_to_sequence_form(const DecisionProblem& problem,
                                             std::span<const std::int32_t> choice);

}  // namespace ibandit
