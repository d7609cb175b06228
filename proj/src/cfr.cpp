#include "ibandit/cfr.hpp"

#include "ibandit/session.hpp"

namespace ibandit {

CfrState::CfrState(const DecisionProblem& problem, RmVariant rm)
    : problem_(&problem), values_(problem.num_decisions(), 0.0) {
  rms_.reserve(problem.num_decisions());
  for (const DecisionInfo& info : problem.decisions()) rms_.emplace_back(rm, info.num_actions());
  rebuild();
}

void CfrState::rebuild() {
  DenseBehavioral<double> b(rms_.size());
  for (std::size_t j = 0; j < rms_.size(); ++j) {
    const auto x = rms_[j].recommend();
    b[j].assign(x.begin(), x.end());
  }
  strategy_ = behavioral_to_sequence_form<double>(*problem_, b);
}

std::span<const double> CfrState::iterate(std::span<const double> gradient) {
  if (gradient.size() != problem_->num_sequences()) {
    throw StructuralError("gradient size does not match the sequence set");
  }
  std::vector<double> local;
  // Children have larger ids than their parents.
  for (std::size_t jj = problem_->num_decisions(); jj-- > 0;) {
    const DecisionInfo& info = problem_->decision(static_cast<DecisionId>(jj));
    const std::size_t n = info.num_actions();
    local.assign(n, 0.0);
    for (std::size_t a = 0; a < n; ++a) {
      double g = gradient[info.sequence(a)];
      for (DecisionId child : problem_->child_decisions(info.sequence(a))) g += values_[child];
      local[a] = g;
    }
    const auto x = rms_[jj].recommend();
    double v = 0.0;
    for (std::size_t a = 0; a < n; ++a) v += x[a] * local[a];
    values_[jj] = v;
    rms_[jj].observe(local);
  }
  rebuild();
  return strategy_;
}

CfrSelfPlay::CfrSelfPlay(const GameTree& game, RmVariant rm, bool alternating)
    : game_(&game), alternating_(alternating) {
  states_.emplace_back(game.problem(Player::kOne), rm);
  states_.emplace_back(game.problem(Player::kTwo), rm);
  for (std::size_t p = 0; p < 2; ++p) sums_[p].assign(states_[p].strategy().size(), 0.0);
}

void CfrSelfPlay::step() {
  ++t_;
  for (std::size_t p = 0; p < 2; ++p) {
    const auto y = states_[p].strategy();
    for (std::size_t s = 0; s < y.size(); ++s) sums_[p][s] += y[s];
  }
  gradients_[0] = expected_gradient(*game_, Player::kOne, states_[1].strategy());
  if (alternating_) {
    states_[0].iterate(gradients_[0]);
    gradients_[1] = expected_gradient(*game_, Player::kTwo, states_[0].strategy());
  } else {
    gradients_[1] = expected_gradient(*game_, Player::kTwo, states_[0].strategy());
    states_[0].iterate(gradients_[0]);
  }
  states_[1].iterate(gradients_[1]);
}

std::vector<double> CfrSelfPlay::average(Player p) const {
  std::vector<double> out = sums_[index(p)];
  if (t_ == 0) return std::vector<double>(states_[index(p)].strategy().begin(),
                                          states_[index(p)].strategy().end());
  for (double& v : out) v /= static_cast<double>(t_);
  return out;
}

}  // namespace ibandit
