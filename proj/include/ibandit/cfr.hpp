#pragma once

// Full-feedback CFR over a known decision problem.

#include <span>
#include <vector>

#include "ibandit/game.hpp"
#include "ibandit/local_rm.hpp"
#include "ibandit/tfsdm.hpp"

namespace ibandit {

class CfrState {
 public:
  CfrState(const DecisionProblem& problem, RmVariant rm);

  const DecisionProblem& problem() const { return *problem_; }
  // Current sequence-form recommendation y^t.
  std::span<const double> strategy() const { return strategy_; }
  std::span<const double> recommendation(DecisionId j) const { return rms_[j].recommend(); }
  // Counterfactual values of the last iterate() call, per decision.
  std::span<const double> values() const { return values_; }

  // Builds counterfactual gradients bottom-up from a sequence-indexed
  // gradient, updates every local regret minimizer and returns y^{t+1}.
  std::span<const double> iterate(std::span<const double> gradient);

 private:
  void rebuild();

  const DecisionProblem* problem_;
  std::vector<LocalRM> rms_;
  std::vector<double> strategy_;
  std::vector<double> values_;
};

// Two CFR players in full-feedback self-play, averaging y^t uniformly.
class CfrSelfPlay {
 public:
  CfrSelfPlay(const GameTree& game, RmVariant rm, bool alternating);

  void step();
  std::int64_t iterations() const { return t_; }
  std::vector<double> average(Player p) const;
  std::span<const double> current(Player p) const { return states_[index(p)].strategy(); }
  // Gradients used in the last step.
  std::span<const double> last_gradient(Player p) const { return gradients_[index(p)]; }

 private:
  const GameTree* game_;
  bool alternating_;
  std::vector<CfrState> states_;
  std::array<std::vector<double>, 2> sums_;
  std::array<std::vector<double>, 2> gradients_;
  std::int64_t t_ = 0;
};

}  // namespace ibandit
