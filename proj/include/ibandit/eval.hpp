#pragma once

// Evaluators that use full knowledge of the game: best responses,
// exploitability, hindsight-regret audits and exploration diagnostics.

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "ibandit/bandit_agent.hpp"
#include "ibandit/game.hpp"
#include "ibandit/tfsdm.hpp"

namespace ibandit {

struct BestResponse {
  double value = 0.0;
  std::vector<std::int32_t> choice;  // per decision of the responding player
};

// Best pure response of `p` to the opponent's sequence-form strategy.
BestResponse best_response(const GameTree& game, Player p,
                           std::span<const double> opponent_strategy);
// Same, from a label-keyed behavioral strategy (uniform where missing).
BestResponse best_response_value(const GameTree& game, const BehavioralStrategy& opponent,
                                 Player p);

// Expected payoff of P1 under a sequence-form profile.
double profile_value(const GameTree& game, std::span<const double> y1,
                     std::span<const double> y2);

// Mean of the two best-response gains, in game units.
double exploitability(const GameTree& game, std::span<const double> y1,
                      std::span<const double> y2);
double exploitability(const GameTree& game, const BehavioralStrategy& s1,
                      const BehavioralStrategy& s2);

// Running sum of true gradients and realized rewards for one player.
class RegretAudit {
 public:
  explicit RegretAudit(const DecisionProblem& problem)
      : problem_(&problem), total_(problem.num_sequences(), 0.0) {}

  void add(std::span<const double> gradient, double realized);
  std::int64_t iterations() const { return iterations_; }
  const DecisionProblem& problem() const { return *problem_; }
  std::span<const double> cumulative_gradient() const { return total_; }
  double realized() const { return realized_; }

 private:
  const DecisionProblem* problem_;
  std::vector<double> total_;
  double realized_ = 0.0;
  std::int64_t iterations_ = 0;
};

// max over pure strategies of the cumulative gradient, minus the realized
// total.
double hindsight_regret(const RegretAudit& audit);

// Least-squares slope of log R against log T over all points; nonpositive
// regrets are clamped to machine epsilon.
double loglog_slope(std::span<const std::pair<double, double>> series);

// Least-squares slope of log R against log T over the last decade of the
// series. Needs at least 5 points spanning two decades; nonpositive regrets
// are clamped to machine epsilon.
double sublinearity_fit(std::span<const std::pair<double, double>> series);

// max over terminals of 1 / xi[sigma(z)].
double exploration_rho(const DecisionProblem& problem, const ExplorationFunction& h);

struct Diagnostics {
  std::vector<double> rho;
  double nu = 0.0;  // root mean square of rho
};

// One exploration function per iteration.
Diagnostics rho_and_nu(const DecisionProblem& problem,
                       std::span<const ExplorationFunction> per_iteration);

// Sequence-form strategy of a label-keyed behavioral strategy over a game
// player's problem, uniform where a label is missing.
std::vector<double> sequence_form_of(const GameTree& game, Player p,
                                     const BehavioralStrategy& strategy);

}  // namespace ibandit
