#include "ibandit/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ibandit/session.hpp"

namespace ibandit {

BestResponse best_response(const GameTree& game, Player p,
                           std::span<const double> opponent_strategy) {
  const std::vector<double> g = expected_gradient(game, p, opponent_strategy);
  PureResponse<double> r = best_pure_response<double>(game.problem(p), g);
  return {r.value, std::move(r.choice)};
}

std::vector<double> sequence_form_of(const GameTree& game, Player p,
                                     const BehavioralStrategy& strategy) {
  const DecisionProblem& problem = game.problem(p);
  return behavioral_to_sequence_form<double>(problem,
                                             to_dense_with_uniform_default(problem, strategy));
}

BestResponse best_response_value(const GameTree& game, const BehavioralStrategy& opponent,
                                 Player p) {
  return best_response(game, p, sequence_form_of(game, ibandit::opponent(p), opponent));
}

double profile_value(const GameTree& game, std::span<const double> y1,
                     std::span<const double> y2) {
  const std::vector<double> g = expected_gradient(game, Player::kOne, y2);
  return expected_value<double>(y1, g);
}

double exploitability(const GameTree& game, std::span<const double> y1,
                      std::span<const double> y2) {
  const double br1 = best_response(game, Player::kOne, y2).value;
  const double br2 = best_response(game, Player::kTwo, y1).value;
  // Zero-sum: the profile value cancels between the two gains.
  return std::max(0.0, (br1 + br2) / 2.0);
}

double exploitability(const GameTree& game, const BehavioralStrategy& s1,
                      const BehavioralStrategy& s2) {
  return exploitability(game, sequence_form_of(game, Player::kOne, s1),
                        sequence_form_of(game, Player::kTwo, s2));
}

void RegretAudit::add(std::span<const double> gradient, double realized) {
  if (gradient.size() != total_.size()) {
    throw StructuralError("audited gradient does not match the sequence set");
  }
  for (std::size_t s = 0; s < total_.size(); ++s) total_[s] += gradient[s];
  realized_ += realized;
  ++iterations_;
}

double hindsight_regret(const RegretAudit& audit) {
  if (audit.iterations() == 0) throw std::logic_error("no audited iterations");
  return best_pure_response<double>(audit.problem(), audit.cumulative_gradient()).value -
         audit.realized();
}

double loglog_slope(std::span<const std::pair<double, double>> series) {
  const double eps = std::numeric_limits<double>::epsilon();
  double n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [t, r] : series) {
    if (!(t > 0.0)) throw std::invalid_argument("checkpoints must be positive");
    const double x = std::log(t);
    const double y = std::log(std::max(r, eps));
    n += 1;
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double den = n * sxx - sx * sx;
  if (n < 2 || !(den > 0.0)) throw std::invalid_argument("need two distinct checkpoints");
  return (n * sxy - sx * sy) / den;
}

double sublinearity_fit(std::span<const std::pair<double, double>> series) {
  if (series.size() < 5) throw std::invalid_argument("need at least 5 checkpoints");
  const double first = series.front().first;
  const double last = series.back().first;
  if (!(first > 0.0) || last / first < 100.0 * (1.0 - 1e-12)) {
    throw std::invalid_argument("checkpoints must span at least two decades");
  }
  std::vector<std::pair<double, double>> tail;
  for (const auto& point : series) {
    if (point.first >= last / 10.0 * (1.0 - 1e-12)) tail.push_back(point);
  }
  if (tail.size() < 2) throw std::invalid_argument("need at least two checkpoints in the last decade");
  return loglog_slope(tail);
}

double exploration_rho(const DecisionProblem& problem, const ExplorationFunction& h) {
  const std::vector<double> xi = exploration_strategy(problem, h);
  double rho = 0.0;
  for (const TerminalInfo& z : problem.terminals()) rho = std::max(rho, 1.0 / xi[z.sequence]);
  return rho;
}

Diagnostics rho_and_nu(const DecisionProblem& problem,
                       std::span<const ExplorationFunction> per_iteration) {
  if (per_iteration.empty()) throw std::invalid_argument("no iterations");
  Diagnostics d;
  double sq = 0.0;
  for (const ExplorationFunction& h : per_iteration) {
    const double rho = exploration_rho(problem, h);
    if (h.kind() == ExplorationFunction::Kind::kBalanced &&
        rho > static_cast<double>(problem.num_sequences() - 1) * (1.0 + 1e-12)) {
      throw std::logic_error("balanced exploration exceeds the |Sigma| - 1 bound");
    }
    d.rho.push_back(rho);
    sq += rho * rho;
  }
  d.nu = std::sqrt(sq / static_cast<double>(per_iteration.size()));
  return d;
}

}  // namespace ibandit
