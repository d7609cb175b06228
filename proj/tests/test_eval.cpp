#include <cmath>
#include <vector>

#include "doctest.h"
#include "ibandit/cfr.hpp"
#include "ibandit/eval.hpp"
#include "oracles.hpp"

using namespace ibandit;
using oracle::Rational;

namespace {

// The alpha = 0 member of Kuhn's equilibrium family.
BehavioralStrategy kuhn_nash_p1() {
  return {{"P1:J:", {1, 0}},          {"P1:Q:", {1, 0}},           {"P1:K:", {1, 0}},
          {"P1:J:kb", {1, 0}},        {"P1:Q:kb", {2.0 / 3, 1.0 / 3}}, {"P1:K:kb", {0, 1}}};
}
BehavioralStrategy kuhn_nash_p2() {
  return {{"P2:J:b", {1, 0}}, {"P2:Q:b", {2.0 / 3, 1.0 / 3}}, {"P2:K:b", {0, 1}},
          {"P2:J:k", {2.0 / 3, 1.0 / 3}}, {"P2:Q:k", {1, 0}}, {"P2:K:k", {0, 1}}};
}

std::vector<std::vector<Rational>> exact(const DenseBehavioral<double>& b) {
  std::vector<std::vector<Rational>> out(b.size());
  for (std::size_t j = 0; j < b.size(); ++j) {
    for (double v : b[j]) out[j].emplace_back(v);
  }
  return out;
}

}  // namespace

TEST_CASE("best response on the trivial game") {
  const GameTree game = build_trivial();
  const BestResponse br = best_response(game, Player::kOne, std::vector<double>{1.0});
  CHECK(br.value == 1.0);
  CHECK(br.choice == std::vector<std::int32_t>{0});
  // P2 has no decisions and just takes the payoff of P1's strategy.
  const auto y1 = behavioral_to_sequence_form<double>(game.problem(Player::kOne),
                                                      DenseBehavioral<double>{{0.25, 0.75}});
  CHECK(best_response(game, Player::kTwo, y1).value == doctest::Approx(0.5));
}

TEST_CASE("best response agrees with brute-force enumeration") {
  const std::vector<GameTree> games = [] {
    std::vector<GameTree> g;
    g.push_back(build_kuhn());
    g.push_back(oracle::chance_game());
    g.push_back(oracle::deep_game());
    g.push_back(oracle::pennies_game());
    return g;
  }();
  CounterRng rng(StreamKey(17));
  for (const GameTree& game : games) {
    for (Player p : {Player::kOne, Player::kTwo}) {
      const DecisionProblem& opp = game.problem(opponent(p));
      for (int trial = 0; trial < 3; ++trial) {
        DenseBehavioral<double> b = uniform_behavioral(opp);
        if (trial > 0) {
          for (auto& dist : b) {
            double total = 0.0;
            for (double& v : dist) total += (v = 0.05 + rng.next_uniform());
            for (double& v : dist) v /= total;
          }
        }
        const auto y = behavioral_to_sequence_form<double>(opp, b);
        const BestResponse br = best_response(game, p, y);
        const double brute = oracle::to_double(oracle::brute_best_response(game, p, exact(b)));
        CHECK(br.value == doctest::Approx(brute).epsilon(1e-12));
        const double achieved =
            oracle::to_double(oracle::pure_value(game, p, br.choice, exact(b)));
        CHECK(achieved == doctest::Approx(brute).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("exploitability of reference profiles") {
  const GameTree kuhn = build_kuhn();
  CHECK(std::abs(exploitability(kuhn, kuhn_nash_p1(), kuhn_nash_p2())) < 1e-12);
  CHECK(profile_value(kuhn, sequence_form_of(kuhn, Player::kOne, kuhn_nash_p1()),
                      sequence_form_of(kuhn, Player::kTwo, kuhn_nash_p2())) ==
        doctest::Approx(-1.0 / 18.0));

  const GameTree pennies = oracle::pennies_game();
  CHECK(exploitability(pennies, BehavioralStrategy{}, BehavioralStrategy{}) == 0.0);
  const BehavioralStrategy heads{{"P1", {1, 0}}};
  CHECK(exploitability(pennies, heads, BehavioralStrategy{}) == doctest::Approx(0.5));

  // Uniform against uniform, checked against the brute-force gains.
  const auto u1 = oracle::uniform(kuhn.problem(Player::kOne));
  const auto u2 = oracle::uniform(kuhn.problem(Player::kTwo));
  const Rational gain1 = oracle::brute_best_response(kuhn, Player::kOne, u2);
  const Rational gain2 = oracle::brute_best_response(kuhn, Player::kTwo, u1);
  const double expected = oracle::to_double((gain1 + gain2) / 2);
  CHECK(exploitability(kuhn, BehavioralStrategy{}, BehavioralStrategy{}) ==
        doctest::Approx(expected).epsilon(1e-12));
  CHECK(expected == doctest::Approx(0.4583333333333333));
}

TEST_CASE("gold solver reaches low exploitability") {
  const GameTree kuhn = build_kuhn();
  CfrSelfPlay cfr(kuhn, RmVariant::kRmPlus, false);
  for (int t = 0; t < 100000; ++t) cfr.step();
  CHECK(exploitability(kuhn, cfr.average(Player::kOne), cfr.average(Player::kTwo)) < 0.005);
}

TEST_CASE("hindsight regret equals brute-force maximization") {
  const std::vector<GameTree> games = [] {
    std::vector<GameTree> g;
    g.push_back(build_kuhn());
    g.push_back(oracle::deep_game());
    return g;
  }();
  CounterRng rng(StreamKey(23));
  for (const GameTree& game : games) {
    const DecisionProblem& problem = game.problem(Player::kOne);
    RegretAudit audit(problem);
    std::vector<double> total(problem.num_sequences(), 0.0);
    double realized = 0.0;
    for (int t = 0; t < 50; ++t) {
      std::vector<double> g(problem.num_sequences());
      for (double& v : g) v = 4.0 * rng.next_uniform() - 2.0;
      const double r = rng.next_uniform() - 0.5;
      audit.add(g, r);
      for (std::size_t s = 0; s < g.size(); ++s) total[s] += g[s];
      realized += r;
    }
    CHECK(audit.iterations() == 50);
    double best = -1e300;
    for (const auto& pure : oracle::all_pure(problem)) {
      const auto q = oracle::pure_sequence_form<double>(problem, pure);
      double v = 0.0;
      for (std::size_t s = 0; s < q.size(); ++s) v += q[s] * total[s];
      best = std::max(best, v);
    }
    CHECK(hindsight_regret(audit) == doctest::Approx(best - realized).epsilon(1e-12));
  }
}

TEST_CASE("log-log fits recover synthetic exponents") {
  for (double k : {0.75, 0.5}) {
    std::vector<std::pair<double, double>> series;
    for (int i = 0; i <= 40; ++i) {
      const double t = std::pow(10.0, 1.0 + i / 10.0);
      series.emplace_back(t, 3.0 * std::pow(t, k));
    }
    CHECK(sublinearity_fit(series) == doctest::Approx(k).epsilon(1e-9));
    CHECK(loglog_slope(series) == doctest::Approx(k).epsilon(1e-9));
  }
  const std::vector<std::pair<double, double>> short_series{{10, 1}, {20, 2}, {30, 3}};
  CHECK_THROWS_AS(sublinearity_fit(short_series), std::invalid_argument);
  const std::vector<std::pair<double, double>> narrow{{10, 1}, {20, 2}, {30, 3}, {40, 4}, {50, 5}};
  CHECK_THROWS_AS(sublinearity_fit(narrow), std::invalid_argument);
  // Nonpositive regrets are clamped rather than rejected.
  const std::vector<std::pair<double, double>> flat{{10, 0}, {100, 0}};
  CHECK(loglog_slope(flat) == doctest::Approx(0.0));
}

TEST_CASE("exploration diagnostics") {
  const GameTree kuhn = build_kuhn();
  const DecisionProblem& p1 = kuhn.problem(Player::kOne);
  const std::vector<ExplorationFunction> constant(5, ExplorationFunction::uniform());
  const Diagnostics d = rho_and_nu(p1, constant);
  CHECK(d.rho.size() == 5);
  CHECK(d.nu == doctest::Approx(d.rho[0]));
  CHECK(d.rho[0] == 4.0);

  const std::vector<ExplorationFunction> mixed{ExplorationFunction::uniform(),
                                               ExplorationFunction::balanced(p1)};
  const Diagnostics m = rho_and_nu(p1, mixed);
  CHECK(m.nu == doctest::Approx(std::sqrt((m.rho[0] * m.rho[0] + m.rho[1] * m.rho[1]) / 2.0)));
  CHECK_THROWS_AS(rho_and_nu(p1, std::span<const ExplorationFunction>{}), std::invalid_argument);

  for (const GameTree& game : {build_kuhn(), build_leduc()}) {
    for (Player p : {Player::kOne, Player::kTwo}) {
      const DecisionProblem& problem = game.problem(p);
      const double rho = exploration_rho(problem, ExplorationFunction::balanced(problem));
      CHECK(rho <= static_cast<double>(problem.num_sequences()) - 1.0);
      CHECK(rho >= 1.0);
    }
  }
}

TEST_CASE("label-keyed strategies map onto sequence form") {
  const GameTree kuhn = build_kuhn();
  const auto y = sequence_form_of(kuhn, Player::kOne, kuhn_nash_p1());
  CHECK(validate_sequence_form<double>(kuhn.problem(Player::kOne), y, 1e-12).violation ==
        ValidityReport::Violation::kNone);
  const BestResponse from_labels = best_response_value(kuhn, kuhn_nash_p1(), Player::kTwo);
  const BestResponse from_seq = best_response(kuhn, Player::kTwo, y);
  CHECK(from_labels.value == from_seq.value);
  CHECK(from_labels.choice == from_seq.choice);
}
