#include <cmath>
#include <vector>

#include "doctest.h"
#include "ibandit/cfr.hpp"
#include "ibandit/eval.hpp"
#include "ibandit/online_mccfr.hpp"
#include "oracles.hpp"

using namespace ibandit;

namespace {

FixedController uniform_opponent(const GameTree& game, Player p, std::uint64_t seed) {
  const DecisionProblem& problem = game.problem(opponent(p));
  return FixedController(to_labeled(problem, uniform_behavioral(problem)),
                         StreamKey(seed).derive("opponent"));
}

}  // namespace

TEST_CASE("CFR starts uniform and ignores a zero gradient") {
  const GameTree kuhn = build_kuhn();
  const DecisionProblem& problem = kuhn.problem(Player::kOne);
  CfrState cfr(problem, RmVariant::kRmPlus);
  const std::vector<double> before(cfr.strategy().begin(), cfr.strategy().end());
  CHECK(before == behavioral_to_sequence_form<double>(problem, uniform_behavioral(problem)));
  cfr.iterate(std::vector<double>(problem.num_sequences(), 0.0));
  CHECK(std::vector<double>(cfr.strategy().begin(), cfr.strategy().end()) == before);
  CHECK_THROWS_AS(cfr.iterate(std::vector<double>(3, 0.0)), StructuralError);
}

TEST_CASE("CFR counterfactual values on the chain") {
  const GameTree chain = oracle::chain_game();
  const DecisionProblem& problem = chain.problem(Player::kOne);
  CfrState cfr(problem, RmVariant::kRm);
  const auto g = expected_gradient(chain, Player::kOne, std::vector<double>{1.0});
  cfr.iterate(g);
  const DecisionId a = *problem.find_decision("A");
  const DecisionId b = *problem.find_decision("B");
  CHECK(cfr.values()[b] == doctest::Approx(2.0 / 3.0));
  // Local gradient at A is (2/3, 1); the value under the uniform start is 5/6.
  CHECK(cfr.values()[a] == doctest::Approx(5.0 / 6.0));
  // Action r had the larger counterfactual value.
  CHECK(cfr.recommendation(a)[1] == 1.0);
  CHECK(cfr.recommendation(b)[0] == 1.0);
}

TEST_CASE("CFR on a single decision is local regret matching") {
  oracle::Builder builder;
  const NodeIndex l0 = builder.terminal(0), l1 = builder.terminal(0), l2 = builder.terminal(0);
  const GameTree game =
      builder.build(builder.decision(Player::kOne, "A", {"a", "b", "c"}, {l0, l1, l2}), "one");
  const DecisionProblem& problem = game.problem(Player::kOne);
  for (RmVariant v : {RmVariant::kRm, RmVariant::kRmPlus}) {
    CfrState cfr(problem, v);
    LocalRM rm(v, 3);
    CounterRng rng(StreamKey(9));
    const DecisionInfo& info = problem.decision(0);
    for (int t = 0; t < 500; ++t) {
      std::vector<double> grad(problem.num_sequences(), 0.0);
      std::vector<double> local(3);
      for (std::size_t a = 0; a < 3; ++a) {
        local[a] = 4.0 * rng.next_uniform() - 2.0;
        grad[info.sequence(a)] = local[a];
      }
      cfr.iterate(grad);
      rm.observe(local);
      const auto x = cfr.recommendation(0);
      REQUIRE(std::equal(x.begin(), x.end(), rm.recommend().begin(), rm.recommend().end()));
    }
  }
}

TEST_CASE("full-feedback CFR solves Kuhn") {
  const GameTree kuhn = build_kuhn();
  CfrSelfPlay cfr(kuhn, RmVariant::kRmPlus, false);
  for (int t = 0; t < 10000; ++t) cfr.step();
  CHECK(cfr.iterations() == 10000);
  const double e = exploitability(kuhn, cfr.average(Player::kOne), cfr.average(Player::kTwo));
  CHECK(e >= -1e-12);
  CHECK(e < 0.01);
  // Value of Kuhn for P1 is -1/18.
  CHECK(profile_value(kuhn, cfr.average(Player::kOne), cfr.average(Player::kTwo)) ==
        doctest::Approx(-1.0 / 18.0).epsilon(0.05));
  const auto report = validate_sequence_form<double>(kuhn.problem(Player::kOne),
                                                     cfr.average(Player::kOne), 1e-9);
  CHECK(report.violation == ValidityReport::Violation::kNone);
}

TEST_CASE("alternating CFR also converges") {
  const GameTree kuhn = build_kuhn();
  CfrSelfPlay cfr(kuhn, RmVariant::kRmPlus, true);
  for (int t = 0; t < 2000; ++t) cfr.step();
  CHECK(exploitability(kuhn, cfr.average(Player::kOne), cfr.average(Player::kTwo)) < 0.02);
}

TEST_CASE("MCCFR sampling probabilities") {
  const GameTree kuhn = build_kuhn();
  SUBCASE("epsilon 0 samples the recommendation") {
    OnlineMccfrAgent agent(0.0, RmVariant::kRmPlus, StreamKey(1));
    FixedController opp = uniform_opponent(kuhn, Player::kOne, 2);
    for (std::int64_t t = 1; t <= 500; ++t) {
      oracle::drive(kuhn, Player::kOne, agent, opp, StreamKey(3), t, t);
      double px = 1.0;
      for (const auto& s : agent.last_trajectory().steps) {
        REQUIRE(s.sampled == doctest::Approx(s.x).epsilon(1e-15));
        px *= s.x;
      }
      REQUIRE(agent.last_trajectory().gamma == doctest::Approx(px).epsilon(1e-12));
    }
  }
  SUBCASE("epsilon 1 samples uniformly") {
    OnlineMccfrAgent agent(1.0, RmVariant::kRmPlus, StreamKey(1));
    FixedController opp = uniform_opponent(kuhn, Player::kOne, 2);
    for (std::int64_t t = 1; t <= 500; ++t) {
      oracle::drive(kuhn, Player::kOne, agent, opp, StreamKey(3), t, t);
      const auto m = agent.last_trajectory().steps.size();
      REQUIRE(agent.last_trajectory().gamma == std::ldexp(1.0, -static_cast<int>(m)));
    }
  }
  SUBCASE("reach never drops below the exploration floor") {
    const double eps = 0.3;
    OnlineMccfrAgent agent(eps, RmVariant::kRmPlus, StreamKey(4));
    FixedController opp = uniform_opponent(kuhn, Player::kOne, 5);
    for (std::int64_t t = 1; t <= 2000; ++t) {
      oracle::drive(kuhn, Player::kOne, agent, opp, StreamKey(6), t, t);
      const auto& r = agent.last_trajectory();
      for (const auto& s : r.steps) REQUIRE(s.sampled >= eps / 2.0 - 1e-15);
      REQUIRE(r.gamma >= std::pow(eps / 2.0, static_cast<double>(r.steps.size())) - 1e-15);
    }
  }
  CHECK_THROWS_AS(OnlineMccfrAgent(1.5, RmVariant::kRm, StreamKey(1)), std::invalid_argument);
}

TEST_CASE("MCCFR mixed strategy matches the sampled trajectory probability") {
  const GameTree game = oracle::deep_game();
  const DecisionProblem& problem = game.problem(Player::kOne);
  OnlineMccfrAgent agent(0.4, RmVariant::kRmPlus, StreamKey(7));
  FixedController opp = uniform_opponent(game, Player::kOne, 8);
  for (std::int64_t t = 1; t <= 1000; ++t) {
    double expected = 0.0;
    oracle::drive(game, Player::kOne, agent, opp, StreamKey(9), t, t,
                  [&](std::int64_t, const EnvironmentSession& s) {
                    expected = mixed_sequence_form(problem, agent)[game.last_sequence(
                        Player::kOne, s.terminal())];
                  });
    REQUIRE(std::abs(agent.last_trajectory().gamma - expected) < 1e-12);
  }
}
