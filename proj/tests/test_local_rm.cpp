#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "doctest.h"
#include "ibandit/local_rm.hpp"
#include "ibandit/rng.hpp"

using namespace ibandit;

namespace {

std::vector<double> rec(const LocalRM& rm) { return {rm.recommend().begin(), rm.recommend().end()}; }

std::vector<double> recommend_from(std::vector<double> cumulative) {
  std::vector<double> out(cumulative.size());
  rm_refresh(cumulative, out);
  return out;
}

// Max regret against the best fixed action, accumulated externally.
double max_regret(RmVariant variant, std::size_t n, int T,
                  const std::function<std::vector<double>(int, const std::vector<double>&)>& gen) {
  LocalRM rm(variant, n);
  std::vector<double> total(n, 0.0);
  double realized = 0.0;
  for (int t = 0; t < T; ++t) {
    const std::vector<double> x = rec(rm);
    const std::vector<double> g = gen(t, x);
    for (std::size_t a = 0; a < n; ++a) {
      total[a] += g[a];
      realized += g[a] * x[a];
    }
    rm.observe(g);
  }
  return *std::max_element(total.begin(), total.end()) - realized;
}

}  // namespace

TEST_CASE("recommendation follows positive cumulative regret") {
  CHECK(rec(LocalRM(RmVariant::kRmPlus, 4)) == std::vector<double>(4, 0.25));
  CHECK(recommend_from({2.0, 0.0, 6.0}) == std::vector<double>{0.25, 0.0, 0.75});
  CHECK(recommend_from({-1.0, -3.0}) == std::vector<double>{0.5, 0.5});
  // Invariant under positive rescaling.
  CHECK(recommend_from({2.0, -1.0, 6.0}) == recommend_from({8.0, -4.0, 24.0}));
}

TEST_CASE("observe applies the instantaneous regret") {
  LocalRM rm(RmVariant::kRmPlus, 2);
  rm.observe(std::vector<double>{1.0, 0.0});
  CHECK(std::vector<double>(rm.cumulative_regret().begin(), rm.cumulative_regret().end()) ==
        std::vector<double>{0.5, 0.0});
  CHECK(rec(rm) == std::vector<double>{1.0, 0.0});

  LocalRM plain(RmVariant::kRm, 2);
  plain.observe(std::vector<double>{1.0, 0.0});
  CHECK(std::vector<double>(plain.cumulative_regret().begin(), plain.cumulative_regret().end()) ==
        std::vector<double>{0.5, -0.5});

  LocalRM flat(RmVariant::kRm, 3);
  flat.observe(std::vector<double>{2.0, 2.0, 2.0});
  for (double r : flat.cumulative_regret()) CHECK(r == 0.0);
  CHECK(flat.iterations() == 1);
}

TEST_CASE("observe rejects bad gradients") {
  LocalRM rm(RmVariant::kRmPlus, 2);
  CHECK_THROWS_AS(rm.observe(std::vector<double>{1.0}), std::invalid_argument);
  CHECK_THROWS_AS(rm.observe(std::vector<double>{1.0, std::numeric_limits<double>::infinity()}),
                  std::invalid_argument);
  CHECK_THROWS_AS(rm.observe(std::vector<double>{std::nan(""), 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(LocalRM(RmVariant::kRm, 0), std::invalid_argument);
  CHECK(parse_rm_variant("rm") == RmVariant::kRm);
  CHECK(parse_rm_variant("rm+") == RmVariant::kRmPlus);
  CHECK_THROWS_AS(parse_rm_variant("hedge"), std::invalid_argument);
}

TEST_CASE("regret stays within the regret-matching bound") {
  const int T = 10000;
  for (RmVariant v : {RmVariant::kRm, RmVariant::kRmPlus}) {
    for (std::size_t n : {2u, 3u, 5u}) {
      CounterRng rng(StreamKey(n).derive("rm-bound"));
      // Gradient entries span a range of 2.
      const double bound = 2.0 * std::sqrt(static_cast<double>(n) * T);
      const double random = max_regret(v, n, T, [&](int, const std::vector<double>&) {
        std::vector<double> g(n);
        for (double& x : g) x = 2.0 * rng.next_uniform() - 1.0;
        return g;
      });
      CHECK(random <= bound);
      // Adversary: reward the currently least likely action, punish the rest.
      const double adversarial = max_regret(v, n, T, [&](int, const std::vector<double>& x) {
        const auto worst = std::min_element(x.begin(), x.end()) - x.begin();
        std::vector<double> g(n, -1.0);
        g[worst] = 1.0;
        return g;
      });
      CHECK(adversarial <= bound);
    }
  }
}

TEST_CASE("RM+ cumulative regret is never negative") {
  CounterRng rng(StreamKey(3).derive("rmplus"));
  LocalRM rm(RmVariant::kRmPlus, 4);
  for (int t = 0; t < 1000; ++t) {
    std::vector<double> g(4);
    for (double& x : g) x = 10.0 * rng.next_uniform() - 5.0;
    rm.observe(g);
    for (double r : rm.cumulative_regret()) REQUIRE(r >= 0.0);
    double total = 0.0;
    for (double x : rm.recommend()) total += x;
    REQUIRE(std::abs(total - 1.0) <= 1e-12);
  }
}
