#include "ibandit/local_rm.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ibandit {

RmVariant parse_rm_variant(std::string_view name) {
  if (name == "rm") return RmVariant::kRm;
  if (name == "rm+" || name == "rmplus") return RmVariant::kRmPlus;
  throw std::invalid_argument("unknown regret minimizer '" + std::string(name) + "'");
}

void rm_refresh(std::span<const double> cumulative, std::span<double> recommendation) {
  double total = 0.0;
  for (double r : cumulative) total += std::max(r, 0.0);
  const std::size_t n = cumulative.size();
  if (total > 0.0) {
    for (std::size_t a = 0; a < n; ++a) {
      recommendation[a] = std::max(cumulative[a], 0.0) / total;
    }
  } else {
    std::fill(recommendation.begin(), recommendation.end(), 1.0 / static_cast<double>(n));
  }
}

void rm_observe(RmVariant variant, std::span<double> cumulative,
                std::span<double> recommendation, std::span<const double> gradient) {
  if (gradient.size() != cumulative.size()) {
    throw std::invalid_argument("gradient has " + std::to_string(gradient.size()) +
                                " entries, expected " + std::to_string(cumulative.size()));
  }
  double value = 0.0;
  for (std::size_t a = 0; a < gradient.size(); ++a) {
    if (!std::isfinite(gradient[a])) throw std::invalid_argument("non-finite gradient entry");
    value += gradient[a] * recommendation[a];
  }
  for (std::size_t a = 0; a < gradient.size(); ++a) {
    cumulative[a] += gradient[a] - value;
    if (variant == RmVariant::kRmPlus && cumulative[a] < 0.0) cumulative[a] = 0.0;
  }
  rm_refresh(cumulative, recommendation);
}

LocalRM::LocalRM(RmVariant variant, std::size_t num_actions)
    : variant_(variant), cumulative_(num_actions, 0.0), recommendation_(num_actions, 0.0) {
  if (num_actions == 0) throw std::invalid_argument("LocalRM needs at least one action");
  rm_refresh(cumulative_, recommendation_);
}

void LocalRM::observe(std::span<const double> gradient) {
  rm_observe(variant_, cumulative_, recommendation_, gradient);
  ++iterations_;
}

}  // namespace ibandit
