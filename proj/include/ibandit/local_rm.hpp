#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace ibandit {

enum class RmVariant { kRm, kRmPlus };

RmVariant parse_rm_variant(std::string_view name);  // "rm" or "rm+"

// Raw regret-matching arithmetic on caller-owned storage. LocalRM and the
// flat per-node arrays of the learning agents share it, so that both produce
// identical floating-point results.
void rm_refresh(std::span<const double> cumulative, std::span<double> recommendation);
void rm_observe(RmVariant variant, std::span<double> cumulative,
                std::span<double> recommendation, std::span<const double> gradient);

// Regret matching over one simplex. Gradients are gains: higher is better.
class LocalRM {
 public:
  LocalRM(RmVariant variant, std::size_t num_actions);

  RmVariant variant() const { return variant_; }
  std::size_t num_actions() const { return cumulative_.size(); }
  std::int64_t iterations() const { return iterations_; }
  std::span<const double> cumulative_regret() const { return cumulative_; }

  // Current recommendation; cached, so repeated calls are free and the
  // regret update uses exactly what was returned.
  std::span<const double> recommend() const { return recommendation_; }

  // Throws std::invalid_argument on a wrong size or a non-finite entry.
  void observe(std::span<const double> gradient);

 private:
  RmVariant variant_;
  std::vector<double> cumulative_;
  std::vector<double> recommendation_;
  std::int64_t iterations_ = 0;
};

}  // namespace ibandit
