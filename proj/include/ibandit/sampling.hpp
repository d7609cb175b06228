#pragma once

// Scalar-generic formulas shared by the learning agents and by the exact
// (rational) oracles in the tests.

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace ibandit {

// On-path mixing weights at one decision node:
//   (1 - beta) * reach * x[a] + beta * explore_reach * h[a]
// where h is the normalized exploration function at the node.
template <class S>
std::vector<S> on_path_weights(const S& beta, const S& reach, const S& explore_reach,
                               std::span<const S> x, std::span<const S> h) {
  std::vector<S> w(x.size());
  for (std::size_t a = 0; a < x.size(); ++a) {
    w[a] = (S(1) - beta) * reach * x[a] + beta * explore_reach * h[a];
  }
  return w;
}

// Probability of a trajectory under the mixed strategy:
//   (1 - beta) * prod x_i + beta * prod h_i
// with the empty product equal to 1.
template <class S>
S trajectory_gamma(const S& beta, std::span<const S> x_chosen, std::span<const S> h_chosen) {
  if (x_chosen.size() != h_chosen.size()) {
    throw std::invalid_argument("trajectory factor lists differ in length");
  }
  S px(1);
  S ph(1);
  for (std::size_t i = 0; i < x_chosen.size(); ++i) {
    px *= x_chosen[i];
    ph *= h_chosen[i];
  }
  return (S(1) - beta) * px + beta * ph;
}

// Scale of the local gradient at each traversed node, root first. The last
// node receives u / gamma on its chosen action; each earlier node receives
// its child's value times the child's recommended probability of the action
// taken there, i.e. the counterfactual value flowing up from below.
template <class S>
std::vector<S> path_gradients(const S& payoff, const S& gamma, std::span<const S> x_chosen) {
  const std::size_t m = x_chosen.size();
  std::vector<S> out(m);
  if (m == 0) return out;
  out[m - 1] = payoff / gamma;
  for (std::size_t i = m - 1; i-- > 0;) out[i] = x_chosen[i + 1] * out[i + 1];
  return out;
}

}  // namespace ibandit
