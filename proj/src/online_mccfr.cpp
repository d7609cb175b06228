#include "ibandit/online_mccfr.hpp"

#include <stdexcept>

namespace ibandit {

OnlineMccfrAgent::OnlineMccfrAgent(double epsilon, RmVariant rm, StreamKey stream)
    : DiscoveringAgent(rm, stream), epsilon_(epsilon) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw std::invalid_argument("epsilon must be in [0, 1]");
}

std::vector<double> OnlineMccfrAgent::sampling_weights(const PlayerCursor&,
                                                       const NodeView& v) const {
  const double uniform = 1.0 / static_cast<double>(v.x.size());
  std::vector<double> w(v.x.size());
  for (std::size_t a = 0; a < w.size(); ++a) w[a] = (1.0 - epsilon_) * v.x[a] + epsilon_ * uniform;
  return w;
}

std::vector<double> OnlineMccfrAgent::conditional(const PlayerCursor& c, const NodeView& v) const {
  std::vector<double> w = sampling_weights(c, v);
  double total = 0.0;
  for (double x : w) total += x;
  for (double& x : w) x /= total;
  return w;
}

std::vector<double> OnlineMccfrAgent::exploration_weights(std::string_view,
                                                          std::span<const std::string> actions) const {
  return std::vector<double>(actions.size(), 1.0 / static_cast<double>(actions.size()));
}

double OnlineMccfrAgent::trajectory_probability(const TrajectoryRecord& r) const {
  double q = 1.0;
  for (const TrajectoryStep& s : r.steps) q *= s.sampled;
  return q;
}

}  // namespace ibandit
