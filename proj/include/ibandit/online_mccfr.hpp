#pragma once

// Online outcome-sampling MCCFR: epsilon-greedy exploration at every decision
// node, importance correction by the sampled trajectory probability.

#include "ibandit/bandit_agent.hpp"

namespace ibandit {

class OnlineMccfrAgent final : public DiscoveringAgent {
 public:
  OnlineMccfrAgent(double epsilon, RmVariant rm, StreamKey stream);

  double epsilon() const { return epsilon_; }

 protected:
  std::vector<double> sampling_weights(const PlayerCursor& c, const NodeView& v) const override;
  std::vector<double> conditional(const PlayerCursor& c, const NodeView& v) const override;
  std::vector<double> exploration_weights(std::string_view signal,
                                          std::span<const std::string> actions) const override;
  void on_begin(std::int64_t) override {}
  double trajectory_probability(const TrajectoryRecord& r) const override;

 private:
  double epsilon_;
};

}  // namespace ibandit
