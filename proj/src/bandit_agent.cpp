#include "ibandit/bandit_agent.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ibandit/sampling.hpp"

namespace ibandit {

namespace {

constexpr std::uint64_t kActionTag = 0x9e3779b97f4a7c15ULL;

std::vector<double> normalize_or(std::vector<double> w, std::span<const double> fallback) {
  double total = 0.0;
  for (double v : w) total += v;
  if (!(total > 0.0)) return {fallback.begin(), fallback.end()};
  for (double& v : w) v /= total;
  return w;
}

}  // namespace

double Schedule::beta(std::int64_t t) const {
  if (fixed) return *fixed;
  if (t < 1) throw std::invalid_argument("iterations are numbered from 1");
  return std::min(1.0, k * std::pow(static_cast<double>(t), -0.25));
}

RolloutVariant parse_rollout_variant(std::string_view name) {
  if (name == "on-path") return RolloutVariant::kOnPath;
  if (name == "upfront") return RolloutVariant::kUpfront;
  if (name == "alternating") return RolloutVariant::kAlternating;
  throw std::invalid_argument("unknown rollout variant '" + std::string(name) + "'");
}

std::string_view to_string(RolloutVariant v) {
  switch (v) {
    case RolloutVariant::kOnPath:
      return "on-path";
    case RolloutVariant::kUpfront:
      return "upfront";
    case RolloutVariant::kAlternating:
      return "alternating";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Exploration functions.

ExplorationFunction ExplorationFunction::uniform() { return {}; }

ExplorationFunction ExplorationFunction::balanced(const DecisionProblem& problem) {
  std::vector<double> count(problem.num_sequences(), 0.0);
  for (std::size_t s = 0; s < problem.num_sequences(); ++s) {
    count[s] = static_cast<double>(problem.child_terminals(static_cast<SequenceId>(s)).size());
  }
  std::map<std::string, std::vector<double>, std::less<>> table;
  for (std::size_t jj = problem.num_decisions(); jj-- > 0;) {
    const DecisionInfo& info = problem.decision(static_cast<DecisionId>(jj));
    std::vector<double> row(info.num_actions());
    for (std::size_t a = 0; a < info.num_actions(); ++a) {
      row[a] = count[info.sequence(a)];
      count[info.parent_sequence] += row[a];
    }
    table.emplace(info.label, std::move(row));
  }
  ExplorationFunction f;
  f.kind_ = Kind::kBalanced;
  f.fn_ = [table = std::move(table)](std::string_view signal, std::size_t action,
                                     std::span<const std::string>) {
    auto it = table.find(signal);
    if (it == table.end()) {
      throw StructuralError("balanced exploration has no entry for '" + std::string(signal) + "'");
    }
    return it->second.at(action);
  };
  return f;
}

ExplorationFunction ExplorationFunction::custom(Fn fn) {
  ExplorationFunction f;
  f.kind_ = Kind::kCustom;
  f.fn_ = std::move(fn);
  return f;
}

double ExplorationFunction::value(std::string_view signal, std::size_t action,
                                  std::span<const std::string> actions) const {
  if (kind_ == Kind::kUniform) return 1.0;
  return fn_(signal, action, actions);
}

std::vector<double> ExplorationFunction::normalized(std::string_view signal,
                                                    std::span<const std::string> actions) const {
  const std::size_t n = actions.size();
  std::vector<double> h(n);
  if (kind_ == Kind::kUniform) {
    std::fill(h.begin(), h.end(), 1.0 / static_cast<double>(n));
    return h;
  }
  double total = 0.0;
  for (std::size_t a = 0; a < n; ++a) {
    h[a] = value(signal, a, actions);
    if (!(h[a] > 0.0) || !std::isfinite(h[a])) {
      throw std::invalid_argument("exploration function must be positive at '" +
                                  std::string(signal) + "'");
    }
    total += h[a];
  }
  for (double& v : h) v /= total;
  return h;
}

ExplorationFunction make_exploration(std::string_view name, const DecisionProblem& problem) {
  if (name == "uniform") return ExplorationFunction::uniform();
  if (name == "balanced") return ExplorationFunction::balanced(problem);
  throw std::invalid_argument("unknown exploration function '" + std::string(name) + "'");
}

std::vector<double> exploration_strategy(const DecisionProblem& problem,
                                         const ExplorationFunction& h) {
  DenseBehavioral<double> b(problem.num_decisions());
  for (std::size_t j = 0; j < problem.num_decisions(); ++j) {
    const DecisionInfo& info = problem.decision(static_cast<DecisionId>(j));
    b[j] = h.normalized(info.label, info.actions);
  }
  return behavioral_to_sequence_form<double>(problem, b);
}

SparseEstimate estimate_gradient(const TrajectoryRecord& record) {
  if (!record.closed) throw std::logic_error("trajectory has no payoff yet");
  if (!(record.gamma > 0.0)) throw std::logic_error("trajectory probability is zero");
  SparseEstimate e;
  e.value = record.payoff / record.gamma;
  if (!record.steps.empty()) {
    e.node = record.steps.back().node;
    e.action = record.steps.back().action;
  }
  return e;
}

// ---------------------------------------------------------------------------
// DiscoveringAgent.

DiscoveringAgent::DiscoveringAgent(RmVariant rm, StreamKey stream)
    : stream_(stream), tree_(rm), act_stream_(stream.derive("act")) {}

void DiscoveringAgent::begin_iteration(std::int64_t t) {
  if (active_) throw std::logic_error("begin_iteration called while an iteration is open");
  if (t < 1) throw std::invalid_argument("iterations are numbered from 1");
  t_ = t;
  active_ = true;
  live_ = root_cursor();
  live_signal_.clear();
  record_ = TrajectoryRecord{};
  on_begin(t);
}

void DiscoveringAgent::observe_signal(std::string_view signal) {
  if (!active_) throw std::logic_error("observe_signal outside an iteration");
  const std::uint64_t key = hash_combine(live_.key, hash_label(signal));
  live_.position = tree_.add_signal(live_.position, signal);
  live_.key = key;
  live_signal_.assign(signal);
  live_.signal = live_signal_;
}

std::size_t DiscoveringAgent::act(std::span<const std::string> actions) {
  if (!active_) throw std::logic_error("act outside an iteration");
  std::int32_t j = tree_.node_at(live_.position);
  if (j < 0) {
    j = tree_.discover(live_.position, live_.signal, actions,
                       exploration_weights(live_.signal, actions), t_);
  } else {
    const DiscoveredNode& known = tree_.node(j);
    if (!std::equal(known.actions.begin(), known.actions.end(), actions.begin(), actions.end())) {
      throw StructuralError("action set at '" + known.label + "' differs from the one seen at discovery");
    }
  }
  const auto x = tree_.recommendation(j);
  const auto h = tree_.explore(j);
  NodeView v{{x.begin(), x.end()}, {h.begin(), h.end()}};
  const std::vector<double> w = sampling_weights(live_, v);
  const std::size_t a =
      sample_index(w, act_stream_.uniform(static_cast<std::uint64_t>(t_), live_.key));
  double total = 0.0;
  for (double wv : w) total += wv;

  record_.steps.push_back(TrajectoryStep{j, static_cast<std::int32_t>(a), v.x[a], v.h[a], w[a] / total});
  tree_.ops().rollout += actions.size();

  live_.reach *= v.x[a];
  live_.explore_reach *= v.h[a];
  live_.key = hash_combine(hash_combine(live_.key, kActionTag), a);
  live_.position = tree_.ensure_next_position(j, a);
  return a;
}

void DiscoveringAgent::end_iteration(double payoff) {
  if (!active_) throw std::logic_error("end_iteration outside an iteration");
  if (!std::isfinite(payoff)) throw std::invalid_argument("non-finite payoff");
  record_.payoff = payoff;
  record_.gamma = trajectory_probability(record_);
  record_.closed = true;
  if (!(record_.gamma > 0.0)) throw std::logic_error("trajectory probability is zero");

  // Average phase first, while the recommendations of iteration t are in place.
  tree_.update_average();

  const std::size_t m = record_.steps.size();
  std::vector<double> xs(m);
  for (std::size_t i = 0; i < m; ++i) xs[i] = record_.steps[i].x;
  const std::vector<double> up = path_gradients<double>(payoff, record_.gamma, xs);
  last_gradients_.clear();
  for (std::size_t i = m; i-- > 0;) {
    const TrajectoryStep& s = record_.steps[i];
    LocalGradient g{s.node, std::vector<double>(tree_.node(s.node).num_actions(), 0.0)};
    g.gradient[s.action] = up[i];
    tree_.observe(s.node, g.gradient);
    last_gradients_.push_back(std::move(g));
  }
  active_ = false;
}

DiscoveringAgent::NodeView DiscoveringAgent::view(const PlayerCursor& c,
                                                  std::span<const std::string> actions) const {
  const std::int32_t j = c.position >= 0 ? tree_.node_at(c.position) : -1;
  if (j >= 0) {
    const auto x = tree_.recommendation(j);
    const auto h = tree_.explore(j);
    return {{x.begin(), x.end()}, {h.begin(), h.end()}};
  }
  const std::size_t n = actions.size();
  return {std::vector<double>(n, 1.0 / static_cast<double>(n)),
          exploration_weights(c.signal, actions)};
}

PlayerCursor DiscoveringAgent::after_signal(const PlayerCursor& c, std::string_view signal) const {
  PlayerCursor next = c;
  next.key = hash_combine(c.key, hash_label(signal));
  next.position = c.position >= 0 ? tree_.find_signal(c.position, signal) : -1;
  next.signal = signal;
  return next;
}

PlayerCursor DiscoveringAgent::after_action(const PlayerCursor& c, std::size_t action,
                                            std::span<const std::string> actions) const {
  const NodeView v = view(c, actions);
  PlayerCursor next = c;
  next.reach *= v.x.at(action);
  next.explore_reach *= v.h.at(action);
  next.key = hash_combine(hash_combine(c.key, kActionTag), action);
  const std::int32_t j = c.position >= 0 ? tree_.node_at(c.position) : -1;
  next.position = j >= 0 ? tree_.next_position(j, action) : -1;
  return next;
}

std::size_t DiscoveringAgent::committed_action(const PlayerCursor& c,
                                               std::span<const std::string> actions) const {
  const NodeView v = view(c, actions);
  std::vector<double> w = sampling_weights(c, v);
  double total = 0.0;
  for (double x : w) total += x;
  // Off the sampled support (possible only for read-only cursors) fall back
  // to the recommendation so that a full pure strategy is still defined.
  if (!(total > 0.0)) w = v.x;
  return sample_index(w, act_stream_.uniform(static_cast<std::uint64_t>(t_), c.key));
}

std::vector<double> DiscoveringAgent::mixed_distribution(
    const PlayerCursor& c, std::span<const std::string> actions) const {
  return conditional(c, view(c, actions));
}

// ---------------------------------------------------------------------------
// BanditAgent.

BanditAgent::BanditAgent(AgentConfig config, StreamKey stream)
    : DiscoveringAgent(config.rm, stream), config_(std::move(config)) {}

void BanditAgent::on_begin(std::int64_t t) {
  beta_ = config_.schedule.beta(t);
  if (!(beta_ >= 0.0 && beta_ <= 1.0)) throw std::invalid_argument("beta outside [0, 1]");
  current_ = config_.variant;
  if (current_ == RolloutVariant::kAlternating) {
    current_ = t % 2 == 1 ? RolloutVariant::kOnPath : RolloutVariant::kUpfront;
  }
  explore_ = current_ == RolloutVariant::kUpfront &&
             stream_.derive("coin").uniform(static_cast<std::uint64_t>(t), 0) < beta_;
  record_.beta = beta_;
  record_.variant = current_;
  record_.explore = explore_;
}

std::vector<double> BanditAgent::sampling_weights(const PlayerCursor& c, const NodeView& v) const {
  if (current_ == RolloutVariant::kUpfront) return explore_ ? v.h : v.x;
  return on_path_weights<double>(beta_, c.reach, c.explore_reach, v.x, v.h);
}

std::vector<double> BanditAgent::conditional(const PlayerCursor& c, const NodeView& v) const {
  return normalize_or(on_path_weights<double>(beta_, c.reach, c.explore_reach, v.x, v.h), v.x);
}

std::vector<double> BanditAgent::exploration_weights(std::string_view signal,
                                                     std::span<const std::string> actions) const {
  return config_.exploration.normalized(signal, actions);
}

double BanditAgent::trajectory_probability(const TrajectoryRecord& r) const {
  std::vector<double> xs(r.steps.size());
  std::vector<double> hs(r.steps.size());
  for (std::size_t i = 0; i < r.steps.size(); ++i) {
    xs[i] = r.steps[i].x;
    hs[i] = r.steps[i].h;
  }
  return trajectory_gamma<double>(r.beta, xs, hs);
}

}  // namespace ibandit
