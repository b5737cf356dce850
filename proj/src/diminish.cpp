#include "lambdarep/diminish.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lambdarep/error.hpp"

namespace lambdarep {

const char* scheme_name(RewardScheme scheme) {
  switch (scheme) {
    case RewardScheme::kPureDiminish: return "pure_diminish";
    case RewardScheme::kTimeElapsed: return "time_elapsed";
    case RewardScheme::kEligibilityTrace: return "eligibility_trace";
    case RewardScheme::kTotalTime: return "total_time";
  }
  return "?";
}

RewardScheme parse_scheme(const std::string& name) {
  if (name == "pure_diminish") return RewardScheme::kPureDiminish;
  if (name == "time_elapsed") return RewardScheme::kTimeElapsed;
  if (name == "eligibility_trace") return RewardScheme::kEligibilityTrace;
  if (name == "total_time") return RewardScheme::kTotalTime;
  throw ConfigError("unknown reward scheme '" + name + "'");
}

RewardSpec RewardSpec::pure(Vector r_bar, Vector lambda) {
  RewardSpec spec;
  spec.r_bar = std::move(r_bar);
  spec.lambda = std::move(lambda);
  return spec;
}

void RewardSpec::validate(int n_states) const {
  if (r_bar.size() != n_states || lambda.size() != n_states) {
    throw StructuralError("reward spec vectors must have one entry per state");
  }
  if (!r_bar.allFinite()) throw NumericError("r_bar must be finite");
  if (lambda.size() > 0 && (lambda.minCoeff() < 0.0 || lambda.maxCoeff() > 1.0)) {
    throw ConfigError("lambda entries must lie in [0, 1]");
  }
  if (scheme == RewardScheme::kTimeElapsed && !(rate_scale > 0.0)) {
    throw ConfigError("rate_scale must be positive");
  }
  if (scheme == RewardScheme::kEligibilityTrace || scheme == RewardScheme::kTotalTime) {
    if (!(lambda_d >= 0.0 && lambda_d <= 1.0 && lambda_r >= 0.0 && lambda_r <= 1.0)) {
      throw ConfigError("lambda_d and lambda_r must lie in [0, 1]");
    }
  }
  for (int g : goals) {
    if (g < 0 || g >= n_states) throw StructuralError("goal index out of range");
  }
}

std::vector<int> RewardSpec::goal_states() const {
  if (!goals.empty()) return goals;
  std::vector<int> out;
  for (Eigen::Index s = 0; s < r_bar.size(); ++s) {
    if (r_bar[s] != 0.0) out.push_back(static_cast<int>(s));
  }
  return out;
}

double RewardSpec::effective_cap() const {
  if (cap > 0.0) return cap;
  double m = r_bar.size() > 0 ? r_bar.cwiseAbs().maxCoeff() : 0.0;
  return m > 0.0 ? 10.0 * m : 1.0;
}

bool RewardSpec::threshold_termination_active() const {
  if (scheme != RewardScheme::kPureDiminish) return false;
  for (int g : goal_states()) {
    if (lambda[g] < 1.0) return true;
  }
  return false;
}

EpisodeState start_episode(const RewardSpec& spec, int start_state) {
  const auto n = static_cast<int>(spec.r_bar.size());
  if (start_state < 0 || start_state >= n) throw StructuralError("start state out of range");
  EpisodeState ep;
  ep.current = start_state;
  ep.visit_counts.assign(n, 0);
  ep.last_visit_time.assign(n, -1);
  ep.trace = Vector::Zero(n);
  ep.reward_vector = current_reward_vector(spec, ep);
  return ep;
}

double reward_at(const RewardSpec& spec, int state, const EpisodeState& episode) {
  const double base = spec.r_bar[state];
  const int n = episode.visit_counts[state];
  switch (spec.scheme) {
    case RewardScheme::kPureDiminish:
      return std::pow(spec.lambda[state], n) * base;  // pow(0, 0) == 1
    case RewardScheme::kTimeElapsed: {
      if (n == 0) return base;
      const int elapsed = episode.t - episode.last_visit_time[state];
      return std::pow(spec.lambda[state], n / (spec.rate_scale * elapsed)) * base;
    }
    case RewardScheme::kEligibilityTrace:
      return (1.0 - (1.0 - spec.lambda_d) * episode.trace[state]) * base;
    case RewardScheme::kTotalTime: {
      const double cap = spec.effective_cap();
      double v = std::pow(spec.lambda_d, n) * std::pow(spec.lambda_r, n - episode.t) * base;
      if (std::isnan(v)) v = 0.0;
      return std::clamp(v, -cap, cap);
    }
  }
  return 0.0;
}

Vector current_reward_vector(const RewardSpec& spec, const EpisodeState& episode) {
  Vector r(spec.r_bar.size());
  for (Eigen::Index s = 0; s < r.size(); ++s) r[s] = reward_at(spec, static_cast<int>(s), episode);
  return r;
}

StepResult advance(const TabularMDP& mdp, const RewardSpec& spec, EpisodeState& episode, int action,
                   Rng& rng, int horizon) {
  if (episode.terminated) throw StateError("step called on a terminated episode");
  if (action < 0 || action >= mdp.n_actions()) {
    throw StateError("invalid action " + std::to_string(action) + " at step " + std::to_string(episode.t));
  }
  const int s = episode.current;
  StepResult result;
  result.state_reward = reward_at(spec, s, episode);

  auto outcomes = mdp.outcomes(s, action);
  std::vector<double> probs;
  probs.reserve(outcomes.size());
  for (const auto& o : outcomes) probs.push_back(o.prob);
  const Outcome& chosen = outcomes[rng.categorical(probs)];
  result.bumped = chosen.bumped;
  result.reward = result.state_reward + (chosen.bumped ? spec.wall_penalty : 0.0);

  episode.cumulative_return += result.reward;
  episode.discounted_return += std::pow(mdp.gamma(), episode.t) * result.reward;
  episode.visit_counts[s] += 1;
  episode.last_visit_time[s] = episode.t;
  if (spec.scheme == RewardScheme::kEligibilityTrace) {
    episode.trace[s] += 1.0;
    episode.trace *= spec.lambda_r;
  }
  episode.t += 1;
  episode.current = chosen.next;
  episode.reward_vector = current_reward_vector(spec, episode);

  bool depleted = false;
  if (spec.threshold_termination_active()) {
    double best = -std::numeric_limits<double>::infinity();
    for (int g : spec.goal_states()) best = std::max(best, episode.reward_vector[g]);
    depleted = best < spec.termination_threshold;
  }
  episode.terminated = depleted || episode.t >= horizon;
  result.terminated = episode.terminated;
  return result;
}

StepOutput step(const TabularMDP& mdp, const RewardSpec& spec, const EpisodeState& episode, int action,
                Rng& rng, int horizon) {
  StepOutput out{episode, {}};
  out.result = advance(mdp, spec, out.next, action, rng, horizon);
  return out;
}

EpisodeTrace run_episode(const TabularMDP& mdp, const RewardSpec& spec, const Agent& agent,
                         const EpisodeOptions& options) {
  if (options.horizon <= 0) throw ConfigError("horizon must be positive");
  spec.validate(mdp.n_states());
  Rng rng(options.seed);
  int start = options.start_state.has_value()
                  ? *options.start_state
                  : rng.categorical(std::span<const double>(mdp.start_distribution().data(),
                                                            mdp.start_distribution().size()));
  EpisodeState ep = start_episode(spec, start);
  const auto goals = spec.goal_states();

  EpisodeTrace trace;
  while (!ep.terminated) {
    TraceRecord rec;
    rec.t = ep.t;
    rec.state = ep.current;
    rec.action = agent(ep);
    if (rec.action < 0 || rec.action >= mdp.n_actions()) {
      throw StateError("agent returned invalid action " + std::to_string(rec.action) + " at step " +
                       std::to_string(ep.t));
    }
    if (options.snapshot_goal_rewards) {
      for (int g : goals) rec.goal_rewards.push_back(ep.reward_vector[g]);
    }
    StepResult r = advance(mdp, spec, ep, rec.action, rng, options.horizon);
    rec.reward = r.reward;
    rec.state_reward = r.state_reward;
    rec.bumped = r.bumped;
    trace.records.push_back(std::move(rec));
    if (r.terminated && ep.t < options.horizon) trace.terminated_by_threshold = true;
  }
  trace.final_state = ep.current;
  trace.undiscounted_return = ep.cumulative_return;
  trace.discounted_return = ep.discounted_return;
  return trace;
}

double discounted_segment_return(const EpisodeTrace& trace, double gamma, std::size_t from,
                                 std::size_t count) {
  double total = 0.0;
  double w = 1.0;
  for (std::size_t k = 0; k < count && from + k < trace.records.size(); ++k) {
    total += w * trace.records[from + k].reward;
    w *= gamma;
  }
  return total;
}

}  // namespace lambdarep
