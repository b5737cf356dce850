#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lambdarep/env.hpp"
#include "lambdarep/linalg.hpp"
#include "lambdarep/rng.hpp"

namespace lambdarep {

enum class RewardScheme { kPureDiminish, kTimeElapsed, kEligibilityTrace, kTotalTime };

const char* scheme_name(RewardScheme scheme);
RewardScheme parse_scheme(const std::string& name);

/// Reward model of an episode: initial rewards r_bar(s), per-state decay
/// lambda(s) and the replenishment variant.
struct RewardSpec {
  Vector r_bar;
  Vector lambda;
  RewardScheme scheme = RewardScheme::kPureDiminish;
  double rate_scale = 0.1;  // time_elapsed
  double lambda_d = 0.5;    // eligibility_trace / total_time
  double lambda_r = 0.5;
  double cap = 0.0;  // total_time clamp; <= 0 means 10 * max |r_bar|
  double wall_penalty = 0.0;
  double termination_threshold = 0.1;
  std::vector<int> goals;  // empty: every state with r_bar != 0

  static RewardSpec pure(Vector r_bar, Vector lambda);

  void validate(int n_states) const;
  std::vector<int> goal_states() const;
  double effective_cap() const;
  /// Threshold termination applies only to the pure scheme with some goal lambda < 1.
  bool threshold_termination_active() const;
};

/// Mutable state of one episode. Visit counts exclude the state currently
/// occupied until its reward has been emitted.
struct EpisodeState {
  int t = 0;
  int current = 0;
  bool terminated = false;
  std::vector<int> visit_counts;
  std::vector<int> last_visit_time;  // -1 if never visited
  Vector trace;                      // sum_{j<t} lambda_r^{t-j} 1(s_j = s)
  Vector reward_vector;              // reward each state would pay if occupied now
  double cumulative_return = 0.0;
  double discounted_return = 0.0;
};

EpisodeState start_episode(const RewardSpec& spec, int start_state);

/// Reward paid for occupying `state` at the episode's current time.
double reward_at(const RewardSpec& spec, int state, const EpisodeState& episode);

/// reward_at for every state.
Vector current_reward_vector(const RewardSpec& spec, const EpisodeState& episode);

struct StepResult {
  double reward = 0.0;        // state reward plus any wall penalty
  double state_reward = 0.0;  // diminishing part only
  bool bumped = false;
  bool terminated = false;
};

/// In-place step: pays the reward for the occupied state, counts the visit,
/// samples the successor and applies termination (threshold or t >= horizon).
StepResult advance(const TabularMDP& mdp, const RewardSpec& spec, EpisodeState& episode, int action,
                   Rng& rng, int horizon);

struct StepOutput {
  EpisodeState next;
  StepResult result;
};

/// Value-returning form of `advance`.
StepOutput step(const TabularMDP& mdp, const RewardSpec& spec, const EpisodeState& episode, int action,
                Rng& rng, int horizon);

struct TraceRecord {
  int t = 0;
  int state = 0;
  int action = 0;
  double reward = 0.0;
  double state_reward = 0.0;
  bool bumped = false;
  std::vector<double> goal_rewards;  // optional snapshot of goal rewards before this step
};

struct EpisodeTrace {
  std::vector<TraceRecord> records;
  int final_state = 0;
  bool terminated_by_threshold = false;
  double undiscounted_return = 0.0;
  double discounted_return = 0.0;

  std::size_t size() const { return records.size(); }
};

/// Maps the episode state (position, current reward vector, running totals) to an action.
using Agent = std::function<int(const EpisodeState&)>;

struct EpisodeOptions {
  int horizon = 100;
  std::uint64_t seed = 0;
  std::optional<int> start_state;  // otherwise drawn from the MDP's start distribution
  bool snapshot_goal_rewards = false;
};

EpisodeTrace run_episode(const TabularMDP& mdp, const RewardSpec& spec, const Agent& agent,
                         const EpisodeOptions& options);

/// sum_{k<count} gamma^k r_{from+k} over a trace.
double discounted_segment_return(const EpisodeTrace& trace, double gamma, std::size_t from,
                                 std::size_t count);

}  // namespace lambdarep
