#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "lambdarep/compose.hpp"
#include "lambdarep/diminish.hpp"
#include "lambdarep/env.hpp"

namespace lambdarep {

/// One stay at a rewarded state. Times are trace indices; leave times are the
/// first index outside the patch, so enter_t < leave_t.
struct PatchRecord {
  int state = 0;
  int enter_t = 0;
  int leave_t = 0;           // when the agent actually left (or the trace ended)
  int mvt_leave_t = 0;       // undiscounted rule, censored at leave_t
  int discounted_mvt_leave_t = 0;
};

struct PatchReport {
  std::vector<PatchRecord> patches;
  double R = 0.0;
  double T = 0.0;
};

struct MvtParams {
  double R = 0.0;           // mean undiscounted episode reward of the agent
  double R_discounted = 0.0;
  double T = 1.0;           // episode length
  double gamma = 0.99;      // discount of the discounted rule
};

/// Leave rule: at in-patch step t leave once lambda r(s_t) < (R - R_t) / T, with
/// R_t the reward received before t plus r(s_t). The discounted rule weights
/// R_t by gamma^u, uses R_discounted and weights the incoming reward by gamma^{t+1}.
PatchReport mvt_leave_times(const EpisodeTrace& trace, const RewardSpec& spec, const MvtParams& params);

/// Single-rule firing time for one patch; exposed for property tests.
int mvt_rule_leave(const EpisodeTrace& trace, const RewardSpec& spec, const PatchRecord& patch, double R, double T,
                   bool discounted, double gamma);

struct LeaveSummary {
  std::string environment;
  int patches = 0;
  double mean_diff_discounted = 0.0;
  double se_diff_discounted = 0.0;
  double mean_diff_undiscounted = 0.0;
  double se_diff_undiscounted = 0.0;
};

struct LeaveDiffRow {
  std::string environment;
  int seed = 0;
  int patch_idx = 0;
  int leave_diff_discounted = 0;
  int leave_diff_undiscounted = 0;
};

/// Signed agent-minus-rule leave-time differences over traces grouped by seed.
/// `traces_by_seed` needs at least three seeds.
LeaveSummary agent_vs_mvt(const std::string& environment, const std::vector<std::vector<EpisodeTrace>>& traces_by_seed,
                          const RewardSpec& spec, const MvtParams& params, std::vector<LeaveDiffRow>* rows = nullptr);

/// Mean undiscounted and discounted return over a calibration batch.
MvtParams calibrate_mvt(const std::vector<EpisodeTrace>& traces, double gamma);

/// Agent that follows the leave rule: stays on a rewarded state until the rule fires, then heads
/// for the nearest other rewarded state along nominal moves. The agent keeps per-episode memory,
/// so use one instance per concurrently running episode.
Agent mvt_rule_agent(const TabularMDP& mdp, const RewardSpec& spec, const MvtParams& params, bool discounted);

/// Self-transition reward pairs (r_t, r_{t+1}) at rewarded states.
std::vector<std::pair<double, double>> self_transition_pairs(const EpisodeTrace& trace, const RewardSpec& spec);

struct ForageOptions {
  int episodes = 60;
  int horizon = 40;
  std::uint64_t seed = 0;
  bool learn_lambda = false;
  double lambda_hat = 1.0;  // fixed decay, or the starting value when learning
  double eta = 0.5;         // estimator step
  SolveOptions solve{};
};

struct ForageResult {
  std::vector<double> lambda_hat;  // decay used in each episode
  double final_lambda_hat = 0.0;   // after the last update
  std::vector<double> returns;
  std::vector<double> discounted_returns;
  std::vector<EpisodeTrace> traces;
};

/// Runs a GPE+GPI agent over `policies` episode by episode. With learn_lambda the agent
/// refits its decay after every episode from the self-transition reward pairs it saw and
/// rebuilds its policy set when the estimate moves. Episode i is seeded with mix_seed(seed, i).
ForageResult run_forage(const TabularMDP& mdp, const RewardSpec& spec,
                        const std::vector<std::pair<std::string, Policy>>& policies, const ForageOptions& options);

}  // namespace lambdarep
