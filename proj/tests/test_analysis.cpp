#include <gtest/gtest.h>

#include "lambdarep/analysis.hpp"
#include "lambdarep/error.hpp"
#include "support.hpp"

using namespace lambdarep;

namespace {

RewardSpec patch_spec() {
  Vector r(2);
  r << 8.0, 0.0;
  Vector lam(2);
  lam << 0.5, 1.0;
  return RewardSpec::pure(r, lam);
}

// Four steps on the patch (8, 4, 2, 1), then two steps elsewhere.
EpisodeTrace patch_trace() {
  EpisodeTrace tr;
  const int states[] = {0, 0, 0, 0, 1, 1};
  const double rewards[] = {8, 4, 2, 1, 0, 0};
  for (int t = 0; t < 6; ++t) {
    TraceRecord rec;
    rec.t = t;
    rec.state = states[t];
    rec.reward = rewards[t];
    rec.state_reward = rewards[t];
    tr.records.push_back(rec);
  }
  tr.undiscounted_return = 15.0;
  return tr;
}

}  // namespace

TEST(Mvt, FindsPatchAndActualLeaveTime) {
  MvtParams p;
  p.R = 20.0;
  p.R_discounted = 20.0;
  p.T = 10.0;
  const PatchReport rep = mvt_leave_times(patch_trace(), patch_spec(), p);
  ASSERT_EQ(rep.patches.size(), 1u);
  EXPECT_EQ(rep.patches[0].enter_t, 0);
  EXPECT_EQ(rep.patches[0].leave_t, 4);
  // Incoming 0.5 never drops strictly below (20 - 15) / 10, so the rule is censored.
  EXPECT_EQ(rep.patches[0].mvt_leave_t, 4);
}

TEST(Mvt, RuleFiresWhenIncomingFallsBelowAverageRate) {
  const EpisodeTrace tr = patch_trace();
  const RewardSpec spec = patch_spec();
  PatchRecord patch{0, 0, 4, 0, 0};
  // t = 0: incoming 4 < (40 - 8) / 4 = 8.
  EXPECT_EQ(mvt_rule_leave(tr, spec, patch, 40.0, 4.0, false, 1.0), 1);
  // t = 1: incoming 2 < (22 - 12) / 4 = 2.5, after 4 >= (22 - 8) / 4 at t = 0.
  EXPECT_EQ(mvt_rule_leave(tr, spec, patch, 22.0, 4.0, false, 1.0), 2);
  EXPECT_THROW(mvt_rule_leave(tr, spec, patch, 22.0, 0.0, false, 1.0), ConfigError);
}

TEST(Mvt, CalibrationAveragesEpisodes) {
  const MvtParams p = calibrate_mvt({patch_trace(), patch_trace()}, 0.5);
  EXPECT_DOUBLE_EQ(p.R, 15.0);
  EXPECT_DOUBLE_EQ(p.T, 6.0);
  EXPECT_DOUBLE_EQ(p.R_discounted, 8 + 0.5 * 4 + 0.25 * 2 + 0.125 * 1);
  EXPECT_THROW(calibrate_mvt({}, 0.5), ConfigError);
}

TEST(Mvt, NeedsThreeSeeds) {
  MvtParams p;
  p.R = 10.0;
  EXPECT_THROW(agent_vs_mvt("x", {{patch_trace()}, {patch_trace()}}, patch_spec(), p), ConfigError);
  std::vector<LeaveDiffRow> rows;
  const LeaveSummary s = agent_vs_mvt("x", {{patch_trace()}, {patch_trace()}, {patch_trace()}}, patch_spec(), p, &rows);
  EXPECT_EQ(s.patches, 3);
  EXPECT_EQ(rows.size(), 3u);
  EXPECT_DOUBLE_EQ(s.se_diff_undiscounted, 0.0);
}

TEST(SelfTransitions, PairsConsecutiveRewards) {
  const auto pairs = self_transition_pairs(patch_trace(), patch_spec());
  ASSERT_EQ(pairs.size(), 3u);
  EXPECT_EQ(pairs[0], std::make_pair(8.0, 4.0));
  EXPECT_EQ(pairs[2], std::make_pair(2.0, 1.0));
}

TEST(Forage, LearnsDecayOnSmallGrid) {
  GridSpec g = lambdarep::testing::grid_from_rows({"G...G"});
  g.goal_annotations[0] = {5.0, 0.7};
  g.goal_annotations[4] = {5.0, 0.7};
  g.wall_penalty = 0.0;
  const GridWorld w = build_mdp_from_grid(g, 0.95);
  const RewardSpec spec = RewardSpec::pure(w.r_bar, w.lambda);
  std::vector<std::pair<std::string, Policy>> pols{{"to_0", shortest_path_policy(w.mdp, 0)},
                                                   {"to_4", shortest_path_policy(w.mdp, 4)}};
  ForageOptions o;
  o.episodes = 20;
  o.learn_lambda = true;
  o.seed = 4;
  const ForageResult res = run_forage(w.mdp, spec, pols, o);
  EXPECT_NEAR(res.final_lambda_hat, 0.7, 1e-3);
  EXPECT_EQ(res.lambda_hat.front(), 1.0);
  EXPECT_EQ(res.returns.size(), 20u);
  o.learn_lambda = false;
  o.lambda_hat = 0.3;
  EXPECT_EQ(run_forage(w.mdp, spec, pols, o).final_lambda_hat, 0.3);
}
