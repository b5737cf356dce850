#include <gtest/gtest.h>

#include "lambdarep/compose.hpp"
#include "lambdarep/error.hpp"
#include "lambdarep/oracle.hpp"
#include "support.hpp"

using namespace lambdarep;
using lambdarep::testing::grid_from_rows;

namespace {

struct Toy {
  GridWorld world;
  std::vector<std::pair<std::string, Policy>> library;
};

// Middle start between a one-shot goal worth 10 and a lasting goal worth 6.
Toy toy() {
  GridSpec g = grid_from_rows({"G.G"});
  g.goal_annotations[0] = {10.0, 0.0};
  g.goal_annotations[2] = {6.0, 1.0};
  g.wall_penalty = 0.0;
  Toy t{build_mdp_from_grid(g, 0.99), {}};
  const std::vector<int> left{kStay, kLeft, kStay};
  const std::vector<int> right{kStay, kRight, kStay};
  t.library.emplace_back("left", Policy::deterministic(left, kNumGridActions));
  t.library.emplace_back("right", Policy::deterministic(right, kNumGridActions));
  return t;
}

SolveOptions tight() {
  SolveOptions o;
  o.tol = 1e-10;
  return o;
}

}  // namespace

TEST(Gpi, CorrectDecayPrefersLastingGoal) {
  const Toy t = toy();
  const PolicySet truth = PolicySet::build(t.world.mdp, t.library, t.world.lambda, tight());
  EXPECT_EQ(gpi_action(truth, 1, t.world.r_bar), kRight);
  const PolicySet naive = PolicySet::build(t.world.mdp, t.library, uniform_lambda(3, 1.0), tight());
  const GpiChoice c = gpi_choice(naive, 1, t.world.r_bar);
  EXPECT_EQ(c.action, kLeft);
  EXPECT_EQ(c.policy, 0);
}

TEST(Gpi, GpeIsRewardTimesRepresentation) {
  const Toy t = toy();
  const PolicySet set = PolicySet::build(t.world.mdp, t.library, t.world.lambda, tight());
  const Vector q = gpe(set, 1, kRight, t.world.r_bar);
  ASSERT_EQ(q.size(), 2);
  EXPECT_NEAR(q[1], set[1].rep.row(1, kRight).dot(t.world.r_bar), 1e-12);
  const Matrix table = gpe_table(set, 1, t.world.r_bar);
  EXPECT_EQ(table.rows(), 2);
  EXPECT_EQ(table.cols(), kNumGridActions);
  EXPECT_DOUBLE_EQ(table(1, kRight), q[1]);
}

TEST(Gpi, TiesGoToLowestActionThenPolicy) {
  const Toy t = toy();
  const PolicySet set = PolicySet::build(t.world.mdp, t.library, t.world.lambda, tight());
  const GpiChoice c = gpi_choice(set, 1, Vector::Zero(3));
  EXPECT_EQ(c.action, 0);
  EXPECT_EQ(c.policy, 0);
  PolicySet empty(3, kNumGridActions, 0.99);
  EXPECT_THROW(gpi_choice(empty, 0, Vector::Zero(3)), StructuralError);
}

TEST(Gpi, RunIsSeedDeterministic) {
  const Toy t = toy();
  const PolicySet set = PolicySet::build(t.world.mdp, t.library, t.world.lambda, tight());
  const RewardSpec spec = RewardSpec::pure(t.world.r_bar, t.world.lambda);
  GpiRunOptions o;
  o.episodes = 5;
  o.horizon = 10;
  o.seed = 3;
  const GpiRunResult a = run_gpe_gpi(t.world.mdp, spec, set, o);
  const GpiRunResult b = run_gpe_gpi(t.world.mdp, spec, set, o);
  EXPECT_EQ(a.undiscounted, b.undiscounted);
  EXPECT_EQ(a.undiscounted.size(), 5u);
}

TEST(MeanAndSe, FrozenValues) {
  const ReturnStats s = mean_and_se({1.0, 2.0, 3.0, 4.0});
  EXPECT_DOUBLE_EQ(s.mean, 2.5);
  // sample sd = sqrt(5/3), se = sd / 2
  EXPECT_NEAR(s.se, std::sqrt(5.0 / 3.0) / 2.0, 1e-15);
  EXPECT_EQ(mean_and_se({}).mean, 0.0);
}

TEST(ShortestPath, ReachesTargetInGrid) {
  GridSpec g = grid_from_rows({"....", ".##.", "...."});
  const GridWorld w = build_mdp_from_grid(g, 0.95);
  const int target = w.state_at(2, 3);
  const Policy pi = shortest_path_policy(w.mdp, target);
  const auto acts = pi.deterministic_actions();
  ASSERT_TRUE(acts.has_value());
  const auto next = nominal_successor(w.mdp);
  for (int s = 0; s < w.mdp.n_states(); ++s) {
    int cur = s;
    for (int k = 0; k < 10 && cur != target; ++k) cur = next[w.mdp.row(cur, (*acts)[cur])];
    EXPECT_EQ(cur, target) << "from state " << s;
  }
  EXPECT_EQ((*acts)[target], kStay);
}

TEST(TransferBound, HoldsOnRandomMdps) {
  Rng rng(31);
  for (int trial = 0; trial < 30; ++trial) {
    const TabularMDP mdp = random_mdp(5, 3, 0.9, rng);
    std::vector<Policy> pols;
    for (int j = 0; j < 3; ++j) {
      Vector src(5);
      for (int s = 0; s < 5; ++s) src[s] = rng.uniform();
      pols.push_back(optimal_policy(mdp, src));
    }
    Vector r(5);
    for (int s = 0; s < 5; ++s) r[s] = rng.uniform();
    const double lam = rng.below(4) / 3.0;
    const double lam_hat = rng.below(4) / 3.0;
    BoundCheckOptions o;
    o.solve.tol = 1e-8;
    const BoundReport rep = gpi_bound_check(mdp, r, pols, lam, lam_hat, o);
    EXPECT_EQ(rep.violations, 0) << "trial " << trial;
    EXPECT_EQ(rep.rows.size(), 15u);
    EXPECT_GE(rep.min_slack, 0.0);
  }
}
