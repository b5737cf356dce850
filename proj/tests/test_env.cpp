#include <gtest/gtest.h>

#include "lambdarep/env.hpp"
#include "lambdarep/error.hpp"
#include "support.hpp"

using namespace lambdarep;
using lambdarep::testing::grid_from_rows;

namespace {

GridSpec corridor() {
  GridSpec g = grid_from_rows({"G.G"});
  g.goal_annotations[0] = {10.0, 0.0};
  g.goal_annotations[2] = {6.0, 1.0};
  return g;
}

}  // namespace

TEST(GridWorld, CompilesStatesAndGoals) {
  const GridWorld w = build_mdp_from_grid(corridor(), 0.9);
  EXPECT_EQ(w.mdp.n_states(), 3);
  EXPECT_EQ(w.mdp.n_actions(), kNumGridActions);
  EXPECT_EQ(w.goal_states, (std::vector<int>{0, 2}));
  EXPECT_DOUBLE_EQ(w.r_bar[0], 10.0);
  EXPECT_DOUBLE_EQ(w.lambda[2], 1.0);
  EXPECT_DOUBLE_EQ(w.lambda[1], 1.0);
  EXPECT_TRUE(w.mdp.is_deterministic());
}

TEST(GridWorld, WallsAreNotStates) {
  GridSpec g = grid_from_rows({"..", "#."});
  const GridWorld w = build_mdp_from_grid(g, 0.9);
  EXPECT_EQ(w.mdp.n_states(), 3);
  EXPECT_EQ(w.cell_to_state[2], -1);
  EXPECT_THROW(w.state_at(1, 0), StructuralError);
  const int s = w.state_at(1, 1);
  EXPECT_EQ(w.coords(s), std::make_pair(1, 1));
  // Moving left from (1,1) hits the wall and stays put.
  const auto out = w.mdp.outcomes(s, kLeft);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].next, s);
  EXPECT_TRUE(out[0].bumped);
}

TEST(GridWorld, RowsAreDistributions) {
  GridSpec g = grid_from_rows({"...", ".#.", "..."});
  g.noise_prob = 0.2;
  const GridWorld w = build_mdp_from_grid(g, 0.95);
  const Matrix& T = w.mdp.transitions();
  for (Eigen::Index r = 0; r < T.rows(); ++r) {
    EXPECT_NEAR(T.row(r).sum(), 1.0, 1e-12);
    EXPECT_GE(T.row(r).minCoeff(), 0.0);
  }
  EXPECT_FALSE(w.mdp.is_deterministic());
  // Staying keeps 0.8 of the mass in place, plus noise that bumps into edges.
  const int corner = w.state_at(0, 0);
  EXPECT_NEAR(w.mdp.p(corner, kStay, corner), 0.8 + 0.1, 1e-12);
}

TEST(GridWorld, ExplicitStartCells) {
  const std::vector<int> start{1};
  const GridWorld w = build_mdp_from_grid(corridor(), 0.9, start);
  EXPECT_DOUBLE_EQ(w.mdp.start_distribution()[1], 1.0);
  EXPECT_DOUBLE_EQ(w.mdp.start_distribution().sum(), 1.0);
}

TEST(GridSpecValidation, RejectsBadInput) {
  GridSpec g = grid_from_rows({"G.x"});
  EXPECT_THROW(g.validate(), ConfigError);
  g = grid_from_rows({"G.."});
  EXPECT_THROW(g.validate(), ConfigError);  // goal without annotation
  g = grid_from_rows({"###"});
  EXPECT_THROW(g.validate(), ConfigError);
  g = corridor();
  g.goal_annotations[0].lambda = 1.5;
  EXPECT_THROW(g.validate(), ConfigError);
}

TEST(TabularMDP, RejectsNonStochasticRows) {
  Matrix P = Matrix::Identity(2, 2);
  P(0, 0) = 0.5;
  EXPECT_THROW(TabularMDP(P, 1, 0.9, Vector::Constant(2, 0.5)), Error);
  EXPECT_THROW(TabularMDP(Matrix::Identity(2, 2), 1, 1.0, Vector::Constant(2, 0.5)), Error);
}

TEST(Policy, UniformAndDeterministic) {
  const Policy u = Policy::uniform(3, 4);
  EXPECT_DOUBLE_EQ(u(2, 3), 0.25);
  EXPECT_FALSE(u.deterministic_actions().has_value());
  const std::vector<int> acts{1, 0, 2};
  const Policy d = Policy::deterministic(acts, 3);
  ASSERT_TRUE(d.deterministic_actions().has_value());
  EXPECT_EQ(*d.deterministic_actions(), acts);
}

TEST(Policy, GreedyTiesGoToLowestAction) {
  Matrix q(2, 3);
  q << 1, 1, 0,
       0, 2, 2;
  const auto acts = greedy_policy(q).deterministic_actions();
  ASSERT_TRUE(acts.has_value());
  EXPECT_EQ((*acts)[0], 0);
  EXPECT_EQ((*acts)[1], 1);
}

TEST(PolicyTransition, AveragesOverActions) {
  const GridWorld w = build_mdp_from_grid(corridor(), 0.9);
  const Matrix P = policy_transition_matrix(w.mdp, Policy::uniform(3, kNumGridActions));
  // From the middle: up/down bump (stay), right, left, stay.
  EXPECT_NEAR(P(1, 1), 3.0 / 5.0, 1e-12);
  EXPECT_NEAR(P(1, 0), 1.0 / 5.0, 1e-12);
  EXPECT_NEAR(P(1, 2), 1.0 / 5.0, 1e-12);
}

TEST(RandomMdp, SupportRestriction) {
  Rng rng(3);
  const TabularMDP m = random_mdp(6, 2, 0.9, rng, 2);
  for (Eigen::Index r = 0; r < m.transitions().rows(); ++r) {
    EXPECT_LE((m.transitions().row(r).array() > 0.0).count(), 2);
    EXPECT_NEAR(m.transitions().row(r).sum(), 1.0, 1e-12);
  }
}

TEST(Rng, SeededStreamsRepeat) {
  Rng a(mix_seed(5, 1));
  Rng b(mix_seed(5, 1));
  Rng c(mix_seed(5, 2));
  for (int i = 0; i < 10; ++i) {
    const double x = a.uniform();
    EXPECT_EQ(x, b.uniform());
    EXPECT_GE(x, 0.0);
    EXPECT_LT(x, 1.0);
  }
  EXPECT_NE(Rng(mix_seed(5, 1)).uniform(), c.uniform());
}
