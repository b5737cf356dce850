#include <gtest/gtest.h>

#include <cmath>

#include "lambdarep/error.hpp"
#include "lambdarep/lambda_rep.hpp"
#include "lambdarep/oracle.hpp"
#include "support.hpp"

using namespace lambdarep;
using lambdarep::testing::grid_from_rows;

namespace {

GridWorld toy_world() {
  GridSpec g = grid_from_rows({"G.G"});
  g.goal_annotations[0] = {10.0, 0.0};
  g.goal_annotations[2] = {6.0, 1.0};
  g.wall_penalty = 0.0;
  return build_mdp_from_grid(g, 0.99);
}

}  // namespace

TEST(TruncationHorizon, MeetsRequestedBias) {
  for (double lam : {0.0, 0.5, 1.0}) {
    const int H = default_truncation_horizon(0.9, lam, 1e-6);
    const double scale = 1.0 / (1.0 - lam * 0.9);
    EXPECT_LT(std::pow(0.9, H + 1) * scale, 1e-6);
    EXPECT_GE(std::pow(0.9, H) * scale, 1e-6);
  }
}

TEST(ExactDiminished, ToyValues) {
  const GridWorld w = toy_world();
  const RewardSpec spec = RewardSpec::pure(w.r_bar, w.lambda);
  const std::vector<int> stay(3, kStay);
  const Policy pi = Policy::deterministic(stay, kNumGridActions);
  // Two rewards collected after stepping onto each goal.
  EXPECT_NEAR(exact_diminished_value(w.mdp, pi, spec, 2, 2), 11.94, 1e-12);
  EXPECT_NEAR(exact_diminished_value(w.mdp, pi, spec, 0, 2), 10.0, 1e-12);
}

TEST(ExactDiminished, RejectsStochasticPolicy) {
  const GridWorld w = toy_world();
  const RewardSpec spec = RewardSpec::pure(w.r_bar, w.lambda);
  EXPECT_THROW(exact_diminished_value(w.mdp, Policy::uniform(3, kNumGridActions), spec, 0, 5), UnsupportedError);
}

TEST(ExactLambdaR, ValueIsRewardWeightedRepresentation) {
  // On a deterministic loop, r' Phi(s, .) equals the diminished return.
  const GridWorld w = toy_world();
  std::vector<int> acts{kRight, kRight, kLeft};
  const Policy pi = Policy::deterministic(acts, kNumGridActions);
  const RewardSpec spec = RewardSpec::pure(w.r_bar, w.lambda);
  const Matrix phi = exact_lambda_r(policy_transition_matrix(w.mdp, pi), w.mdp.gamma(), w.lambda);
  const double from_rep = phi.row(1).dot(w.r_bar);
  EXPECT_NEAR(from_rep, exact_diminished_value(w.mdp, pi, spec, 1, 6000), 1e-9);
}

TEST(MonteCarlo, AgreesWithExactOnSmallMdp) {
  Rng rng(17);
  const TabularMDP mdp = random_mdp(4, 2, 0.8, rng);
  const Policy pi = random_policy(4, 2, rng);
  const Vector lam = uniform_lambda(4, 0.5);
  const Matrix exact = exact_lambda_r(policy_transition_matrix(mdp, pi), 0.8, lam);
  const McEstimate mc = mc_lambda_r(mdp, pi, lam, 0, 20000, 0, 3);
  for (int c = 0; c < 4; ++c) {
    EXPECT_LE(std::abs(mc.mean[c] - exact(0, c)), 5.0 * mc.se[c] + mc.truncation_bias) << "column " << c;
  }
}

TEST(MonteCarlo, DeterministicSystemHasZeroSpread) {
  const GridWorld w = toy_world();
  const std::vector<int> acts{kStay, kRight, kStay};
  const Policy pi = Policy::deterministic(acts, kNumGridActions);
  const McEstimate mc = mc_lambda_r(w.mdp, pi, w.lambda, 1, 50, 0, 1);
  EXPECT_LT(mc.se.maxCoeff(), 1e-12);
  const Matrix exact = exact_lambda_r(policy_transition_matrix(w.mdp, pi), 0.99, w.lambda);
  EXPECT_NEAR(mc.mean[2], exact(1, 2), mc.truncation_bias + 1e-9);
}

TEST(MonteCarlo, SeedDeterminism) {
  Rng rng(18);
  const TabularMDP mdp = random_mdp(5, 2, 0.9, rng);
  const Policy pi = Policy::uniform(5, 2);
  const auto a = mc_lambda_r(mdp, pi, uniform_lambda(5, 0.3), 1, 500, 0, 77);
  const auto b = mc_lambda_r(mdp, pi, uniform_lambda(5, 0.3), 1, 500, 0, 77);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.se, b.se);
}

TEST(MonteCarlo, DiminishedValueMatchesRepresentation) {
  Rng rng(19);
  const TabularMDP mdp = random_mdp(4, 2, 0.85, rng);
  const Policy pi = random_policy(4, 2, rng);
  Vector r(4);
  r << 1.0, 0.0, 2.0, 0.5;
  const Vector lam = uniform_lambda(4, 0.4);
  const RewardSpec spec = RewardSpec::pure(r, lam);
  const Matrix phi = exact_lambda_r(policy_transition_matrix(mdp, pi), 0.85, lam);
  const McScalar mc = mc_diminished_value(mdp, pi, spec, 0, 20000, 0, 5);
  EXPECT_LE(std::abs(mc.mean - phi.row(0).dot(r)), 5.0 * mc.se + mc.truncation_bias);
}

TEST(SetOperator, SingletonMatchesRepresentationDiagonal) {
  Matrix P = lambdarep::testing::cycle_matrix(3);
  const TabularMDP mdp = lambdarep::testing::markov_chain(P, 0.9);
  const Policy pi = Policy::uniform(3, 1);
  const SetValue v = lambda_set_operator(mdp, pi, 0, {0}, 0.5, 400);
  const Matrix phi = exact_lambda_r(P, 0.9, uniform_lambda(3, 0.5));
  EXPECT_NEAR(v.value, phi(0, 0), 1e-12 + v.tail_bound);
  const McScalar mc = mc_set_value(mdp, pi, 0, {0}, 0.5, 10, 400, 1);
  EXPECT_NEAR(mc.mean, v.value, 1e-12);
}

TEST(SetOperator, SubadditiveBelowOneAdditiveAtOne) {
  const TabularMDP mdp = lambdarep::testing::markov_chain(lambdarep::testing::cycle_matrix(4), 0.9);
  const Policy pi = Policy::uniform(4, 1);
  for (double lam : {0.5, 1.0}) {
    const double a = lambda_set_operator(mdp, pi, 0, {1}, lam, 600).value;
    const double b = lambda_set_operator(mdp, pi, 0, {2}, lam, 600).value;
    const double ab = lambda_set_operator(mdp, pi, 0, {1, 2}, lam, 600).value;
    if (lam < 1.0) {
      EXPECT_LT(ab, a + b - 1e-6);
    } else {
      EXPECT_NEAR(ab, a + b, 1e-12);
    }
  }
}
