#include <gtest/gtest.h>

#include <cmath>

#include "lambdarep/error.hpp"
#include "lambdarep/oracle.hpp"
#include "lambdarep/td_learn.hpp"
#include "support.hpp"

using namespace lambdarep;

TEST(TdUpdate, MatchesBackupFormula) {
  Matrix phi(2, 3);
  phi << 0.5, 0.2, 0.1,
         0.3, 0.4, 0.6;
  const Vector lam = Vector::Constant(3, 0.5);
  const Vector next = phi.row(1).transpose();
  const Vector delta = td_update_lambda_r(phi, 0, 0, 1, 0.5, 0.9, lam);
  EXPECT_NEAR(delta[0], 1.0 + 0.9 * 0.5 * next[0] - 0.5, 1e-15);
  EXPECT_NEAR(delta[1], 0.9 * next[1] - 0.2, 1e-15);
  EXPECT_NEAR(delta[2], 0.9 * next[2] - 0.1, 1e-15);
  EXPECT_NEAR(phi(0, 0), 0.5 + 0.5 * delta[0], 1e-15);
  EXPECT_THROW(td_update_lambda_r(phi, 5, 0, 1, 0.5, 0.9, lam), StructuralError);
}

TEST(TdEvaluation, ConvergesOnDeterministicCycle) {
  const Matrix P = lambdarep::testing::cycle_matrix(3);
  const TabularMDP mdp = lambdarep::testing::markov_chain(P, 0.8);
  const Vector lam = uniform_lambda(3, 0.5);
  EvaluationRun run;
  run.episodes = 400;
  run.horizon = 60;
  run.alpha = 0.2;
  run.seed = 2;
  const Matrix phi = td_policy_evaluation(mdp, Policy::uniform(3, 1), lam, run);
  EXPECT_LT(sup_norm(phi - exact_lambda_r(P, 0.8, lam)), 1e-3);
}

TEST(LambdaF, OneHotTracksTabularUpdate) {
  const int n = 3;
  Matrix table = Matrix::Zero(n, n);
  LinearLambdaF model = LinearLambdaF::one_hot(n, 1, Vector::Ones(n));
  const Vector lam = uniform_lambda(n, 0.3);
  const int seq[] = {0, 1, 2, 0, 2, 1, 1, 0};
  for (int i = 0; i + 1 < 8; ++i) {
    td_update_lambda_r(table, seq[i], seq[i], seq[i + 1], 0.4, 0.9, lam);
    lambda_f_td_update(model, seq[i], 0, seq[i + 1], 0, 0.4, 0.9, lam);
  }
  for (int s = 0; s < n; ++s) {
    EXPECT_LT((model.psi(s) - table.row(s).transpose()).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(LambdaF, RejectsFeaturesOutsideUnitRange) {
  Matrix f = Matrix::Identity(2, 2);
  f(0, 1) = 2.0;
  EXPECT_THROW(LinearLambdaF(f, 1, Vector::Ones(2)), ConfigError);
}

TEST(ValueTarget, EqualsProjectedBackup) {
  Rng rng(3);
  const int n = 4;
  const Matrix P = random_mdp(n, 1, 0.9, rng).transitions();
  const Vector lam = uniform_lambda(n, 0.6);
  const Vector w = Vector::LinSpaced(n, 1.0, 2.0);
  const Matrix F = Matrix::Identity(n, n);
  const Matrix psi = exact_lambda_r(P, 0.9, lam);
  const Vector v = psi * w;
  for (int s = 0; s < n; ++s) {
    for (int s1 = 0; s1 < n; ++s1) {
      const double y = lambda_value_td_target(v, psi, w, F, s, s1, 0.9, lam);
      Vector backup = 0.9 * psi.row(s1).transpose();
      backup[s] = 1.0 + 0.9 * lam[s] * psi(s1, s);
      EXPECT_NEAR(y, w.dot(backup), 1e-12);
    }
  }
}

TEST(LambdaEstimate, RecoversNoiselessDecay) {
  for (int i = 0; i <= 10; ++i) {
    const double lam = i / 10.0;
    std::vector<std::pair<double, double>> pairs;
    double r = 5.0;
    for (int k = 0; k < 4; ++k) {
      pairs.emplace_back(r, lam * r);
      r *= lam;
      if (r == 0.0) break;
    }
    EXPECT_NEAR(estimate_lambda(pairs), lam, 1e-15);
    LambdaEstimator est(1.0, 1.0);
    ASSERT_TRUE(est.update(pairs));
    EXPECT_NEAR(est.value(), lam, 1e-15);
  }
  EXPECT_THROW(estimate_lambda({{0.0, 0.0}}), NumericError);
  LambdaEstimator est;
  EXPECT_FALSE(est.update({{0.0, 1.0}}));
  EXPECT_EQ(est.value(), 1.0);
}

TEST(LambdaEstimate, HalfStepMovesHalfway) {
  LambdaEstimator est(1.0, 0.5);
  est.update({{4.0, 2.0}});
  EXPECT_NEAR(est.value(), 0.75, 1e-15);
  EXPECT_THROW(LambdaEstimator(1.0, 0.0), ConfigError);
}

TEST(LearnerConfig, EpsilonSchedule) {
  LearnerConfig cfg;
  cfg.episodes = 100;
  EXPECT_DOUBLE_EQ(cfg.epsilon_at(0), 1.0);
  EXPECT_NEAR(cfg.epsilon_at(25), 0.525, 1e-12);
  EXPECT_DOUBLE_EQ(cfg.epsilon_at(50), 0.05);
  EXPECT_DOUBLE_EQ(cfg.epsilon_at(99), 0.05);
  cfg.lambda = uniform_lambda(2, 0.5);
  cfg.alpha = 0.0;
  EXPECT_THROW(cfg.validate(2), ConfigError);
}

TEST(QLambdaLearning, SeedDeterministicAndLearnsToy) {
  GridSpec g = lambdarep::testing::grid_from_rows({"G.G"});
  g.goal_annotations[0] = {10.0, 0.0};
  g.goal_annotations[2] = {6.0, 1.0};
  g.wall_penalty = 0.0;
  const std::vector<int> start{1};
  const GridWorld w = build_mdp_from_grid(g, 0.9, start);
  const RewardSpec spec = RewardSpec::pure(w.r_bar, w.lambda);
  LearnerConfig cfg;
  cfg.lambda = w.lambda;
  cfg.episodes = 300;
  cfg.horizon = 20;
  cfg.alpha = 0.3;
  cfg.seed = 9;
  const QLearnResult a = q_lambda_learning(w.mdp, spec, cfg);
  const QLearnResult b = q_lambda_learning(w.mdp, spec, cfg);
  EXPECT_EQ(a.returns, b.returns);
  EXPECT_EQ(a.table.phi, b.table.phi);
  // The non-depleting goal is worth more than the one-shot goal.
  const Matrix q = a.table.q_values(w.r_bar);
  Eigen::Index best;
  q.row(1).maxCoeff(&best);
  EXPECT_EQ(best, kRight);
}
