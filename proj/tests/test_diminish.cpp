#include <gtest/gtest.h>

#include <cmath>

#include "lambdarep/diminish.hpp"
#include "lambdarep/error.hpp"
#include "support.hpp"

using namespace lambdarep;

namespace {

// One absorbing state with reward 4 and decay 0.5 next to an empty state.
struct Fixture {
  TabularMDP mdp;
  RewardSpec spec;
};

Fixture stay_fixture(double lambda) {
  Matrix P(2, 2);
  P << 1, 0,
       0, 1;
  Vector r(2);
  r << 4.0, 0.0;
  Vector lam(2);
  lam << lambda, 1.0;
  return {lambdarep::testing::markov_chain(P, 0.9), RewardSpec::pure(r, lam)};
}

}  // namespace

TEST(PureDiminish, RewardDecaysPerVisit) {
  auto f = stay_fixture(0.5);
  Rng rng(1);
  EpisodeState ep = start_episode(f.spec, 0);
  const double expected[] = {4.0, 2.0, 1.0, 0.5};
  for (double e : expected) {
    const StepResult r = advance(f.mdp, f.spec, ep, 0, rng, 100);
    EXPECT_DOUBLE_EQ(r.state_reward, e);
  }
  EXPECT_DOUBLE_EQ(ep.cumulative_return, 7.5);
  EXPECT_NEAR(ep.discounted_return, 4 + 0.9 * 2 + 0.81 * 1 + 0.729 * 0.5, 1e-12);
  EXPECT_EQ(ep.visit_counts[0], 4);
  EXPECT_DOUBLE_EQ(ep.reward_vector[0], 0.25);
}

TEST(PureDiminish, ZeroDecayPaysOnce) {
  auto f = stay_fixture(0.0);
  Rng rng(1);
  EpisodeState ep = start_episode(f.spec, 0);
  EXPECT_DOUBLE_EQ(advance(f.mdp, f.spec, ep, 0, rng, 100).state_reward, 4.0);
  EXPECT_TRUE(ep.terminated);  // nothing left above the threshold
}

TEST(PureDiminish, ThresholdTermination) {
  auto f = stay_fixture(0.5);
  Rng rng(1);
  EpisodeState ep = start_episode(f.spec, 0);
  int steps = 0;
  while (!ep.terminated) {
    advance(f.mdp, f.spec, ep, 0, rng, 1000);
    ++steps;
  }
  // 4 * 0.5^k < 0.1 first at k = 6.
  EXPECT_EQ(steps, 6);
}

TEST(PureDiminish, NoThresholdWhenNothingDecays) {
  auto f = stay_fixture(1.0);
  EXPECT_FALSE(f.spec.threshold_termination_active());
  Rng rng(1);
  EpisodeState ep = start_episode(f.spec, 0);
  int steps = 0;
  while (!ep.terminated) {
    advance(f.mdp, f.spec, ep, 0, rng, 25);
    ++steps;
  }
  EXPECT_EQ(steps, 25);
  EXPECT_DOUBLE_EQ(ep.cumulative_return, 100.0);
}

TEST(Episode, StepOnTerminatedThrows) {
  auto f = stay_fixture(0.5);
  Rng rng(1);
  EpisodeState ep = start_episode(f.spec, 0);
  advance(f.mdp, f.spec, ep, 0, rng, 1);
  EXPECT_THROW(advance(f.mdp, f.spec, ep, 0, rng, 1), StateError);
  EpisodeState fresh = start_episode(f.spec, 0);
  EXPECT_THROW(advance(f.mdp, f.spec, fresh, 3, rng, 1), StateError);
}

TEST(Episode, StepIsPure) {
  auto f = stay_fixture(0.5);
  Rng rng(1);
  const EpisodeState ep = start_episode(f.spec, 0);
  const StepOutput out = step(f.mdp, f.spec, ep, 0, rng, 10);
  EXPECT_EQ(ep.t, 0);
  EXPECT_EQ(out.next.t, 1);
  EXPECT_DOUBLE_EQ(out.result.reward, 4.0);
}

TEST(Episode, RunEpisodeIsSeedDeterministic) {
  Rng gen(11);
  const TabularMDP mdp = random_mdp(5, 2, 0.9, gen);
  Vector r = Vector::LinSpaced(5, 0.0, 4.0);
  const RewardSpec spec = RewardSpec::pure(r, uniform_lambda(5, 0.7));
  Agent agent = [](const EpisodeState& ep) { return ep.t % 2; };
  EpisodeOptions opts;
  opts.seed = 42;
  opts.horizon = 30;
  const EpisodeTrace a = run_episode(mdp, spec, agent, opts);
  const EpisodeTrace b = run_episode(mdp, spec, agent, opts);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a.records[i].state, b.records[i].state);
  EXPECT_EQ(a.undiscounted_return, b.undiscounted_return);
  EXPECT_NEAR(discounted_segment_return(a, 0.9, 0, a.size()), a.discounted_return, 1e-12);
}

TEST(Replenish, EligibilityTraceRecovers) {
  auto f = stay_fixture(1.0);
  f.spec.scheme = RewardScheme::kEligibilityTrace;
  f.spec.lambda_d = 0.5;
  f.spec.lambda_r = 0.5;
  EpisodeState ep = start_episode(f.spec, 0);
  EXPECT_DOUBLE_EQ(reward_at(f.spec, 0, ep), 4.0);
  Rng rng(1);
  advance(f.mdp, f.spec, ep, 0, rng, 100);
  // trace = 0.5 after one visit: (1 - 0.5 * 0.5) * 4.
  EXPECT_DOUBLE_EQ(reward_at(f.spec, 0, ep), 3.0);
}

TEST(Replenish, TotalTimeIsClamped) {
  auto f = stay_fixture(1.0);
  f.spec.scheme = RewardScheme::kTotalTime;
  f.spec.lambda_d = 0.5;
  f.spec.lambda_r = 0.5;
  EXPECT_DOUBLE_EQ(f.spec.effective_cap(), 40.0);
  EpisodeState ep = start_episode(f.spec, 1);
  ep.t = 20;  // long absence: lambda_r^{-20} blows up and is clamped
  EXPECT_DOUBLE_EQ(reward_at(f.spec, 0, ep), 40.0);
}

TEST(Schemes, NamesRoundTrip) {
  for (auto s : {RewardScheme::kPureDiminish, RewardScheme::kTimeElapsed, RewardScheme::kEligibilityTrace,
                 RewardScheme::kTotalTime}) {
    EXPECT_EQ(parse_scheme(scheme_name(s)), s);
  }
  EXPECT_THROW(parse_scheme("bogus"), ConfigError);
}

TEST(RewardSpecValidation, RejectsBadShapes) {
  RewardSpec spec = RewardSpec::pure(Vector::Ones(3), Vector::Ones(2));
  EXPECT_THROW(spec.validate(3), Error);
  spec = RewardSpec::pure(Vector::Ones(2), Vector::Constant(2, -0.1));
  EXPECT_THROW(spec.validate(2), Error);
}
