#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lambdarep/diminish.hpp"
#include "lambdarep/env.hpp"
#include "lambdarep/linalg.hpp"

namespace lambdarep {

/// Smallest H with gamma^{H+1} / (1 - lambda_max gamma) < bias.
int default_truncation_horizon(double gamma, double lambda_max, double bias = 1e-6);

struct McEstimate {
  Vector mean;
  Vector se;
  int horizon = 0;
  int n_rollouts = 0;
  double truncation_bias = 0.0;  // gamma^{H+1} / (1 - lambda_max gamma)
};

/// Monte-Carlo estimate of Phi(start, .) by simulating
///   sum_{k<=H} lambda(s')^{n(s',k)} gamma^k 1(s_k = s').
/// horizon <= 0 selects default_truncation_horizon. Rollout i uses the seed mix_seed(seed, i).
McEstimate mc_lambda_r(const TabularMDP& mdp, const Policy& pi, const Vector& lambda, int start,
                       int n_rollouts, int horizon, std::uint64_t seed);

struct McScalar {
  double mean = 0.0;
  double se = 0.0;
  double truncation_bias = 0.0;
};

/// Monte-Carlo discounted diminished return sum_{k<=H} gamma^k r_k under the pure scheme.
McScalar mc_diminished_value(const TabularMDP& mdp, const Policy& pi, const RewardSpec& spec, int start,
                             int n_rollouts, int horizon, std::uint64_t seed);

/// Monte-Carlo estimate of the set-indexed operator sum_k lambda^{n(X,k)} gamma^k 1(s_k in X).
McScalar mc_set_value(const TabularMDP& mdp, const Policy& pi, int start, const std::vector<int>& set,
                      double lambda, int n_rollouts, int horizon, std::uint64_t seed);

/// Exact discounted diminished return over the first `steps` rewards of the
/// unique trajectory of a deterministic system under the pure scheme.
double exact_diminished_value(const TabularMDP& mdp, const Policy& pi, const RewardSpec& spec, int start,
                              int steps);

/// Closed forms: self_loop, two_cycle_diag, two_cycle_off, one_step_reach.
double closed_form(const std::string& case_id, double gamma, double lambda);

/// Exact lambda representation from one linear solve per column:
///   (I - gamma D_{s'} P) Phi(., s') = e_{s'},  D_{s'} = I with lambda(s') at (s', s').
Matrix exact_lambda_r(const Matrix& P, double gamma, const Vector& lambda);

/// Exact action-conditioned representation (row s * |A| + a), built from exact_lambda_r.
Matrix exact_action_lambda_r(const TabularMDP& mdp, const Policy& pi, const Vector& lambda);

/// Successor representation (I - gamma P)^{-1}.
Matrix successor_representation(const Matrix& P, double gamma);

}  // namespace lambdarep
