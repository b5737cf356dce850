#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "lambdarep/diminish.hpp"
#include "lambdarep/env.hpp"
#include "lambdarep/lambda_rep.hpp"

namespace lambdarep {

struct PolicyEntry {
  std::string name;
  Policy policy;
  ActionLambdaR rep;
};

/// Library of policies sharing one MDP, each with its action-conditioned representation.
class PolicySet {
 public:
  PolicySet(int n_states, int n_actions, double gamma);

  /// Solves each policy's representation with decay `lambda_hat`.
  static PolicySet build(const TabularMDP& mdp, const std::vector<std::pair<std::string, Policy>>& policies,
                         const Vector& lambda_hat, const SolveOptions& options = {});

  void add(std::string name, Policy policy, ActionLambdaR rep);

  int size() const { return static_cast<int>(entries_.size()); }
  int n_states() const { return n_states_; }
  int n_actions() const { return n_actions_; }
  double gamma() const { return gamma_; }
  const PolicyEntry& operator[](int j) const { return entries_[j]; }
  const std::vector<PolicyEntry>& entries() const { return entries_; }

 private:
  int n_states_;
  int n_actions_;
  double gamma_;
  std::vector<PolicyEntry> entries_;
};

/// Q^{pi_j}(s, a) = r' Phi^{pi_j}(s, a, .) for every policy j.
Vector gpe(const PolicySet& set, int s, int a, const Vector& r);

/// Policies x actions table of GPE values at state s.
Matrix gpe_table(const PolicySet& set, int s, const Vector& r);

struct GpiChoice {
  int action = 0;
  int policy = 0;
  double value = 0.0;
};

/// argmax_a max_j Q^{pi_j}(s, a); ties go to the lowest action, then the lowest policy.
GpiChoice gpi_choice(const PolicySet& set, int s, const Vector& r);
int gpi_action(const PolicySet& set, int s, const Vector& r);

/// Agent that re-reads the environment's reward vector every step and acts by GPI.
Agent gpi_agent(const PolicySet& set);

struct ReturnStats {
  double mean = 0.0;
  double se = 0.0;
};

ReturnStats mean_and_se(const std::vector<double>& values);

struct GpiRunOptions {
  int episodes = 50;
  int horizon = 40;
  std::uint64_t seed = 0;
  bool keep_traces = false;
};

struct GpiRunResult {
  std::vector<double> undiscounted;
  std::vector<double> discounted;
  std::vector<int> steps;
  ReturnStats undiscounted_stats;
  ReturnStats discounted_stats;
  std::vector<EpisodeTrace> traces;
};

/// Runs GPE+GPI episodes. Episode i is seeded with mix_seed(seed, i).
GpiRunResult run_gpe_gpi(const TabularMDP& mdp, const RewardSpec& spec, const PolicySet& set,
                         const GpiRunOptions& options);

/// Deterministic policy that reaches `target` as fast as possible (stationary reward 1 at the
/// target). Among near-tied actions it prefers the one least likely to bump, then the lowest index.
Policy shortest_path_policy(const TabularMDP& mdp, int target);

/// Optimal deterministic policy for a stationary state reward, with the same tie rule.
Policy optimal_policy(const TabularMDP& mdp, const Vector& reward);

struct BoundRow {
  int s = 0;
  int a = 0;
  double q_gpi = 0.0;          // Q^pi(s, a) under the true decay
  double max_q_base = 0.0;     // max_j Q^{pi_j}(s, a) under the true decay
  double epsilon_term = 0.0;   // 2 eps / (1 - gamma)
  double mismatch_term = 0.0;  // |lambda - lambda_hat| |r|_inf / (1 - gamma)
  double decay_term = 0.0;     // gamma (1 - lambda) r(s) / ((1 - lambda gamma)(1 - gamma))
  double slack = 0.0;          // q_gpi - (max_q_base - terms); negative means violation
};

struct BoundReport {
  double epsilon = 0.0;
  std::vector<BoundRow> rows;
  int violations = 0;
  double min_slack = 0.0;
};

struct BoundCheckOptions {
  SolveOptions solve{};               // DP used to obtain the estimates Q~_j
  std::vector<std::pair<int, int>> pairs;  // (s, a) to check; empty means all
};

/// Checks Q^pi(s,a) >= max_j Q^{pi_j}(s,a) - (2 eps + |lambda - lambda_hat| |r|_inf
/// + gamma (1 - lambda) r(s) / (1 - lambda gamma)) / (1 - gamma), where pi is the GPI policy built
/// from DP estimates under lambda_hat at reward r, and eps is the largest error of those estimates
/// against the exact lambda_hat values.
BoundReport gpi_bound_check(const TabularMDP& mdp, const Vector& r, const std::vector<Policy>& policies,
                            double lambda_true, double lambda_hat, const BoundCheckOptions& options = {});

}  // namespace lambdarep
