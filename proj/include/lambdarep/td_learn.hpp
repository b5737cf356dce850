#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "lambdarep/diminish.hpp"
#include "lambdarep/env.hpp"
#include "lambdarep/lambda_rep.hpp"
#include "lambdarep/linalg.hpp"

namespace lambdarep {

/// One TD step on row `row` of a lambda-representation table:
///   delta = e_s .* (1 + gamma lambda .* Phi(next)) + gamma (1 - e_s) .* Phi(next) - Phi(row)
///   Phi(row) += alpha delta
/// `state` is the state occupied at `row`. Returns delta.
Vector td_update_lambda_r(Matrix& phi, int row, int state, int next_row, double alpha, double gamma,
                          const Vector& lambda);

struct LearnerConfig {
  double alpha = 0.1;
  Vector lambda;  // agent's decay rates, one per state
  int episodes = 500;
  int horizon = 100;
  double epsilon_start = 1.0;
  double epsilon_end = 0.05;
  double anneal_fraction = 0.5;  // share of episodes over which epsilon decays linearly
  std::uint64_t seed = 0;

  void validate(int n_states) const;
  double epsilon_at(int episode) const;
};

struct QLearnResult {
  ActionLambdaR table;
  std::vector<double> returns;             // undiscounted, per episode
  std::vector<double> discounted_returns;  // per episode
  std::vector<int> steps;
};

/// Online Q_lambda-learning. Each step acts epsilon-greedily on Q = Phi(s, ., .) r_t with the
/// environment's current reward vector r_t, picks a_{t+1} greedily on Phi(s_{t+1}, ., .) r_t and
/// moves Phi(s_t, a_t) toward the lambda backup. The table starts at zero.
QLearnResult q_lambda_learning(const TabularMDP& mdp, const RewardSpec& spec, const LearnerConfig& config);

/// Linear lambda-features psi(s, a) = Theta_a phi(s) over bounded base features.
struct LinearLambdaF {
  Matrix features;             // |S| x D, entries in [0, 1]
  std::vector<Matrix> theta;   // one D x D block per action
  Vector reward_weights;       // r(s) = w' phi(s)

  LinearLambdaF(Matrix base_features, int n_actions, Vector weights);

  static LinearLambdaF one_hot(int n_states, int n_actions, Vector rewards);

  int dim() const { return static_cast<int>(features.cols()); }
  Vector psi(int s, int a = 0) const { return theta[a] * features.row(s).transpose(); }
  /// w' psi(s, a).
  double value(int s, int a = 0) const { return reward_weights.dot(psi(s, a)); }
  void validate() const;
};

/// TD step toward phi(s) .* (1 + gamma lambda .* psi(s1, a1)) + gamma (1 - phi(s)) .* psi(s1, a1)
/// with Theta_a += alpha (y - Theta_a phi(s)) phi(s)'. Returns y - psi(s, a).
Vector lambda_f_td_update(LinearLambdaF& model, int s, int a, int s1, int a1, double alpha, double gamma,
                          const Vector& lambda);

/// r(s) + gamma (V(s1) + w' ((lambda - 1) .* phi(s) .* psi(s1))) with r(s) = w' phi(s).
/// `psi_table` holds psi(s) row-wise (|S| x D).
double lambda_value_td_target(const Vector& v, const Matrix& psi_table, const Vector& w, const Matrix& features, int s,
                              int s1, double gamma, const Vector& lambda);

/// Least-squares decay estimate sum r_t r_{t+1} / sum r_t^2, clamped to [0, 1].
double estimate_lambda(const std::vector<std::pair<double, double>>& pairs);

/// Incremental form: each batch moves lambda by eta * sum (r1 - lambda r0) r0 / sum r0^2.
/// With eta = 1 a batch lands on that batch's least-squares estimate.
class LambdaEstimator {
 public:
  explicit LambdaEstimator(double initial = 1.0, double eta = 0.5);

  double value() const { return lambda_; }
  /// Returns false (and leaves lambda unchanged) when every r_t in the batch is zero.
  bool update(const std::vector<std::pair<double, double>>& pairs);

 private:
  double lambda_;
  double eta_;
};

struct EvaluationRun {
  int episodes = 200;
  int horizon = 10;
  double alpha = 0.1;
  std::uint64_t seed = 0;
};

/// Tabular TD evaluation of Phi^pi under a (stochastic) policy. Episodes start from the MDP's start distribution.
Matrix td_policy_evaluation(const TabularMDP& mdp, const Policy& pi, const Vector& lambda, const EvaluationRun& run);

/// Linear lambda-feature TD evaluation of a policy with a single-action model.
LinearLambdaF lambda_f_policy_evaluation(const TabularMDP& mdp, const Policy& pi, const Matrix& features,
                                         const Vector& reward_weights, const Vector& lambda,
                                         const EvaluationRun& run);

}  // namespace lambdarep
