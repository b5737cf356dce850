#pragma once

#include <vector>

#include "lambdarep/env.hpp"
#include "lambdarep/linalg.hpp"

namespace lambdarep {

/// One synchronous backup of the lambda-representation operator:
///   out = I .* (11' + gamma * lambda P Phi) + gamma (11' - I) .* P Phi
/// where lambda(s') scales the diagonal entry of column s'.
Matrix apply_g_lambda(const Matrix& phi, const Matrix& P, double gamma, const Vector& lambda);

struct SolveOptions {
  double tol = 5e-2;  // max-entry Bellman residual
  int max_iters = 100000;
  bool zero_init = false;  // default start is (1 - lambda) I
  bool keep_iterates = false;
};

/// Converged (or tolerance-reached) state-conditioned lambda representation.
struct LambdaR {
  Matrix phi;
  Vector lambda;
  double gamma = 0.0;
  int iterations = 0;
  std::vector<double> residuals;  // residuals[k] = |G Phi^(k) - Phi^(k)|_inf
  std::vector<Matrix> iterates;   // Phi^(0..iterations), only with keep_iterates
  /// gamma^{k+1} / (1 - lambda_max gamma) for the returned iterate k; only
  /// meaningful from the (1 - lambda) I start.
  double error_bound = 0.0;
};

LambdaR solve_lambda_r(const Matrix& P, double gamma, const Vector& lambda, const SolveOptions& options = {});
LambdaR solve_lambda_r(const TabularMDP& mdp, const Policy& pi, const Vector& lambda,
                       const SolveOptions& options = {});

/// Action-conditioned representation; row `s * n_actions + a` holds Phi(s, a, .).
struct ActionLambdaR {
  int n_states = 0;
  int n_actions = 0;
  Matrix phi;
  Vector lambda;
  double gamma = 0.0;
  int iterations = 0;
  double final_residual = 0.0;

  auto row(int s, int a) const { return phi.row(Eigen::Index(s) * n_actions + a); }
  /// Q(s, a) = r' Phi(s, a, .) arranged as |S| x |A|.
  Matrix q_values(const Vector& r) const;
};

/// Iterates Phi(s,a,.) = e_s .* (1 + gamma lambda E Phi(s',a',.)) + gamma (1 - e_s) .* E Phi(s',a',.)
/// with s' ~ p(.|s,a), a' ~ pi(.|s'). `warm_start` may seed the iteration.
ActionLambdaR solve_lambda_r_actions(const TabularMDP& mdp, const Policy& pi, const Vector& lambda,
                                     const SolveOptions& options = {},
                                     const ActionLambdaR* warm_start = nullptr);

/// Stack of Nth-occupancy representations Phi_(1..N).
struct NthOccupancyRep {
  Eigen::Index n_states = 0;
  std::vector<Matrix> levels;  // levels[n-1] = Phi_(n)

  int depth() const { return static_cast<int>(levels.size()); }
  /// Phi_(n) with Phi_(0) = 0.
  Matrix at(int n) const;
};

NthOccupancyRep solve_nth_occupancy(const Matrix& P, double gamma, int N, const SolveOptions& options = {});
NthOccupancyRep solve_nth_occupancy(const TabularMDP& mdp, const Policy& pi, int N,
                                    const SolveOptions& options = {});

/// Representation for eligibility-trace rewards. Solves the SR with discount
/// gamma * lambda_r directly, then iterates
///   Omega = diag(lambda_d - gamma lambda_r (1 - lambda_d) (P M)_{ss}) + gamma P Omega.
/// Its weights count the current visit, so a first visit is credited lambda_d.
Matrix solve_eligibility_trace_rep(const Matrix& P, double gamma, double lambda_d, double lambda_r,
                                   const SolveOptions& options = {});

struct TotalTimeRep {
  Matrix phi;
  bool clamped = false;  // some entry hit [0, cap]
  int iterations = 0;
};

/// Total-time replenishment representation with entries clamped to [0, cap]:
///   diag: 1 + gamma lambda_d E P(s', s'),  off-diagonal: gamma lambda_r E P(s', s'').
TotalTimeRep solve_total_time_rep(const Matrix& P, double gamma, double lambda_d, double lambda_r,
                                  double cap, const SolveOptions& options = {});

/// Exact discrete Bellman loss for the weighted representation phi (Phi = phi diag(mu)):
///   E_{s~rho, s1~P(s,.), s'~mu}[(phi(s,s') - gamma target(s1,s'))^2] - 2 E_rho[phi(s,s)]
///   + 2 gamma E_{s~rho, s1}[(1 - lambda(s)) mu(s) phi(s,s) target(s1,s)].
/// `target` plays the stop-gradient role.
double lambda_o_bellman_loss(const Matrix& phi, const Matrix& target, const Matrix& P, double gamma,
                             const Vector& lambda, const Vector& mu, const Vector& rho);
double lambda_o_bellman_loss(const Matrix& phi, const Matrix& P, double gamma, const Vector& lambda,
                             const Vector& mu, const Vector& rho);

struct SetValue {
  double value = 0.0;
  double tail_bound = 0.0;  // gamma^{horizon+1} / (1 - gamma)
};

/// Set-indexed lambda operator sum_k lambda^{n(X,k)} gamma^k 1(s_k in X) evaluated
/// exactly along the single trajectory of a deterministic MDP and policy, truncated at `horizon`.
SetValue lambda_set_operator(const TabularMDP& mdp, const Policy& pi, int start, const std::vector<int>& set,
                             double lambda, int horizon);

}  // namespace lambdarep
