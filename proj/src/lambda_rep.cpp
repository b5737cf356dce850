#include "lambdarep/lambda_rep.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Sparse>

#include "lambdarep/error.hpp"

namespace lambdarep {
namespace {

void check_square(const Matrix& P, const char* what) {
  if (P.rows() != P.cols()) throw StructuralError(std::string(what) + " must be square");
}

void check_lambda(const Vector& lambda, Eigen::Index n) {
  if (lambda.size() != n) throw StructuralError("lambda must have one entry per state");
  if (n > 0 && (lambda.minCoeff() < 0.0 || lambda.maxCoeff() > 1.0)) {
    throw ConfigError("lambda entries must lie in [0, 1]");
  }
}

void check_gamma(double gamma) {
  if (!(gamma >= 0.0 && gamma < 1.0)) throw ConfigError("gamma must lie in [0, 1)");
}

void check_tol(const SolveOptions& options) {
  if (!(options.tol > 0.0)) throw ConfigError("tol must be positive");
  if (options.max_iters <= 0) throw ConfigError("max_iters must be positive");
}

double max_abs_diff(const Matrix& a, const Matrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

// Nth-occupancy backup: gamma P Phi off the diagonal, 1 + gamma (P Phi_prev)(s, s) on it.
Matrix occupancy_backup(const Matrix& P, const Matrix& phi, const Matrix& prev, double gamma) {
  Matrix out = gamma * (P * phi);
  for (Eigen::Index s = 0; s < P.rows(); ++s) out(s, s) = 1.0 + gamma * P.row(s).dot(prev.col(s));
  return out;
}

}  // namespace

Matrix apply_g_lambda(const Matrix& phi, const Matrix& P, double gamma, const Vector& lambda) {
  check_square(P, "P");
  if (phi.rows() != P.rows() || phi.cols() != P.cols()) {
    throw StructuralError("phi and P shapes disagree");
  }
  check_lambda(lambda, P.rows());
  Matrix pphi = P * phi;
  Matrix out = gamma * pphi;
  for (Eigen::Index s = 0; s < P.rows(); ++s) out(s, s) = 1.0 + gamma * lambda[s] * pphi(s, s);
  return out;
}

LambdaR solve_lambda_r(const Matrix& P, double gamma, const Vector& lambda, const SolveOptions& options) {
  check_square(P, "P");
  check_gamma(gamma);
  check_lambda(lambda, P.rows());
  check_tol(options);

  const Eigen::Index n = P.rows();
  LambdaR out;
  out.lambda = lambda;
  out.gamma = gamma;
  Matrix phi = options.zero_init ? Matrix(Matrix::Zero(n, n))
                                 : Matrix((Vector::Ones(n) - lambda).asDiagonal());
  if (options.keep_iterates) out.iterates.push_back(phi);

  for (int k = 0; k < options.max_iters; ++k) {
    Matrix next = apply_g_lambda(phi, P, gamma, lambda);
    const double residual = max_abs_diff(next, phi);
    out.residuals.push_back(residual);
    phi = std::move(next);
    if (options.keep_iterates) out.iterates.push_back(phi);
    if (!phi.allFinite()) throw NumericError("lambda representation iterate is not finite");
    if (residual < options.tol) {
      out.iterations = k + 1;
      out.phi = std::move(phi);
      const double lmax = n > 0 ? lambda.maxCoeff() : 0.0;
      out.error_bound = std::pow(gamma, out.iterations + 1) / (1.0 - lmax * gamma);
      return out;
    }
  }
  throw ConvergenceError("lambda representation did not converge within max_iters", out.residuals.back());
}

LambdaR solve_lambda_r(const TabularMDP& mdp, const Policy& pi, const Vector& lambda, const SolveOptions& options) {
  return solve_lambda_r(policy_transition_matrix(mdp, pi), mdp.gamma(), lambda, options);
}

Matrix ActionLambdaR::q_values(const Vector& r) const {
  if (r.size() != phi.cols()) throw StructuralError("reward vector length must equal |S|");
  Vector q = phi * r;
  Matrix out(n_states, n_actions);
  for (int s = 0; s < n_states; ++s) {
    for (int a = 0; a < n_actions; ++a) out(s, a) = q[Eigen::Index(s) * n_actions + a];
  }
  return out;
}

ActionLambdaR solve_lambda_r_actions(const TabularMDP& mdp, const Policy& pi, const Vector& lambda,
                                     const SolveOptions& options, const ActionLambdaR* warm_start) {
  const int nS = mdp.n_states();
  const int nA = mdp.n_actions();
  if (pi.n_states() != nS || pi.n_actions() != nA) throw StructuralError("policy shape disagrees with MDP");
  check_gamma(mdp.gamma());
  check_lambda(lambda, nS);
  check_tol(options);
  const double gamma = mdp.gamma();

  // E_{s'~p(.|s,a), a'~pi(.|s')} Phi(s', a', .) is T * W * Phi with W = |S| x |S||A|.
  using Sparse = Eigen::SparseMatrix<double, Eigen::RowMajor>;
  std::vector<Eigen::Triplet<double>> entries;
  for (int s = 0; s < nS; ++s) {
    for (int a = 0; a < nA; ++a) {
      if (pi(s, a) != 0.0) entries.emplace_back(s, Eigen::Index(s) * nA + a, pi(s, a));
    }
  }
  Sparse W(nS, Eigen::Index(nS) * nA);
  W.setFromTriplets(entries.begin(), entries.end());
  Sparse T = mdp.transitions().sparseView();

  Matrix phi;
  if (warm_start != nullptr) {
    if (warm_start->phi.rows() != Eigen::Index(nS) * nA || warm_start->phi.cols() != nS) {
      throw StructuralError("warm start shape disagrees with MDP");
    }
    phi = warm_start->phi;
  } else {
    phi = Matrix::Zero(Eigen::Index(nS) * nA, nS);
    if (!options.zero_init) {
      for (int s = 0; s < nS; ++s) {
        for (int a = 0; a < nA; ++a) phi(Eigen::Index(s) * nA + a, s) = 1.0 - lambda[s];
      }
    }
  }

  ActionLambdaR out;
  out.n_states = nS;
  out.n_actions = nA;
  out.lambda = lambda;
  out.gamma = gamma;
  double residual = 0.0;
  for (int k = 0; k < options.max_iters; ++k) {
    Matrix ephi = T * (W * phi);  // (SA) x S expected next-row
    Matrix next = gamma * ephi;
    for (int s = 0; s < nS; ++s) {
      for (int a = 0; a < nA; ++a) {
        const Eigen::Index r = Eigen::Index(s) * nA + a;
        next(r, s) = 1.0 + gamma * lambda[s] * ephi(r, s);
      }
    }
    residual = max_abs_diff(next, phi);
    phi = std::move(next);
    if (!phi.allFinite()) throw NumericError("action-conditioned iterate is not finite");
    if (residual < options.tol) {
      out.iterations = k + 1;
      out.final_residual = residual;
      out.phi = std::move(phi);
      return out;
    }
  }
  throw ConvergenceError("action-conditioned representation did not converge within max_iters", residual);
}

Matrix NthOccupancyRep::at(int n) const {
  if (n < 0 || n > depth()) throw StructuralError("occupancy level out of range");
  if (n == 0) return Matrix::Zero(n_states, n_states);
  return levels[n - 1];
}

NthOccupancyRep solve_nth_occupancy(const Matrix& P, double gamma, int N, const SolveOptions& options) {
  check_square(P, "P");
  check_gamma(gamma);
  check_tol(options);
  if (N < 0) throw ConfigError("N must be nonnegative");
  const Eigen::Index n = P.rows();

  NthOccupancyRep out;
  out.n_states = n;
  Matrix prev = Matrix::Zero(n, n);
  for (int level = 1; level <= N; ++level) {
    Matrix phi = prev;
    double residual = 0.0;
    bool done = false;
    for (int k = 0; k < options.max_iters; ++k) {
      Matrix next = occupancy_backup(P, phi, prev, gamma);
      residual = max_abs_diff(next, phi);
      phi = std::move(next);
      if (residual < options.tol) {
        done = true;
        break;
      }
    }
    if (!done) throw ConvergenceError("occupancy level " + std::to_string(level) + " did not converge", residual);
    out.levels.push_back(phi);
    prev = std::move(phi);
  }
  return out;
}

NthOccupancyRep solve_nth_occupancy(const TabularMDP& mdp, const Policy& pi, int N, const SolveOptions& options) {
  return solve_nth_occupancy(policy_transition_matrix(mdp, pi), mdp.gamma(), N, options);
}

Matrix solve_eligibility_trace_rep(const Matrix& P, double gamma, double lambda_d, double lambda_r,
                                   const SolveOptions& options) {
  check_square(P, "P");
  check_gamma(gamma);
  check_tol(options);
  if (!(lambda_d >= 0.0 && lambda_d <= 1.0 && lambda_r >= 0.0 && lambda_r <= 1.0)) {
    throw ConfigError("lambda_d and lambda_r must lie in [0, 1]");
  }
  const Eigen::Index n = P.rows();
  const Matrix I = Matrix::Identity(n, n);
  const Matrix M = (I - gamma * lambda_r * P).partialPivLu().solve(I);
  const Matrix PM = P * M;
  Vector d(n);
  for (Eigen::Index s = 0; s < n; ++s) d[s] = lambda_d - gamma * lambda_r * (1.0 - lambda_d) * PM(s, s);
  const Matrix D = d.asDiagonal();

  Matrix omega = D;
  double residual = 0.0;
  for (int k = 0; k < options.max_iters; ++k) {
    Matrix next = D + gamma * (P * omega);
    residual = max_abs_diff(next, omega);
    omega = std::move(next);
    if (residual < options.tol) return omega;
  }
  throw ConvergenceError("eligibility-trace representation did not converge", residual);
}

TotalTimeRep solve_total_time_rep(const Matrix& P, double gamma, double lambda_d, double lambda_r, double cap,
                                  const SolveOptions& options) {
  check_square(P, "P");
  check_gamma(gamma);
  check_tol(options);
  if (!(cap > 0.0)) throw ConfigError("cap must be positive");
  if (!(lambda_d >= 0.0 && lambda_r >= 0.0)) throw ConfigError("lambda_d and lambda_r must be nonnegative");
  const Eigen::Index n = P.rows();

  TotalTimeRep out;
  Matrix phi = Matrix::Zero(n, n);
  double residual = 0.0;
  for (int k = 0; k < options.max_iters; ++k) {
    Matrix pphi = P * phi;
    Matrix next = gamma * lambda_r * pphi;
    for (Eigen::Index s = 0; s < n; ++s) next(s, s) = 1.0 + gamma * lambda_d * pphi(s, s);
    bool clamped = false;
    for (Eigen::Index i = 0; i < next.size(); ++i) {
      double& v = next.data()[i];
      if (v > cap) {
        v = cap;
        clamped = true;
      } else if (v < 0.0) {
        v = 0.0;
        clamped = true;
      }
    }
    residual = max_abs_diff(next, phi);
    phi = std::move(next);
    out.clamped = out.clamped || clamped;
    if (residual < options.tol) {
      out.phi = std::move(phi);
      out.iterations = k + 1;
      return out;
    }
  }
  throw ConvergenceError("total-time representation did not converge", residual);
}

double lambda_o_bellman_loss(const Matrix& phi, const Matrix& target, const Matrix& P, double gamma,
                             const Vector& lambda, const Vector& mu, const Vector& rho) {
  check_square(P, "P");
  const Eigen::Index n = P.rows();
  if (phi.rows() != n || phi.cols() != n || target.rows() != n || target.cols() != n) {
    throw StructuralError("phi, target and P shapes disagree");
  }
  if (lambda.size() != n || mu.size() != n || rho.size() != n) {
    throw StructuralError("lambda, mu and rho must have one entry per state");
  }
  if ((mu.array() <= 0.0).any()) throw ConfigError("mu must be strictly positive");
  if (std::abs(mu.sum() - 1.0) > 1e-9) throw ConfigError("mu must sum to 1");

  double squared = 0.0;
  double diag = 0.0;
  double correction = 0.0;
  for (Eigen::Index s = 0; s < n; ++s) {
    if (rho[s] == 0.0) continue;
    double sq_s = 0.0;
    double ret_s = 0.0;
    for (Eigen::Index s1 = 0; s1 < n; ++s1) {
      const double p = P(s, s1);
      if (p == 0.0) continue;
      const auto diff = (phi.row(s) - gamma * target.row(s1)).array();
      sq_s += p * (mu.array().transpose() * diff.square()).sum();
      ret_s += p * target(s1, s);
    }
    squared += rho[s] * sq_s;
    diag += rho[s] * phi(s, s);
    correction += rho[s] * (1.0 - lambda[s]) * mu[s] * phi(s, s) * ret_s;
  }
  return squared - 2.0 * diag + 2.0 * gamma * correction;
}

double lambda_o_bellman_loss(const Matrix& phi, const Matrix& P, double gamma, const Vector& lambda,
                             const Vector& mu, const Vector& rho) {
  return lambda_o_bellman_loss(phi, phi, P, gamma, lambda, mu, rho);
}

SetValue lambda_set_operator(const TabularMDP& mdp, const Policy& pi, int start, const std::vector<int>& set,
                             double lambda, int horizon) {
  if (!mdp.is_deterministic()) throw UnsupportedError("set operator requires a deterministic MDP");
  auto actions = pi.deterministic_actions();
  if (!actions) throw UnsupportedError("set operator requires a deterministic policy");
  if (start < 0 || start >= mdp.n_states()) throw StructuralError("start state out of range");
  if (horizon < 0) throw ConfigError("horizon must be nonnegative");
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw ConfigError("lambda must lie in [0, 1]");
  std::vector<char> member(mdp.n_states(), 0);
  for (int x : set) {
    if (x < 0 || x >= mdp.n_states()) throw StructuralError("set member out of range");
    member[x] = 1;
  }
  const auto next = nominal_successor(mdp);
  const double gamma = mdp.gamma();

  SetValue out;
  int s = start;
  int visits = 0;
  double discount = 1.0;
  for (int k = 0; k <= horizon; ++k) {
    if (member[s]) {
      out.value += std::pow(lambda, visits) * discount;
      ++visits;
    }
    discount *= gamma;
    s = next[mdp.row(s, (*actions)[s])];
  }
  out.tail_bound = std::pow(gamma, horizon + 1) / (1.0 - gamma);
  return out;
}

}  // namespace lambdarep
