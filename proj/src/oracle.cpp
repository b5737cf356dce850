#include "lambdarep/oracle.hpp"

#include <cmath>

#include "lambdarep/error.hpp"
#include "lambdarep/parallel.hpp"
#include "lambdarep/rng.hpp"

namespace lambdarep {
namespace {

// Samples a ~ pi(.|s) and then s' from the MDP's outcome list for (s, a).
class Simulator {
 public:
  Simulator(const TabularMDP& mdp, const Policy& pi) : mdp_(mdp), pi_(pi) {
    if (pi.n_states() != mdp.n_states() || pi.n_actions() != mdp.n_actions()) {
      throw StructuralError("policy shape disagrees with MDP");
    }
    outcome_probs_.resize(std::size_t(mdp.n_states()) * mdp.n_actions());
    for (int s = 0; s < mdp.n_states(); ++s) {
      for (int a = 0; a < mdp.n_actions(); ++a) {
        auto& probs = outcome_probs_[mdp.row(s, a)];
        for (const auto& o : mdp.outcomes(s, a)) probs.push_back(o.prob);
      }
    }
  }

  int next(int s, Rng& rng) const {
    const int a = sample_action(s, rng);
    const auto& probs = outcome_probs_[mdp_.row(s, a)];
    return mdp_.outcomes(s, a)[rng.categorical(probs)].next;
  }

 private:
  int sample_action(int s, Rng& rng) const {
    const int nA = mdp_.n_actions();
    double u = rng.uniform();
    double acc = 0.0;
    int last = 0;
    for (int a = 0; a < nA; ++a) {
      const double p = pi_(s, a);
      if (p <= 0.0) continue;
      last = a;
      acc += p;
      if (u < acc) return a;
    }
    return last;
  }

  const TabularMDP& mdp_;
  const Policy& pi_;
  std::vector<std::vector<double>> outcome_probs_;
};

void check_start(const TabularMDP& mdp, int start) {
  if (start < 0 || start >= mdp.n_states()) throw StructuralError("start state out of range");
}

McScalar summarize(const std::vector<double>& samples) {
  McScalar out;
  const double n = static_cast<double>(samples.size());
  out.mean = pairwise_sum(samples) / n;
  std::vector<double> sq(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) sq[i] = (samples[i] - out.mean) * (samples[i] - out.mean);
  out.se = samples.size() > 1 ? std::sqrt(pairwise_sum(sq) / (n - 1.0) / n) : 0.0;
  return out;
}

}  // namespace

int default_truncation_horizon(double gamma, double lambda_max, double bias) {
  if (!(gamma >= 0.0 && gamma < 1.0)) throw ConfigError("gamma must lie in [0, 1)");
  if (!(bias > 0.0)) throw ConfigError("bias must be positive");
  const double scale = 1.0 / (1.0 - lambda_max * gamma);
  int H = 0;
  double g = gamma;  // gamma^{H+1}
  while (g * scale >= bias) {
    g *= gamma;
    ++H;
  }
  return H;
}

McEstimate mc_lambda_r(const TabularMDP& mdp, const Policy& pi, const Vector& lambda, int start, int n_rollouts,
                       int horizon, std::uint64_t seed) {
  check_start(mdp, start);
  if (n_rollouts <= 0) throw ConfigError("n_rollouts must be positive");
  if (lambda.size() != mdp.n_states()) throw StructuralError("lambda must have one entry per state");
  const double gamma = mdp.gamma();
  const double lmax = lambda.size() > 0 ? lambda.maxCoeff() : 0.0;
  if (horizon <= 0) horizon = default_truncation_horizon(gamma, lmax);
  const int n = mdp.n_states();
  Simulator sim(mdp, pi);

  std::vector<Vector> samples(n_rollouts);
  parallel_for(n_rollouts, [&](std::size_t i) {
    Rng rng(mix_seed(seed, i));
    Vector acc = Vector::Zero(n);
    std::vector<double> weight(n, 1.0);  // lambda(s)^{visits so far}
    int s = start;
    double discount = 1.0;
    for (int k = 0; k <= horizon; ++k) {
      acc[s] += weight[s] * discount;
      weight[s] *= lambda[s];
      discount *= gamma;
      if (k < horizon) s = sim.next(s, rng);
    }
    samples[i] = std::move(acc);
  });

  McEstimate out;
  out.horizon = horizon;
  out.n_rollouts = n_rollouts;
  out.truncation_bias = std::pow(gamma, horizon + 1) / (1.0 - lmax * gamma);
  const double N = n_rollouts;
  out.mean = pairwise_sum(samples) / N;
  std::vector<Vector> sq(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) sq[i] = (samples[i] - out.mean).array().square().matrix();
  out.se = n_rollouts > 1 ? Vector((pairwise_sum(sq) / (N - 1.0) / N).array().sqrt()) : Vector(Vector::Zero(n));
  return out;
}

McScalar mc_diminished_value(const TabularMDP& mdp, const Policy& pi, const RewardSpec& spec, int start,
                             int n_rollouts, int horizon, std::uint64_t seed) {
  check_start(mdp, start);
  if (n_rollouts <= 0) throw ConfigError("n_rollouts must be positive");
  if (spec.scheme != RewardScheme::kPureDiminish) throw UnsupportedError("only the pure scheme is supported");
  spec.validate(mdp.n_states());
  const double gamma = mdp.gamma();
  const double lmax = spec.lambda.size() > 0 ? spec.lambda.maxCoeff() : 0.0;
  if (horizon <= 0) horizon = default_truncation_horizon(gamma, lmax);
  Simulator sim(mdp, pi);

  std::vector<double> samples(n_rollouts);
  parallel_for(n_rollouts, [&](std::size_t i) {
    Rng rng(mix_seed(seed, i));
    Vector reward = spec.r_bar;
    double total = 0.0;
    double discount = 1.0;
    int s = start;
    for (int k = 0; k <= horizon; ++k) {
      total += discount * reward[s];
      reward[s] *= spec.lambda[s];
      discount *= gamma;
      if (k < horizon) s = sim.next(s, rng);
    }
    samples[i] = total;
  });
  McScalar out = summarize(samples);
  out.truncation_bias = std::pow(gamma, horizon + 1) * spec.r_bar.cwiseAbs().maxCoeff() / (1.0 - gamma);
  return out;
}

McScalar mc_set_value(const TabularMDP& mdp, const Policy& pi, int start, const std::vector<int>& set, double lambda,
                      int n_rollouts, int horizon, std::uint64_t seed) {
  check_start(mdp, start);
  if (n_rollouts <= 0) throw ConfigError("n_rollouts must be positive");
  std::vector<char> member(mdp.n_states(), 0);
  for (int x : set) {
    if (x < 0 || x >= mdp.n_states()) throw StructuralError("set member out of range");
    member[x] = 1;
  }
  const double gamma = mdp.gamma();
  if (horizon <= 0) horizon = default_truncation_horizon(gamma, 1.0);
  Simulator sim(mdp, pi);

  std::vector<double> samples(n_rollouts);
  parallel_for(n_rollouts, [&](std::size_t i) {
    Rng rng(mix_seed(seed, i));
    double total = 0.0;
    double weight = 1.0;
    double discount = 1.0;
    int s = start;
    for (int k = 0; k <= horizon; ++k) {
      if (member[s]) {
        total += weight * discount;
        weight *= lambda;
      }
      discount *= gamma;
      if (k < horizon) s = sim.next(s, rng);
    }
    samples[i] = total;
  });
  McScalar out = summarize(samples);
  out.truncation_bias = std::pow(gamma, horizon + 1) / (1.0 - gamma);
  return out;
}

double exact_diminished_value(const TabularMDP& mdp, const Policy& pi, const RewardSpec& spec, int start, int steps) {
  if (!mdp.is_deterministic()) throw UnsupportedError("exact evaluation requires a deterministic MDP");
  auto actions = pi.deterministic_actions();
  if (!actions) throw UnsupportedError("exact evaluation requires a deterministic policy");
  if (spec.scheme != RewardScheme::kPureDiminish) throw UnsupportedError("only the pure scheme is supported");
  check_start(mdp, start);
  spec.validate(mdp.n_states());
  const auto next = nominal_successor(mdp);

  std::vector<int> visits(mdp.n_states(), 0);
  double total = 0.0;
  double discount = 1.0;
  int s = start;
  for (int k = 0; k < steps; ++k) {
    total += discount * std::pow(spec.lambda[s], visits[s]) * spec.r_bar[s];
    ++visits[s];
    discount *= mdp.gamma();
    s = next[mdp.row(s, (*actions)[s])];
  }
  return total;
}

double closed_form(const std::string& case_id, double gamma, double lambda) {
  if (case_id == "self_loop") return 1.0 / (1.0 - lambda * gamma);
  if (case_id == "two_cycle_diag") return 1.0 / (1.0 - lambda * gamma * gamma);
  if (case_id == "two_cycle_off") return gamma / (1.0 - lambda * gamma * gamma);
  if (case_id == "one_step_reach") return gamma / (1.0 - lambda * gamma);
  throw ConfigError("unknown closed-form case '" + case_id + "'");
}

Matrix exact_lambda_r(const Matrix& P, double gamma, const Vector& lambda) {
  if (P.rows() != P.cols()) throw StructuralError("P must be square");
  if (lambda.size() != P.rows()) throw StructuralError("lambda must have one entry per state");
  const Eigen::Index n = P.rows();
  Matrix phi(n, n);
  for (Eigen::Index c = 0; c < n; ++c) {
    Matrix A = Matrix::Identity(n, n) - gamma * P;
    A.row(c) = -gamma * lambda[c] * P.row(c);
    A(c, c) += 1.0;
    phi.col(c) = A.partialPivLu().solve(Vector::Unit(n, c));
  }
  return phi;
}

Matrix exact_action_lambda_r(const TabularMDP& mdp, const Policy& pi, const Vector& lambda) {
  const int nS = mdp.n_states();
  const int nA = mdp.n_actions();
  const Matrix phi = exact_lambda_r(policy_transition_matrix(mdp, pi), mdp.gamma(), lambda);
  const Matrix expected = mdp.transitions() * phi;  // (SA) x S
  Matrix out = mdp.gamma() * expected;
  for (int s = 0; s < nS; ++s) {
    for (int a = 0; a < nA; ++a) {
      const Eigen::Index r = Eigen::Index(s) * nA + a;
      out(r, s) = 1.0 + mdp.gamma() * lambda[s] * expected(r, s);
    }
  }
  return out;
}

Matrix successor_representation(const Matrix& P, double gamma) {
  const Eigen::Index n = P.rows();
  const Matrix I = Matrix::Identity(n, n);
  return (I - gamma * P).partialPivLu().solve(I);
}

}  // namespace lambdarep
