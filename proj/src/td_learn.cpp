#include "lambdarep/td_learn.hpp"

#include <algorithm>
#include <cmath>

#include "lambdarep/error.hpp"
#include "lambdarep/rng.hpp"

namespace lambdarep {
namespace {

// Uniform choice among exact ties.
int argmax_random(const Vector& q, Rng& rng) {
  const double best = q.maxCoeff();
  int ties = 0;
  int pick = 0;
  for (Eigen::Index a = 0; a < q.size(); ++a) {
    if (q[a] == best && rng.below(++ties) == 0) pick = static_cast<int>(a);
  }
  return pick;
}

Vector action_values(const Matrix& phi, int s, int n_actions, const Vector& r) {
  return phi.middleRows(Eigen::Index(s) * n_actions, n_actions) * r;
}

}  // namespace

Vector td_update_lambda_r(Matrix& phi, int row, int state, int next_row, double alpha, double gamma,
                          const Vector& lambda) {
  if (row < 0 || row >= phi.rows() || next_row < 0 || next_row >= phi.rows()) {
    throw StructuralError("row index out of range");
  }
  if (state < 0 || state >= phi.cols()) throw StructuralError("state index out of range");
  if (lambda.size() != phi.cols()) throw StructuralError("lambda must have one entry per state");
  Vector target = gamma * phi.row(next_row).transpose();
  target[state] = 1.0 + gamma * lambda[state] * phi(next_row, state);
  Vector delta = target - phi.row(row).transpose();
  phi.row(row) += alpha * delta.transpose();
  return delta;
}

void LearnerConfig::validate(int n_states) const {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ConfigError("alpha must lie in (0, 1]");
  if (lambda.size() != n_states) throw StructuralError("learner lambda must have one entry per state");
  if (n_states > 0 && (lambda.minCoeff() < 0.0 || lambda.maxCoeff() > 1.0)) {
    throw ConfigError("learner lambda entries must lie in [0, 1]");
  }
  if (episodes <= 0 || horizon <= 0) throw ConfigError("episodes and horizon must be positive");
  for (double e : {epsilon_start, epsilon_end}) {
    if (!(e >= 0.0 && e <= 1.0)) throw ConfigError("epsilon must lie in [0, 1]");
  }
  if (!(anneal_fraction >= 0.0 && anneal_fraction <= 1.0)) throw ConfigError("anneal_fraction must lie in [0, 1]");
}

double LearnerConfig::epsilon_at(int episode) const {
  const double span = anneal_fraction * episodes;
  if (span <= 0.0 || episode >= span) return epsilon_end;
  const double frac = episode / span;
  return epsilon_start + (epsilon_end - epsilon_start) * frac;
}

QLearnResult q_lambda_learning(const TabularMDP& mdp, const RewardSpec& spec, const LearnerConfig& config) {
  const int nS = mdp.n_states();
  const int nA = mdp.n_actions();
  config.validate(nS);
  spec.validate(nS);
  const double gamma = mdp.gamma();

  QLearnResult out;
  out.table.n_states = nS;
  out.table.n_actions = nA;
  out.table.lambda = config.lambda;
  out.table.gamma = gamma;
  out.table.phi = Matrix::Zero(Eigen::Index(nS) * nA, nS);
  Matrix& phi = out.table.phi;

  const auto& start = mdp.start_distribution();
  for (int e = 0; e < config.episodes; ++e) {
    Rng rng(mix_seed(config.seed, e));
    const double epsilon = config.epsilon_at(e);
    EpisodeState ep = start_episode(spec, rng.categorical(std::span<const double>(start.data(), start.size())));
    int steps = 0;
    while (!ep.terminated) {
      const int s = ep.current;
      const Vector r_t = ep.reward_vector;
      int a = rng.uniform() < epsilon ? rng.below(nA) : argmax_random(action_values(phi, s, nA, r_t), rng);
      advance(mdp, spec, ep, a, rng, config.horizon);
      const int s1 = ep.current;
      const int a1 = argmax_random(action_values(phi, s1, nA, r_t), rng);
      td_update_lambda_r(phi, s * nA + a, s, s1 * nA + a1, config.alpha, gamma, config.lambda);
      ++steps;
    }
    out.returns.push_back(ep.cumulative_return);
    out.discounted_returns.push_back(ep.discounted_return);
    out.steps.push_back(steps);
  }
  return out;
}

LinearLambdaF::LinearLambdaF(Matrix base_features, int n_actions, Vector weights)
    : features(std::move(base_features)), reward_weights(std::move(weights)) {
  if (n_actions <= 0) throw ConfigError("n_actions must be positive");
  theta.assign(n_actions, Matrix::Zero(features.cols(), features.cols()));
  validate();
}

LinearLambdaF LinearLambdaF::one_hot(int n_states, int n_actions, Vector rewards) {
  return LinearLambdaF(Matrix::Identity(n_states, n_states), n_actions, std::move(rewards));
}

void LinearLambdaF::validate() const {
  if (features.size() > 0 && (features.minCoeff() < 0.0 || features.maxCoeff() > 1.0)) {
    throw ConfigError("base features must lie in [0, 1]");
  }
  if (reward_weights.size() != features.cols()) throw StructuralError("reward weights must have dimension D");
  for (const auto& t : theta) {
    if (t.rows() != features.cols() || t.cols() != features.cols()) throw StructuralError("theta must be D x D");
  }
}

Vector lambda_f_td_update(LinearLambdaF& model, int s, int a, int s1, int a1, double alpha, double gamma,
                          const Vector& lambda) {
  const auto n_actions = static_cast<int>(model.theta.size());
  if (s < 0 || s >= model.features.rows() || s1 < 0 || s1 >= model.features.rows()) {
    throw StructuralError("state index out of range");
  }
  if (a < 0 || a >= n_actions || a1 < 0 || a1 >= n_actions) throw StructuralError("action index out of range");
  if (lambda.size() != model.dim()) throw StructuralError("lambda must have dimension D");
  const Vector f = model.features.row(s).transpose();
  const Vector next = model.psi(s1, a1);
  const Vector ones = Vector::Ones(model.dim());
  const Vector y = (f.array() * (1.0 + gamma * lambda.array() * next.array()) +
                    gamma * (ones - f).array() * next.array())
                       .matrix();
  const Vector delta = y - model.theta[a] * f;
  model.theta[a] += alpha * delta * f.transpose();
  return delta;
}

double lambda_value_td_target(const Vector& v, const Matrix& psi_table, const Vector& w, const Matrix& features, int s,
                              int s1, double gamma, const Vector& lambda) {
  const Vector f = features.row(s).transpose();
  const Vector next = psi_table.row(s1).transpose();
  const double correction = w.dot(((lambda.array() - 1.0) * f.array() * next.array()).matrix());
  return w.dot(f) + gamma * (v[s1] + correction);
}

double estimate_lambda(const std::vector<std::pair<double, double>>& pairs) {
  double num = 0.0;
  double den = 0.0;
  for (const auto& [r0, r1] : pairs) {
    num += r0 * r1;
    den += r0 * r0;
  }
  if (den == 0.0) throw NumericError("decay estimate undefined: every r_t is zero");
  return std::clamp(num / den, 0.0, 1.0);
}

LambdaEstimator::LambdaEstimator(double initial, double eta) : lambda_(std::clamp(initial, 0.0, 1.0)), eta_(eta) {
  if (!(eta > 0.0 && eta <= 1.0)) throw ConfigError("eta must lie in (0, 1]");
}

bool LambdaEstimator::update(const std::vector<std::pair<double, double>>& pairs) {
  double grad = 0.0;
  double den = 0.0;
  for (const auto& [r0, r1] : pairs) {
    grad += (r1 - lambda_ * r0) * r0;
    den += r0 * r0;
  }
  if (den == 0.0) return false;
  lambda_ = std::clamp(lambda_ + eta_ * grad / den, 0.0, 1.0);
  return true;
}

Matrix td_policy_evaluation(const TabularMDP& mdp, const Policy& pi, const Vector& lambda, const EvaluationRun& run) {
  const int n = mdp.n_states();
  if (lambda.size() != n) throw StructuralError("lambda must have one entry per state");
  if (run.episodes <= 0 || run.horizon <= 0) throw ConfigError("episodes and horizon must be positive");
  Matrix phi = Matrix::Zero(n, n);
  const auto& start = mdp.start_distribution();
  for (int e = 0; e < run.episodes; ++e) {
    Rng rng(mix_seed(run.seed, e));
    int s = rng.categorical(std::span<const double>(start.data(), start.size()));
    for (int t = 0; t < run.horizon; ++t) {
      const int a = sample_action(pi, s, rng);
      const int s1 = sample_outcome(mdp, s, a, rng).next;
      td_update_lambda_r(phi, s, s, s1, run.alpha, mdp.gamma(), lambda);
      s = s1;
    }
  }
  return phi;
}

LinearLambdaF lambda_f_policy_evaluation(const TabularMDP& mdp, const Policy& pi, const Matrix& features,
                                         const Vector& reward_weights, const Vector& lambda,
                                         const EvaluationRun& run) {
  if (features.rows() != mdp.n_states()) throw StructuralError("features must have one row per state");
  if (run.episodes <= 0 || run.horizon <= 0) throw ConfigError("episodes and horizon must be positive");
  LinearLambdaF model(features, 1, reward_weights);
  const auto& start = mdp.start_distribution();
  for (int e = 0; e < run.episodes; ++e) {
    Rng rng(mix_seed(run.seed, e));
    int s = rng.categorical(std::span<const double>(start.data(), start.size()));
    for (int t = 0; t < run.horizon; ++t) {
      const int a = sample_action(pi, s, rng);
      const int s1 = sample_outcome(mdp, s, a, rng).next;
      lambda_f_td_update(model, s, 0, s1, 0, run.alpha, mdp.gamma(), lambda);
      s = s1;
    }
  }
  return model;
}

}  // namespace lambdarep
