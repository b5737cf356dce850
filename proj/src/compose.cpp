#include "lambdarep/compose.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lambdarep/error.hpp"
#include "lambdarep/oracle.hpp"
#include "lambdarep/parallel.hpp"

namespace lambdarep {

PolicySet::PolicySet(int n_states, int n_actions, double gamma)
    : n_states_(n_states), n_actions_(n_actions), gamma_(gamma) {}

PolicySet PolicySet::build(const TabularMDP& mdp, const std::vector<std::pair<std::string, Policy>>& policies,
                           const Vector& lambda_hat, const SolveOptions& options) {
  PolicySet set(mdp.n_states(), mdp.n_actions(), mdp.gamma());
  std::vector<ActionLambdaR> reps(policies.size());
  parallel_for(policies.size(), [&](std::size_t j) {
    reps[j] = solve_lambda_r_actions(mdp, policies[j].second, lambda_hat, options);
  });
  for (std::size_t j = 0; j < policies.size(); ++j) set.add(policies[j].first, policies[j].second, std::move(reps[j]));
  return set;
}

void PolicySet::add(std::string name, Policy policy, ActionLambdaR rep) {
  if (policy.n_states() != n_states_ || policy.n_actions() != n_actions_ || rep.n_states != n_states_ ||
      rep.n_actions != n_actions_) {
    throw StructuralError("policy '" + name + "' does not match the set's state/action spaces");
  }
  if (rep.gamma != gamma_) throw StructuralError("policy '" + name + "' uses a different discount");
  entries_.push_back(PolicyEntry{std::move(name), std::move(policy), std::move(rep)});
}

Vector gpe(const PolicySet& set, int s, int a, const Vector& r) {
  if (r.size() != set.n_states()) throw StructuralError("reward vector length must equal |S|");
  Vector q(set.size());
  for (int j = 0; j < set.size(); ++j) q[j] = set[j].rep.row(s, a).dot(r);
  return q;
}

Matrix gpe_table(const PolicySet& set, int s, const Vector& r) {
  if (r.size() != set.n_states()) throw StructuralError("reward vector length must equal |S|");
  Matrix q(set.size(), set.n_actions());
  for (int j = 0; j < set.size(); ++j) {
    q.row(j) = (set[j].rep.phi.middleRows(Eigen::Index(s) * set.n_actions(), set.n_actions()) * r).transpose();
  }
  return q;
}

GpiChoice gpi_choice(const PolicySet& set, int s, const Vector& r) {
  if (set.size() == 0) throw StructuralError("policy set is empty");
  const Matrix q = gpe_table(set, s, r);
  GpiChoice best{0, 0, -std::numeric_limits<double>::infinity()};
  for (int a = 0; a < set.n_actions(); ++a) {
    for (int j = 0; j < set.size(); ++j) {
      if (q(j, a) > best.value) best = GpiChoice{a, j, q(j, a)};
    }
  }
  return best;
}

int gpi_action(const PolicySet& set, int s, const Vector& r) { return gpi_choice(set, s, r).action; }

Agent gpi_agent(const PolicySet& set) {
  return [&set](const EpisodeState& ep) { return gpi_action(set, ep.current, ep.reward_vector); };
}

ReturnStats mean_and_se(const std::vector<double>& values) {
  ReturnStats out;
  if (values.empty()) return out;
  const double n = static_cast<double>(values.size());
  out.mean = pairwise_sum(values) / n;
  if (values.size() > 1) {
    std::vector<double> sq(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) sq[i] = (values[i] - out.mean) * (values[i] - out.mean);
    out.se = std::sqrt(pairwise_sum(sq) / (n - 1.0) / n);
  }
  return out;
}

GpiRunResult run_gpe_gpi(const TabularMDP& mdp, const RewardSpec& spec, const PolicySet& set,
                         const GpiRunOptions& options) {
  if (options.episodes <= 0) throw ConfigError("episodes must be positive");
  if (set.n_states() != mdp.n_states() || set.n_actions() != mdp.n_actions()) {
    throw StructuralError("policy set does not match the MDP");
  }
  std::vector<EpisodeTrace> traces(options.episodes);
  const Agent agent = gpi_agent(set);
  parallel_for(options.episodes, [&](std::size_t i) {
    EpisodeOptions eo;
    eo.horizon = options.horizon;
    eo.seed = mix_seed(options.seed, i);
    traces[i] = run_episode(mdp, spec, agent, eo);
  });
  GpiRunResult out;
  for (const auto& tr : traces) {
    out.undiscounted.push_back(tr.undiscounted_return);
    out.discounted.push_back(tr.discounted_return);
    out.steps.push_back(static_cast<int>(tr.size()));
  }
  out.undiscounted_stats = mean_and_se(out.undiscounted);
  out.discounted_stats = mean_and_se(out.discounted);
  if (options.keep_traces) out.traces = std::move(traces);
  return out;
}

Policy optimal_policy(const TabularMDP& mdp, const Vector& reward) {
  const int nS = mdp.n_states();
  const int nA = mdp.n_actions();
  if (reward.size() != nS) throw StructuralError("reward vector length must equal |S|");
  const double gamma = mdp.gamma();
  Vector v = Vector::Zero(nS);
  Vector q(Eigen::Index(nS) * nA);
  for (int it = 0; it < 100000; ++it) {
    q = mdp.transitions() * v;
    Vector next(nS);
    for (int s = 0; s < nS; ++s) {
      for (int a = 0; a < nA; ++a) q[mdp.row(s, a)] = reward[s] + gamma * q[mdp.row(s, a)];
      next[s] = q.segment(Eigen::Index(s) * nA, nA).maxCoeff();
    }
    const double diff = (next - v).cwiseAbs().maxCoeff();
    v = std::move(next);
    if (diff < 1e-12 * std::max(1.0, v.cwiseAbs().maxCoeff())) break;
  }
  std::vector<int> actions(nS);
  for (int s = 0; s < nS; ++s) {
    const double best = q.segment(Eigen::Index(s) * nA, nA).maxCoeff();
    const double tie = 1e-9 * std::max(1.0, std::abs(best));
    int chosen = -1;
    double chosen_bump = std::numeric_limits<double>::infinity();
    for (int a = 0; a < nA; ++a) {
      if (q[mdp.row(s, a)] < best - tie) continue;
      double bump = 0.0;
      for (const auto& o : mdp.outcomes(s, a)) bump += o.bumped ? o.prob : 0.0;
      if (bump < chosen_bump - 1e-12) {
        chosen = a;
        chosen_bump = bump;
      }
    }
    actions[s] = chosen;
  }
  return Policy::deterministic(actions, nA);
}

Policy shortest_path_policy(const TabularMDP& mdp, int target) {
  if (target < 0 || target >= mdp.n_states()) throw StructuralError("target state out of range");
  return optimal_policy(mdp, Vector::Unit(mdp.n_states(), target));
}

BoundReport gpi_bound_check(const TabularMDP& mdp, const Vector& r, const std::vector<Policy>& policies,
                            double lambda_true, double lambda_hat, const BoundCheckOptions& options) {
  const int nS = mdp.n_states();
  const int nA = mdp.n_actions();
  if (policies.empty()) throw ConfigError("bound check needs at least one policy");
  if (r.size() != nS) throw StructuralError("reward vector length must equal |S|");
  const double gamma = mdp.gamma();
  const Vector lam = Vector::Constant(nS, lambda_true);
  const Vector lam_hat = Vector::Constant(nS, lambda_hat);

  BoundReport report;
  Vector q_max_true = Vector::Constant(Eigen::Index(nS) * nA, -std::numeric_limits<double>::infinity());
  Vector q_tilde_max = q_max_true;
  for (const auto& pi : policies) {
    const Vector q_tilde = solve_lambda_r_actions(mdp, pi, lam_hat, options.solve).phi * r;
    const Vector q_hat_exact = exact_action_lambda_r(mdp, pi, lam_hat) * r;
    const Vector q_true = exact_action_lambda_r(mdp, pi, lam) * r;
    report.epsilon = std::max(report.epsilon, (q_tilde - q_hat_exact).cwiseAbs().maxCoeff());
    q_tilde_max = q_tilde_max.cwiseMax(q_tilde);
    q_max_true = q_max_true.cwiseMax(q_true);
  }
  std::vector<int> gpi(nS);
  for (int s = 0; s < nS; ++s) {
    Eigen::Index best;
    q_tilde_max.segment(Eigen::Index(s) * nA, nA).maxCoeff(&best);
    gpi[s] = static_cast<int>(best);
  }
  const Vector q_gpi = exact_action_lambda_r(mdp, Policy::deterministic(gpi, nA), lam) * r;

  std::vector<std::pair<int, int>> pairs = options.pairs;
  if (pairs.empty()) {
    for (int s = 0; s < nS; ++s) {
      for (int a = 0; a < nA; ++a) pairs.emplace_back(s, a);
    }
  }
  const double r_inf = r.cwiseAbs().maxCoeff();
  report.min_slack = std::numeric_limits<double>::infinity();
  for (const auto& [s, a] : pairs) {
    if (s < 0 || s >= nS || a < 0 || a >= nA) throw StructuralError("bound check pair out of range");
    BoundRow row;
    row.s = s;
    row.a = a;
    row.q_gpi = q_gpi[mdp.row(s, a)];
    row.max_q_base = q_max_true[mdp.row(s, a)];
    row.epsilon_term = 2.0 * report.epsilon / (1.0 - gamma);
    row.mismatch_term = std::abs(lambda_true - lambda_hat) * r_inf / (1.0 - gamma);
    row.decay_term = gamma * (1.0 - lambda_true) * r[s] / ((1.0 - lambda_true * gamma) * (1.0 - gamma));
    row.slack = row.q_gpi - (row.max_q_base - row.epsilon_term - row.mismatch_term - row.decay_term);
    if (row.slack < 0.0) ++report.violations;
    report.min_slack = std::min(report.min_slack, row.slack);
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace lambdarep
