#include "lambdarep/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "lambdarep/error.hpp"
#include "lambdarep/experiments.hpp"
#include "lambdarep/oracle.hpp"
#include "lambdarep/parallel.hpp"

namespace lambdarep {
namespace {

struct Context {
  std::uint64_t seed;
  std::string config_dir;
  std::map<std::string, std::string>* artifacts;

  Environment env(const std::string& name, const EnvOverrides& o = {}) const {
    return load_named_environment(config_dir, name, o);
  }
  void save(const std::string& name, std::string content) const { (*artifacts)[name] = std::move(content); }
};

struct Verdict {
  bool passed = false;
  std::string detail;
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, x);
  return buf;
}

std::string num(double x) { return format_number(x); }

TabularMDP chain_mdp(const Matrix& P, double gamma) {
  return TabularMDP(P, 1, gamma, Vector::Unit(P.rows(), 0));
}

Matrix cycle_matrix(int n) {
  Matrix P = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) P(i, (i + 1) % n) = 1.0;
  return P;
}

// 1. Toy MDP advantage.
Verdict toy_advantage(const Context& ctx) {
  const Environment env = ctx.env("toy");
  const TabularMDP& mdp = env.mdp();
  const int left = env.world.state_at(0, 0);
  const int mid = env.world.state_at(0, 1);
  const int right = env.world.state_at(0, 2);
  std::vector<int> go_left(mdp.n_states(), kStay);
  std::vector<int> go_right(mdp.n_states(), kStay);
  go_left[mid] = kLeft;
  go_right[mid] = kRight;
  const Policy pi_left = Policy::deterministic(go_left, mdp.n_actions());
  const Policy pi_right = Policy::deterministic(go_right, mdp.n_actions());

  const double v_right = exact_diminished_value(mdp, pi_right, env.spec, right, 2);
  const double v_left = exact_diminished_value(mdp, pi_left, env.spec, left, 2);

  const std::vector<std::pair<std::string, Policy>> lib{{"left", pi_left}, {"right", pi_right}};
  SolveOptions so;
  so.tol = 1e-10;
  const PolicySet correct = PolicySet::build(mdp, lib, env.world.lambda, so);
  const PolicySet sr = PolicySet::build(mdp, lib, uniform_lambda(mdp.n_states(), 1.0), so);
  const int a_correct = gpi_action(correct, mid, env.spec.r_bar);
  const int a_sr = gpi_action(sr, mid, env.spec.r_bar);

  Verdict o;
  o.passed = std::abs(v_right - 11.94) <= 1e-9 && std::abs(v_left - 10.0) <= 1e-9 && a_correct == kRight &&
             a_sr == kLeft;
  o.detail = "right-then-stay " + num(v_right) + ", left " + num(v_left) + "; GPI with true decay picks " +
             action_name(a_correct) + ", with decay 1 picks " + action_name(a_sr);
  return o;
}

// 2. Iterate error envelope gamma^{k+1} / (1 - lambda gamma).
Verdict convergence_envelope(const Context& ctx) {
  const double gamma = 0.9;
  const std::vector<double> lambdas{0.0, 0.3, 0.7, 1.0};
  std::vector<int> violations(lambdas.size(), 0);
  std::vector<int> checked(lambdas.size(), 0);
  std::vector<double> worst(lambdas.size(), 0.0);
  for (int trial = 0; trial < 100; ++trial) {
    Rng rng(mix_seed(ctx.seed, 20000 + trial));
    const TabularMDP mdp = random_mdp(8, 3, gamma, rng);
    const Policy pi = random_policy(8, 3, rng);
    const Matrix P = policy_transition_matrix(mdp, pi);
    for (std::size_t l = 0; l < lambdas.size(); ++l) {
      const Vector lam = uniform_lambda(8, lambdas[l]);
      const Matrix exact = exact_lambda_r(P, gamma, lam);
      SolveOptions so;
      so.tol = 1e-10;
      so.keep_iterates = true;
      const LambdaR sol = solve_lambda_r(P, gamma, lam, so);
      for (std::size_t k = 0; k < sol.iterates.size(); ++k) {
        const double err = sup_norm(sol.iterates[k] - exact);
        const double bound = std::pow(gamma, static_cast<double>(k) + 1.0) / (1.0 - lambdas[l] * gamma);
        ++checked[l];
        worst[l] = std::max(worst[l], err / bound);
        if (err > bound + 1e-12) ++violations[l];
      }
    }
  }
  std::ostringstream csv;
  csv << "lambda,iterates,violations,max_error_over_bound\n";
  std::ostringstream detail;
  int total = 0;
  for (std::size_t l = 0; l < lambdas.size(); ++l) {
    csv << num(lambdas[l]) << ',' << checked[l] << ',' << violations[l] << ',' << num(worst[l]) << '\n';
    detail << (l ? "; " : "") << "lambda " << num(lambdas[l]) << ": " << violations[l] << "/" << checked[l]
           << " over, worst ratio " << fmt("%.3f", worst[l]);
    total += violations[l];
  }
  ctx.save("c02_convergence.csv", csv.str());
  return {total == 0, detail.str()};
}

// 3. Contraction in the max-entry norm.
Verdict contraction(const Context& ctx) {
  int violations = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    Rng rng(mix_seed(ctx.seed, 30000 + trial));
    const int n = 2 + rng.below(9);
    const double gamma = 0.99 * rng.uniform();
    const Matrix P = random_mdp(n, 1, gamma, rng).transitions();
    Vector lam(n);
    for (int i = 0; i < n; ++i) lam[i] = rng.uniform();
    Matrix a(n, n);
    Matrix b(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        a(i, j) = 10.0 * rng.uniform() - 5.0;
        b(i, j) = 10.0 * rng.uniform() - 5.0;
      }
    }
    const double lhs = sup_norm(apply_g_lambda(a, P, gamma, lam) - apply_g_lambda(b, P, gamma, lam));
    const double rhs = gamma * sup_norm(a - b);
    if (rhs > 0.0) worst = std::max(worst, lhs / rhs);
    if (lhs > rhs * (1.0 + 1e-12) + 1e-15) ++violations;
  }
  return {violations == 0, std::to_string(violations) + " violations in 1000 pairs, max ratio to gamma*dist " +
                               fmt("%.6f", worst)};
}

// 4. Limit identities.
Verdict limit_identities(const Context& ctx) {
  const double gamma = 0.9;
  Rng rng(mix_seed(ctx.seed, 40000));
  const TabularMDP mdp = random_mdp(6, 3, gamma, rng);
  const Policy pi = random_policy(6, 3, rng);
  SolveOptions fine;
  fine.tol = 1e-10;
  const Matrix P = policy_transition_matrix(mdp, pi);
  const double sr_err = sup_norm(solve_lambda_r(P, gamma, uniform_lambda(6, 1.0), fine).phi -
                                 successor_representation(P, gamma));

  Matrix chain = Matrix::Zero(3, 3);
  chain(0, 1) = 1.0;
  chain(1, 2) = 1.0;
  chain(2, 2) = 1.0;
  Matrix fr(3, 3);
  fr << 1.0, gamma, gamma * gamma, 0.0, 1.0, gamma, 0.0, 0.0, 1.0;
  const double fr_err = sup_norm(solve_lambda_r(chain, gamma, uniform_lambda(3, 0.0), fine).phi - fr);
  const double nr1_err = sup_norm(solve_nth_occupancy(chain, gamma, 1, fine).at(1) - fr);

  SolveOptions tight;
  tight.tol = 1e-12;
  const Matrix cyc = cycle_matrix(2);
  const double nr200_err =
      sup_norm(solve_nth_occupancy(cyc, gamma, 200, tight).at(200) - successor_representation(cyc, gamma));

  Verdict o;
  o.passed = sr_err <= 1e-6 && fr_err == 0.0 && nr1_err == 0.0 && nr200_err <= 1e-6;
  o.detail = "|lambda=1 - SR| " + num(sr_err) + ", |lambda=0 - FR| " + num(fr_err) + ", |NR(1) - FR| " +
             num(nr1_err) + ", |NR(200) - SR| " + num(nr200_err);
  return o;
}

// 5. Entry bounds, tight on the self-loop.
Verdict max_value_bound(const Context& ctx) {
  int violations = 0;
  int entries = 0;
  double worst = -1e300;
  SolveOptions fine;
  fine.tol = 1e-10;
  for (int trial = 0; trial < 100; ++trial) {
    Rng rng(mix_seed(ctx.seed, 50000 + trial));
    const int n = 2 + rng.below(7);
    const double gamma = 0.95 * rng.uniform();
    const TabularMDP mdp = random_mdp(n, 2, gamma, rng);
    const Policy pi = random_policy(n, 2, rng);
    Vector lam(n);
    for (int i = 0; i < n; ++i) lam[i] = rng.uniform();
    const Matrix phi = solve_lambda_r(mdp, pi, lam, fine).phi;
    for (int s = 0; s < n; ++s) {
      for (int c = 0; c < n; ++c) {
        const double bound = (s == c ? 1.0 : gamma) / (1.0 - lam[c] * gamma);
        ++entries;
        worst = std::max(worst, phi(s, c) - bound);
        if (phi(s, c) > bound + 1e-9 || phi(s, c) < -1e-12) ++violations;
      }
    }
  }
  SolveOptions tight;
  tight.tol = 1e-13;
  const double loop = solve_lambda_r(Matrix::Ones(1, 1), 0.9, uniform_lambda(1, 0.5), tight).phi(0, 0);
  const double loop_gap = std::abs(loop - 1.0 / (1.0 - 0.45));
  Matrix reach(2, 2);
  reach << 0.0, 1.0, 0.0, 1.0;
  const double reach_val = solve_lambda_r(reach, 0.9, uniform_lambda(2, 0.5), tight).phi(0, 1);
  const double reach_gap = std::abs(reach_val - closed_form("one_step_reach", 0.9, 0.5));
  Verdict o;
  o.passed = violations == 0 && loop_gap <= 1e-9 && reach_gap <= 1e-9;
  o.detail = std::to_string(violations) + "/" + std::to_string(entries) + " entries above the bound (max excess " +
             num(worst) + "); self-loop " + fmt("%.9f", loop) + " (gap " + num(loop_gap) + "), one-step reach gap " +
             num(reach_gap);
  return o;
}

// 6. DP vs Monte-Carlo.
Verdict oracle_agreement_check(const Context& ctx) {
  std::ostringstream detail;
  int violations = 0;
  int entries = 0;
  int stream = 0;
  for (const std::string name : {"fourrooms", "tworooms", "toy"}) {
    const Environment env = ctx.env(name);
    const TabularMDP& mdp = env.mdp();
    const Policy pi = Policy::uniform(mdp.n_states(), mdp.n_actions());
    int start = 0;
    while (mdp.start_distribution()[start] <= 0.0) ++start;
    int env_viol = 0;
    for (double lam : {0.0, 0.5, 1.0}) {
      const auto agree = oracle_agreement(mdp, pi, uniform_lambda(mdp.n_states(), lam), start, 10000,
                                          mix_seed(ctx.seed, 60000 + stream++));
      entries += agree.entries;
      env_viol += agree.violations;
      ctx.save("c06_oracle_" + name + "_lambda" + num(lam) + ".csv", agree.csv);
    }
    violations += env_viol;
    detail << name << " " << env_viol << " outside; ";
  }
  detail << violations << "/" << entries << " entries outside 3 SE + truncation bias";
  return {violations == 0, detail.str()};
}

// 7. Correct decay evaluates the policy better.
Verdict policy_evaluation_necessity(const Context& ctx) {
  const Environment env = ctx.env("policy_eval");
  const TabularMDP& mdp = env.mdp();
  const int nS = mdp.n_states();
  const Policy ring = load_policy_file(ctx.config_dir + "/policies/ring.json", nS, mdp.n_actions());
  const Vector r = env.spec.r_bar;
  const Matrix P = policy_transition_matrix(mdp, ring);
  const Vector v_true = exact_lambda_r(P, mdp.gamma(), uniform_lambda(nS, 0.5)) * r;
  auto mse = [&](const Vector& v) { return (v - v_true).squaredNorm() / nS; };

  std::ostringstream csv;
  csv << "method,seed,mse_lambda_0.5,mse_lambda_1\n";
  bool ok = true;
  std::ostringstream detail;
  SolveOptions so;
  so.tol = 1e-8;
  const double dp_correct = mse(solve_lambda_r(P, mdp.gamma(), uniform_lambda(nS, 0.5), so).phi * r);
  const double dp_sr = mse(solve_lambda_r(P, mdp.gamma(), uniform_lambda(nS, 1.0), so).phi * r);
  ok = ok && dp_correct < dp_sr;
  csv << "dp,0," << num(dp_correct) << ',' << num(dp_sr) << '\n';
  detail << "dp " << fmt("%.3g", dp_correct) << " vs " << fmt("%.3g", dp_sr);

  double td_worst_gap = 1e300;
  double lf_worst_gap = 1e300;
  for (int k = 0; k < 3; ++k) {
    EvaluationRun run;
    run.episodes = 500;
    run.horizon = env.config.horizon;
    run.alpha = 0.1;
    run.seed = repetition_seed(ctx.seed, 700 + k);
    const double td_c = mse(td_policy_evaluation(mdp, ring, uniform_lambda(nS, 0.5), run) * r);
    const double td_s = mse(td_policy_evaluation(mdp, ring, uniform_lambda(nS, 1.0), run) * r);
    const Matrix feats = Matrix::Identity(nS, nS);
    auto lf_values = [&](double lam) {
      const LinearLambdaF model = lambda_f_policy_evaluation(mdp, ring, feats, r, uniform_lambda(nS, lam), run);
      Vector v(nS);
      for (int s = 0; s < nS; ++s) v[s] = model.value(s);
      return v;
    };
    const double lf_c = mse(lf_values(0.5));
    const double lf_s = mse(lf_values(1.0));
    ok = ok && td_c < td_s && lf_c < lf_s;
    td_worst_gap = std::min(td_worst_gap, td_s - td_c);
    lf_worst_gap = std::min(lf_worst_gap, lf_s - lf_c);
    csv << "td," << run.seed << ',' << num(td_c) << ',' << num(td_s) << '\n';
    csv << "lf," << run.seed << ',' << num(lf_c) << ',' << num(lf_s) << '\n';
  }
  ctx.save("c07_policy_eval.csv", csv.str());
  detail << "; smallest mse gap over seeds: td " << fmt("%.3g", td_worst_gap) << ", lf " << fmt("%.3g", lf_worst_gap);
  return {ok, detail.str()};
}

// 8. GPI ordering on FourRooms.
Verdict gpi_ordering(const Context& ctx) {
  bool ok = true;
  std::ostringstream detail;
  for (double noise : {0.0, 0.2}) {
    EnvOverrides o;
    o.noise_prob = noise;
    const Environment env = ctx.env("fourrooms", o);
    GpiSweepOptions go;
    go.lambdas = {0.0, 0.5, 1.0};
    go.episodes = 50;
    go.repetitions = 3;
    go.seed = mix_seed(ctx.seed, 800);
    const auto entries = gpi_sweep(env, go);
    ctx.save("c08_gpi_noise" + num(noise) + ".csv", results_csv(gpi_result_rows(entries, go.episodes)));
    const auto& mid = entries[1].stats;
    for (int j : {0, 2}) {
      const auto& other = entries[j].stats;
      const double joint = std::sqrt(mid.se * mid.se + other.se * other.se);
      ok = ok && mid.mean - other.mean > joint;
    }
    detail << "noise " << num(noise) << ": ";
    for (const auto& e : entries) {
      detail << "lambda " << num(e.lambda_hat) << " " << fmt("%.2f", e.stats.mean) << "+-" << fmt("%.2f", e.stats.se)
             << (&e == &entries.back() ? "" : ", ");
    }
    detail << (noise == 0.0 ? "; " : "");
  }
  return {ok, detail.str()};
}

// 9. Transfer bound under decay mismatch.
Verdict transfer_bound(const Context& ctx) {
  const std::vector<double> grid{0.0, 0.3, 0.7, 1.0};
  int violations = 0;
  int rows = 0;
  double min_slack = 1e300;
  std::ostringstream csv;
  csv << "trial,lambda,lambda_hat,epsilon,violations,min_slack\n";
  std::string first_bad;
  for (int trial = 0; trial < 500; ++trial) {
    const std::uint64_t trial_seed = mix_seed(ctx.seed, 90000 + trial);
    Rng rng(trial_seed);
    const TabularMDP mdp = random_mdp(6, 3, 0.9, rng);
    const int n_pol = 2 + rng.below(3);
    std::vector<Policy> policies;
    for (int j = 0; j < n_pol; ++j) {
      Vector src(6);
      for (int s = 0; s < 6; ++s) src[s] = rng.uniform();
      policies.push_back(optimal_policy(mdp, src));
    }
    Vector r(6);
    for (int s = 0; s < 6; ++s) r[s] = rng.uniform();
    const double lam = grid[rng.below(4)];
    const double lam_hat = grid[rng.below(4)];
    BoundCheckOptions bo;
    bo.solve.tol = 1e-8;
    const BoundReport rep = gpi_bound_check(mdp, r, policies, lam, lam_hat, bo);
    violations += rep.violations;
    rows += static_cast<int>(rep.rows.size());
    min_slack = std::min(min_slack, rep.min_slack);
    if (rep.violations > 0 && first_bad.empty()) {
      first_bad = "; first counterexample trial " + std::to_string(trial) + " (seed " + std::to_string(trial_seed) +
                  ", lambda " + num(lam) + ", lambda_hat " + num(lam_hat) + ")";
    }
    csv << trial << ',' << num(lam) << ',' << num(lam_hat) << ',' << num(rep.epsilon) << ',' << rep.violations << ','
        << num(rep.min_slack) << '\n';
  }
  ctx.save("c09_transfer_bound.csv", csv.str());
  return {violations == 0, std::to_string(violations) + "/" + std::to_string(rows) +
                               " (s,a) pairs violate the bound over 500 trials, min slack " + fmt("%.4g", min_slack) +
                               first_bad};
}

// 10. Decay estimation.
Verdict lambda_estimation(const Context& ctx) {
  double worst = 0.0;
  for (int i = 0; i <= 10; ++i) {
    const double lam = i / 10.0;
    std::vector<std::pair<double, double>> pairs;
    double x = 10.0;
    for (int k = 0; k < 5; ++k) {
      pairs.emplace_back(x, x * lam);
      x *= lam;
    }
    worst = std::max(worst, std::abs(estimate_lambda(pairs) - lam));
  }
  const Environment env = ctx.env("fourrooms");
  const double truth = env.spec.lambda[env.spec.goal_states().front()];
  const ForageComparison cmp = forage_comparison(env, 60, 1.0, mix_seed(ctx.seed, 1000));
  std::ostringstream csv;
  csv << "episode,lambda_hat,return_learned,return_fixed\n";
  for (std::size_t e = 0; e < cmp.learned.returns.size(); ++e) {
    csv << e << ',' << num(cmp.learned.lambda_hat[e]) << ',' << num(cmp.learned.returns[e]) << ','
        << num(cmp.baseline.returns[e]) << '\n';
  }
  ctx.save("c10_forage.csv", csv.str());
  const double learned_mean = mean_and_se(cmp.learned.returns).mean;
  const double fixed_mean = mean_and_se(cmp.baseline.returns).mean;
  const double gap = std::abs(cmp.learned.final_lambda_hat - truth);
  Verdict o;
  o.passed = worst <= 1e-12 && gap < 0.05 && learned_mean >= fixed_mean;
  o.detail = "noiseless max error " + num(worst) + "; learned decay " + fmt("%.4f", cmp.learned.final_lambda_hat) +
             " vs true " + num(truth) + "; mean return learned " + fmt("%.3f", learned_mean) + " vs fixed decay 1 " +
             fmt("%.3f", fixed_mean);
  return o;
}

// 11. Strict subadditivity of the set operator.
Verdict subadditivity(const Context&) {
  bool ok = true;
  double min_gap = 1e300;
  double max_eq = 0.0;
  for (int n : {2, 3, 4, 5}) {
    const TabularMDP mdp = chain_mdp(cycle_matrix(n), 0.9);
    const Policy pi = Policy::uniform(n, 1);
    for (int b = 1; b < n; ++b) {
      for (double lam : {0.5, 1.0}) {
        const double va = lambda_set_operator(mdp, pi, 0, {0}, lam, 3000).value;
        const double vb = lambda_set_operator(mdp, pi, 0, {b}, lam, 3000).value;
        const double vab = lambda_set_operator(mdp, pi, 0, {0, b}, lam, 3000).value;
        if (lam < 1.0) {
          min_gap = std::min(min_gap, va + vb - vab);
          ok = ok && vab < va + vb;
        } else {
          max_eq = std::max(max_eq, std::abs(vab - (va + vb)));
          ok = ok && std::abs(vab - (va + vb)) <= 1e-12;
        }
      }
    }
  }
  return {ok, "lambda 0.5 smallest gap " + fmt("%.6g", min_gap) + "; lambda 1 largest deviation " + num(max_eq)};
}

// 12. Q_lambda-learning ordering on TwoRooms.
Verdict qlearning_ordering(const Context& ctx) {
  const Environment env = ctx.env("tworooms");
  QLearnSweepOptions qo;
  qo.lambdas = {0.5, 1.0};
  qo.episodes = 500;
  qo.repetitions = 3;
  qo.seed = mix_seed(ctx.seed, 1200);
  const auto curves = qlearn_sweep(env, qo);
  for (const auto& c : curves) ctx.save("c12_qlearn_lambda" + num(c.lambda) + ".csv", return_curve_csv(c.returns, c.seeds));
  bool ok = true;
  std::ostringstream detail;
  double mean_c = 0.0;
  double mean_s = 0.0;
  for (int k = 0; k < qo.repetitions; ++k) {
    const double a = tail_mean(curves[0].returns[k], 100);
    const double b = tail_mean(curves[1].returns[k], 100);
    ok = ok && a > b;
    mean_c += a / qo.repetitions;
    mean_s += b / qo.repetitions;
    detail << "seed " << k << ": " << fmt("%.2f", a) << " vs " << fmt("%.2f", b) << "; ";
  }
  detail << "mean " << fmt("%.2f", mean_c) << " vs " << fmt("%.2f", mean_s);
  return {ok, detail.str()};
}

// 13. Value TD target equals the projected feature backup.
Verdict td_target_identity(const Context& ctx) {
  double worst = 0.0;
  int transitions = 0;
  for (int trial = 0; trial < 20; ++trial) {
    Rng rng(mix_seed(ctx.seed, 130000 + trial));
    const int n = 3 + rng.below(6);
    const double gamma = 0.99 * rng.uniform();
    const TabularMDP mdp = random_mdp(n, 2, gamma, rng, 3);
    const Matrix features = Matrix::Identity(n, n);
    Matrix psi(n, n);
    Vector w(n);
    Vector lam(n);
    for (int i = 0; i < n; ++i) {
      w[i] = 2.0 * rng.uniform() - 1.0;
      lam[i] = rng.uniform();
      for (int j = 0; j < n; ++j) psi(i, j) = 2.0 * rng.uniform();
    }
    const Vector v = psi * w;
    for (int s = 0; s < n; ++s) {
      for (int a = 0; a < mdp.n_actions(); ++a) {
        for (const auto& out : mdp.outcomes(s, a)) {
          const int s1 = out.next;
          const Vector phi_s = features.row(s).transpose();
          const Vector psi1 = psi.row(s1).transpose();
          const Vector backup = phi_s.cwiseProduct(Vector::Ones(n) + gamma * lam.cwiseProduct(psi1)) +
                                gamma * (Vector::Ones(n) - phi_s).cwiseProduct(psi1);
          const double target = lambda_value_td_target(v, psi, w, features, s, s1, gamma, lam);
          worst = std::max(worst, std::abs(target - w.dot(backup)));
          ++transitions;
        }
      }
    }
  }
  return {worst <= 1e-12, std::to_string(transitions) + " transitions, max deviation " + num(worst)};
}

std::map<std::string, std::string> determinism_bundle(const Context& ctx) {
  std::map<std::string, std::string> out;
  EnvOverrides noisy;
  noisy.noise_prob = 0.2;
  const Environment four = ctx.env("fourrooms", noisy);
  GpiSweepOptions go;
  go.lambdas = {0.5, 1.0};
  go.episodes = 12;
  go.repetitions = 2;
  go.seed = ctx.seed;
  out["gpi_results.csv"] = results_csv(gpi_result_rows(gpi_sweep(four, go), go.episodes));

  const Environment two = ctx.env("tworooms");
  const auto agree = oracle_agreement(two.mdp(), Policy::uniform(two.mdp().n_states(), two.mdp().n_actions()),
                                      uniform_lambda(two.mdp().n_states(), 0.5), 0, 400, ctx.seed);
  out["oracle_tworooms.csv"] = agree.csv;

  QLearnSweepOptions qo;
  qo.lambdas = {0.5};
  qo.episodes = 25;
  qo.repetitions = 2;
  qo.seed = ctx.seed;
  const auto curves = qlearn_sweep(two, qo);
  out["qlearn_curve.csv"] = return_curve_csv(curves[0].returns, curves[0].seeds);

  std::vector<LeaveDiffRow> rows;
  leave_time_report("corridor_6", ctx.env("corridor_6"), 0.5, 4, 3, 6, ctx.seed, &rows);
  out["leave_report.csv"] = leave_report_csv(rows);
  return out;
}

// 14. Byte-identical CSVs across repeated runs and worker counts.
Verdict determinism(const Context& ctx) {
  set_worker_count(1);
  const auto first = determinism_bundle(ctx);
  set_worker_count(4);
  const auto second = determinism_bundle(ctx);
  set_worker_count(0);
  const auto third = determinism_bundle(ctx);
  int differing = 0;
  std::string names;
  for (const auto& [name, text] : first) {
    ctx.save("c14_" + name, text);
    if (second.at(name) != text || third.at(name) != text) {
      ++differing;
      names += " " + name;
    }
  }
  return {differing == 0, std::to_string(first.size()) + " CSVs compared over 3 runs (1, 4 and default workers), " +
                              std::to_string(differing) + " differ" + names};
}

struct Criterion {
  int id;
  const char* name;
  double time_limit;  // seconds, 0 = none
  Verdict (*run)(const Context&);
};

const Criterion kCriteria[] = {
    {1, "toy-mdp advantage", 1.0, toy_advantage},
    {2, "convergence envelope", 30.0, convergence_envelope},
    {3, "contraction", 0.0, contraction},
    {4, "limit identities", 0.0, limit_identities},
    {5, "max-value bound", 0.0, max_value_bound},
    {6, "oracle agreement", 120.0, oracle_agreement_check},
    {7, "policy evaluation needs the right decay", 0.0, policy_evaluation_necessity},
    {8, "gpi ordering", 120.0, gpi_ordering},
    {9, "transfer bound", 300.0, transfer_bound},
    {10, "decay estimation", 0.0, lambda_estimation},
    {11, "subadditivity", 0.0, subadditivity},
    {12, "q-lambda learning ordering", 0.0, qlearning_ordering},
    {13, "value td-target identity", 0.0, td_target_identity},
    {14, "determinism", 0.0, determinism},
};

}  // namespace

bool AcceptanceReport::all_passed() const {
  return std::all_of(results.begin(), results.end(), [](const CriterionResult& r) { return r.passed; });
}

AcceptanceReport run_acceptance(const AcceptanceOptions& options,
                                const std::function<void(const CriterionResult&)>& on_result) {
  AcceptanceReport report;
  Context ctx{options.seed, options.config_dir.empty() ? default_config_dir() : options.config_dir, &report.artifacts};
  for (const auto& c : kCriteria) {
    if (!options.only.empty() && std::find(options.only.begin(), options.only.end(), c.id) == options.only.end()) {
      continue;
    }
    CriterionResult res;
    res.id = c.id;
    res.name = c.name;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      const Verdict o = c.run(ctx);
      res.passed = o.passed;
      res.detail = o.detail;
    } catch (const std::exception& e) {
      res.passed = false;
      res.detail = std::string("error: ") + e.what();
    }
    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.time_limit > 0.0 && res.seconds >= c.time_limit) {
      res.passed = false;
      res.detail += "; exceeded the " + format_number(c.time_limit) + " s budget";
    }
    if (on_result) on_result(res);
    report.results.push_back(std::move(res));
  }
  return report;
}

std::string format_result_line(const CriterionResult& r) {
  char head[96];
  std::snprintf(head, sizeof(head), "%s %2d  %-40s", r.passed ? "PASS" : "FAIL", r.id, r.name.c_str());
  char tail[32];
  std::snprintf(tail, sizeof(tail), "  (%.2f s)", r.seconds);
  return std::string(head) + r.detail + tail;
}

}  // namespace lambdarep
