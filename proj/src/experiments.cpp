#include "lambdarep/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <limits>
#include <sstream>

#include "lambdarep/error.hpp"
#include "lambdarep/oracle.hpp"

namespace lambdarep {

std::string default_config_dir() {
  if (const char* dir = std::getenv("LAMBDAREP_CONFIG_DIR"); dir && *dir) return dir;
#ifdef LAMBDAREP_CONFIG_DIR
  return LAMBDAREP_CONFIG_DIR;
#else
  return "configs";
#endif
}

Environment load_named_environment(const std::string& config_dir, const std::string& name,
                                   const EnvOverrides& overrides) {
  const auto path = std::filesystem::path(config_dir) / (name + ".json");
  return build_environment(load_env_config(path.string()), overrides);
}

std::vector<std::pair<std::string, Policy>> target_policies(const Environment& env) {
  std::vector<std::pair<std::string, Policy>> out;
  for (int s : env.policy_targets) {
    const auto [r, c] = env.world.coords(s);
    out.emplace_back("to_" + std::to_string(r) + "_" + std::to_string(c), shortest_path_policy(env.mdp(), s));
  }
  return out;
}

std::vector<GpiSweepEntry> gpi_sweep(const Environment& env, const GpiSweepOptions& options) {
  if (options.repetitions <= 0) throw ConfigError("repetitions must be positive");
  const auto policies = target_policies(env);
  std::vector<GpiSweepEntry> out;
  for (double lam : options.lambdas) {
    if (!(lam >= 0.0 && lam <= 1.0)) throw ConfigError("agent lambda must lie in [0, 1]");
    const PolicySet set = PolicySet::build(env.mdp(), policies, uniform_lambda(env.mdp().n_states(), lam), options.solve);
    GpiSweepEntry entry;
    entry.lambda_hat = lam;
    for (int k = 0; k < options.repetitions; ++k) {
      GpiRunOptions ro;
      ro.episodes = options.episodes;
      ro.horizon = env.config.horizon;
      ro.seed = repetition_seed(options.seed, k);
      ro.keep_traces = options.keep_traces && k == 0;
      auto run = run_gpe_gpi(env.mdp(), env.spec, set, ro);
      entry.undiscounted.insert(entry.undiscounted.end(), run.undiscounted.begin(), run.undiscounted.end());
      entry.discounted.insert(entry.discounted.end(), run.discounted.begin(), run.discounted.end());
      entry.steps.insert(entry.steps.end(), run.steps.begin(), run.steps.end());
      if (ro.keep_traces) entry.traces = std::move(run.traces);
    }
    entry.stats = mean_and_se(entry.undiscounted);
    entry.discounted_stats = mean_and_se(entry.discounted);
    out.push_back(std::move(entry));
  }
  return out;
}

std::vector<ResultRow> gpi_result_rows(const std::vector<GpiSweepEntry>& entries, int episodes_per_repetition) {
  std::vector<ResultRow> rows;
  for (const auto& e : entries) {
    for (std::size_t i = 0; i < e.undiscounted.size(); ++i) {
      rows.push_back(ResultRow{e.lambda_hat, static_cast<int>(i % episodes_per_repetition), e.undiscounted[i],
                               e.discounted[i], e.steps[i]});
    }
  }
  return rows;
}

std::vector<QLearnCurve> qlearn_sweep(const Environment& env, const QLearnSweepOptions& options) {
  std::vector<QLearnCurve> out;
  const int nS = env.mdp().n_states();
  for (double lam : options.lambdas) {
    QLearnCurve curve;
    curve.lambda = lam;
    for (int k = 0; k < options.repetitions; ++k) {
      LearnerConfig cfg;
      cfg.alpha = options.alpha;
      cfg.lambda = uniform_lambda(nS, lam);
      cfg.episodes = options.episodes;
      cfg.horizon = env.config.horizon;
      cfg.seed = repetition_seed(options.seed, k);
      curve.seeds.push_back(cfg.seed);
      curve.returns.push_back(q_lambda_learning(env.mdp(), env.spec, cfg).returns);
    }
    out.push_back(std::move(curve));
  }
  return out;
}

double tail_mean(const std::vector<double>& values, int count) {
  if (values.empty()) return 0.0;
  const std::size_t n = std::min<std::size_t>(values.size(), static_cast<std::size_t>(std::max(count, 1)));
  double s = 0.0;
  for (std::size_t i = values.size() - n; i < values.size(); ++i) s += values[i];
  return s / static_cast<double>(n);
}

OracleAgreement oracle_agreement(const TabularMDP& mdp, const Policy& pi, const Vector& lambda, int start,
                                 int rollouts, std::uint64_t seed, double dp_tol) {
  SolveOptions so;
  so.tol = dp_tol;
  const LambdaR dp = solve_lambda_r(mdp, pi, lambda, so);
  const McEstimate mc = mc_lambda_r(mdp, pi, lambda, start, rollouts, 0, seed);
  OracleAgreement out;
  out.truncation_bias = mc.truncation_bias;
  out.max_excess = -std::numeric_limits<double>::infinity();
  std::ostringstream csv;
  csv << "column,dp,mc_mean,mc_se\n";
  for (int c = 0; c < mdp.n_states(); ++c) {
    const double d = dp.phi(start, c);
    const double excess = std::abs(d - mc.mean[c]) - (3.0 * mc.se[c] + mc.truncation_bias);
    ++out.entries;
    if (excess > 0.0) ++out.violations;
    out.max_excess = std::max(out.max_excess, excess);
    csv << c << ',' << format_number(d) << ',' << format_number(mc.mean[c]) << ',' << format_number(mc.se[c]) << '\n';
  }
  out.csv = csv.str();
  return out;
}

ForageComparison forage_comparison(const Environment& env, int episodes, double baseline_lambda, std::uint64_t seed) {
  const auto policies = target_policies(env);
  ForageOptions fo;
  fo.episodes = episodes;
  fo.horizon = env.config.horizon;
  fo.seed = seed;
  fo.learn_lambda = true;
  fo.lambda_hat = 1.0;
  ForageComparison out;
  out.learned = run_forage(env.mdp(), env.spec, policies, fo);
  fo.learn_lambda = false;
  fo.lambda_hat = baseline_lambda;
  out.baseline = run_forage(env.mdp(), env.spec, policies, fo);
  return out;
}

LeaveSummary leave_time_report(const std::string& environment_id, const Environment& env, double lambda_hat,
                               int episodes, int repetitions, int calibration, std::uint64_t seed,
                               std::vector<LeaveDiffRow>* rows) {
  const auto policies = target_policies(env);
  ForageOptions fo;
  fo.horizon = env.config.horizon;
  fo.lambda_hat = lambda_hat;
  fo.episodes = calibration;
  fo.seed = mix_seed(seed, 999);
  const MvtParams params = calibrate_mvt(run_forage(env.mdp(), env.spec, policies, fo).traces, 0.99);
  std::vector<std::vector<EpisodeTrace>> by_seed;
  fo.episodes = episodes;
  for (int k = 0; k < repetitions; ++k) {
    fo.seed = repetition_seed(seed, k);
    by_seed.push_back(run_forage(env.mdp(), env.spec, policies, fo).traces);
  }
  return agent_vs_mvt(environment_id, by_seed, env.spec, params, rows);
}

}  // namespace lambdarep
