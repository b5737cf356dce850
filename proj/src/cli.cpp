#include "lambdarep/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "lambdarep/acceptance.hpp"
#include "lambdarep/error.hpp"
#include "lambdarep/experiments.hpp"
#include "lambdarep/oracle.hpp"

namespace lambdarep {
namespace {

namespace fs = std::filesystem;

struct Common {
  std::uint64_t seed = 0;
  std::string out = "out";
  std::optional<double> gamma;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--seed", c.seed, "Base random seed")->capture_default_str();
  cmd->add_option("--out", c.out, "Output directory")->capture_default_str();
  cmd->add_option("--gamma", c.gamma, "Override the environment discount")->check(CLI::Range(0.0, 0.999999));
}

std::string join(const std::vector<double>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? "," : "") + format_number(xs[i]);
  return s;
}

// Collects written files and emits the run manifest last.
class Run {
 public:
  Run(std::string command, const std::vector<std::string>& args, const Common& common, std::ostream& out)
      : common_(common), out_(out) {
    manifest_.command = std::move(command);
    manifest_.argv = args;
    manifest_.seed = common.seed;
  }

  void config(const std::string& path, const std::string& text) {
    manifest_.config_path = path;
    hashed_ += text;
    manifest_.config_hash = fnv1a_hex(hashed_);
  }
  void extra_input(const std::string& text) {
    hashed_ += text;
    manifest_.config_hash = fnv1a_hex(hashed_);
  }
  void write(const std::string& name, const std::string& content) {
    write_output(common_.out, name, content);
    manifest_.outputs.push_back(name);
  }
  void finish() {
    write_output(common_.out, "manifest.json", manifest_json(manifest_));
    out_ << "wrote " << manifest_.outputs.size() << " files and manifest.json to " << common_.out << "\n";
  }

 private:
  const Common& common_;
  std::ostream& out_;
  RunManifest manifest_;
  std::string hashed_;
};

Environment load_env(const std::string& path, const Common& c, std::optional<double> noise, Run& run) {
  const std::string text = read_text_file(path);
  std::string stem = fs::path(path).stem().string();
  EnvOverrides o;
  o.gamma = c.gamma;
  o.noise_prob = noise;
  Environment env = build_environment(parse_env_config(text, stem), o);
  run.config(path, text);
  return env;
}

int first_start_state(const TabularMDP& mdp) {
  int s = 0;
  while (s + 1 < mdp.n_states() && mdp.start_distribution()[s] <= 0.0) ++s;
  return s;
}

std::string values_csv(const Vector& v) {
  std::ostringstream s;
  s << "state,value\n";
  for (Eigen::Index i = 0; i < v.size(); ++i) s << i << ',' << format_number(v[i]) << '\n';
  return s.str();
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Diminishing-reward lambda representation toolkit", "lambdarep"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  // eval
  Common eval_c;
  std::string eval_env;
  std::string eval_policy;
  double eval_lambda = 1.0;
  std::string eval_method = "dp";
  double eval_tol = 5e-2;
  int eval_episodes = 500;
  double eval_alpha = 0.1;
  auto* eval = app.add_subcommand("eval", "Evaluate a policy's lambda representation");
  add_common(eval, eval_c);
  eval->add_option("--env", eval_env, "Environment config")->required();
  eval->add_option("--policy", eval_policy, "Policy file (default: uniform)");
  eval->add_option("--lambda", eval_lambda, "Decay rate")->check(CLI::Range(0.0, 1.0))->capture_default_str();
  eval->add_option("--method", eval_method, "dp, td or lf")
      ->check(CLI::IsMember({"dp", "td", "lf"}))
      ->capture_default_str();
  eval->add_option("--tol", eval_tol, "DP residual tolerance")->check(CLI::PositiveNumber)->capture_default_str();
  eval->add_option("--episodes", eval_episodes, "TD episodes")->check(CLI::PositiveNumber)->capture_default_str();
  eval->add_option("--alpha", eval_alpha, "TD step size")->check(CLI::Range(1e-12, 1.0))->capture_default_str();

  // learn
  Common learn_c;
  std::string learn_env;
  std::vector<double> learn_lambdas{0.5, 1.0};
  int learn_episodes = 500;
  double learn_alpha = 0.1;
  int learn_seeds = 3;
  auto* learn = app.add_subcommand("learn", "Online Q_lambda-learning return curves");
  add_common(learn, learn_c);
  learn->add_option("--env", learn_env, "Environment config")->required();
  learn->add_option("--lambdas", learn_lambdas, "Agent decay grid")->delimiter(',')->check(CLI::Range(0.0, 1.0));
  learn->add_option("--episodes", learn_episodes)->check(CLI::PositiveNumber)->capture_default_str();
  learn->add_option("--alpha", learn_alpha)->check(CLI::Range(1e-12, 1.0))->capture_default_str();
  learn->add_option("--seeds", learn_seeds, "Repetitions")->check(CLI::PositiveNumber)->capture_default_str();

  // gpi
  Common gpi_c;
  std::string gpi_env;
  std::string gpi_policies;
  std::vector<double> gpi_lambdas{0.0, 0.5, 1.0};
  int gpi_episodes = 50;
  int gpi_seeds = 3;
  std::optional<double> gpi_noise;
  auto* gpi = app.add_subcommand("gpi", "GPE+GPI over a policy library for several decay guesses");
  add_common(gpi, gpi_c);
  gpi->add_option("--env", gpi_env, "Environment config")->required();
  gpi->add_option("--policies", gpi_policies, "Directory of policy files (default: paths to the targets)");
  gpi->add_option("--lambdas", gpi_lambdas, "Agent decay grid")->delimiter(',')->check(CLI::Range(0.0, 1.0));
  gpi->add_option("--episodes", gpi_episodes)->check(CLI::PositiveNumber)->capture_default_str();
  gpi->add_option("--seeds", gpi_seeds, "Repetitions")->check(CLI::PositiveNumber)->capture_default_str();
  gpi->add_option("--noise", gpi_noise, "Override the action noise")->check(CLI::Range(0.0, 1.0));

  // forage
  Common forage_c;
  std::string forage_env;
  double forage_lambda = 1.0;
  bool forage_learn = false;
  int forage_episodes = 60;
  int forage_seeds = 3;
  int forage_calibration = 30;
  auto* forage = app.add_subcommand("forage", "Foraging run with decay learning and leave-time report");
  add_common(forage, forage_c);
  forage->add_option("--env", forage_env, "Environment config")->required();
  forage->add_option("--lambda-hat", forage_lambda, "Fixed agent decay (start value when learning)")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  forage->add_flag("--learn-lambda", forage_learn, "Fit the decay online from self-transitions");
  forage->add_option("--episodes", forage_episodes)->check(CLI::PositiveNumber)->capture_default_str();
  forage->add_option("--seeds", forage_seeds, "Repetitions for the leave-time report")
      ->check(CLI::Range(3, 1000))
      ->capture_default_str();
  forage->add_option("--calibration", forage_calibration, "Episodes used to estimate R and T")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  // oracle
  Common oracle_c;
  std::string oracle_env;
  std::string oracle_policy;
  double oracle_lambda = 0.5;
  int oracle_rollouts = 10000;
  std::optional<int> oracle_start;
  auto* oracle = app.add_subcommand("oracle", "Compare DP with Monte-Carlo rollouts");
  add_common(oracle, oracle_c);
  oracle->add_option("--env", oracle_env, "Environment config")->required();
  oracle->add_option("--policy", oracle_policy, "Policy file (default: uniform)");
  oracle->add_option("--lambda", oracle_lambda)->check(CLI::Range(0.0, 1.0))->capture_default_str();
  oracle->add_option("--rollouts", oracle_rollouts)->check(CLI::PositiveNumber)->capture_default_str();
  oracle->add_option("--start", oracle_start, "Start state index");

  // check
  Common check_c;
  check_c.seed = 7;
  check_c.out.clear();
  std::vector<int> check_only;
  std::string check_configs;
  auto* check = app.add_subcommand("check", "Run the acceptance suite");
  check->add_option("--seed", check_c.seed, "Base random seed")->capture_default_str();
  check->add_option("--out", check_c.out, "Write criterion CSVs here");
  check->add_option("--only", check_only, "Criterion ids")->delimiter(',')->check(CLI::Range(1, kCriterionCount));
  check->add_option("--configs", check_configs, "Config directory");

  // rerun
  std::string rerun_manifest;
  std::string rerun_out;
  auto* rerun = app.add_subcommand("rerun", "Re-execute the command recorded in a manifest");
  rerun->add_option("--manifest", rerun_manifest)->required();
  rerun->add_option("--out", rerun_out, "Write to this directory instead of the recorded one");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (*eval) {
      Run run("eval", args, eval_c, out);
      const Environment env = load_env(eval_env, eval_c, std::nullopt, run);
      const TabularMDP& mdp = env.mdp();
      const int nS = mdp.n_states();
      Policy pi = Policy::uniform(nS, mdp.n_actions());
      if (!eval_policy.empty()) {
        const std::string text = read_text_file(eval_policy);
        pi = parse_policy(text, nS, mdp.n_actions());
        run.extra_input(text);
      }
      const Vector lam = uniform_lambda(nS, eval_lambda);
      Matrix phi;
      if (eval_method == "dp") {
        SolveOptions so;
        so.tol = eval_tol;
        const LambdaR sol = solve_lambda_r(mdp, pi, lam, so);
        phi = sol.phi;
        run.write("iterations.csv", residual_log_csv(sol.residuals));
        out << "dp converged in " << sol.iterations << " sweeps, error bound " << format_number(sol.error_bound)
            << "\n";
      } else {
        EvaluationRun er;
        er.episodes = eval_episodes;
        er.horizon = env.config.horizon;
        er.alpha = eval_alpha;
        er.seed = eval_c.seed;
        if (eval_method == "td") {
          phi = td_policy_evaluation(mdp, pi, lam, er);
        } else {
          const LinearLambdaF model =
              lambda_f_policy_evaluation(mdp, pi, Matrix::Identity(nS, nS), env.spec.r_bar, lam, er);
          phi.resize(nS, model.dim());
          for (int s = 0; s < nS; ++s) phi.row(s) = model.psi(s).transpose();
        }
      }
      run.write("lambda_r.csv", matrix_csv(phi));
      run.write("values.csv", values_csv(phi * env.spec.r_bar));
      run.finish();
    } else if (*learn) {
      Run run("learn", args, learn_c, out);
      const Environment env = load_env(learn_env, learn_c, std::nullopt, run);
      QLearnSweepOptions qo;
      qo.lambdas = learn_lambdas;
      qo.episodes = learn_episodes;
      qo.alpha = learn_alpha;
      qo.repetitions = learn_seeds;
      qo.seed = learn_c.seed;
      std::ostringstream summary;
      summary << "agent_lambda,seed,final_mean_return\n";
      for (const auto& curve : qlearn_sweep(env, qo)) {
        run.write("returns_lambda" + format_number(curve.lambda) + ".csv", return_curve_csv(curve.returns, curve.seeds));
        double mean = 0.0;
        for (std::size_t k = 0; k < curve.seeds.size(); ++k) {
          const double m = tail_mean(curve.returns[k], 100);
          mean += m / static_cast<double>(curve.seeds.size());
          summary << format_number(curve.lambda) << ',' << curve.seeds[k] << ',' << format_number(m) << '\n';
        }
        out << "agent lambda " << format_number(curve.lambda) << ": final-100 mean return " << format_number(mean)
            << "\n";
      }
      run.write("summary.csv", summary.str());
      run.finish();
    } else if (*gpi) {
      Run run("gpi", args, gpi_c, out);
      Environment env = load_env(gpi_env, gpi_c, gpi_noise, run);
      GpiSweepOptions go;
      go.lambdas = gpi_lambdas;
      go.episodes = gpi_episodes;
      go.repetitions = gpi_seeds;
      go.seed = gpi_c.seed;
      go.keep_traces = true;
      std::vector<GpiSweepEntry> entries;
      if (gpi_policies.empty()) {
        entries = gpi_sweep(env, go);
      } else {
        std::vector<fs::path> files;
        for (const auto& f : fs::directory_iterator(gpi_policies)) {
          if (f.path().extension() == ".json") files.push_back(f.path());
        }
        std::sort(files.begin(), files.end());
        if (files.empty()) throw ConfigError("no policy files in '" + gpi_policies + "'");
        std::vector<std::pair<std::string, Policy>> lib;
        for (const auto& f : files) {
          const std::string text = read_text_file(f.string());
          lib.emplace_back(f.stem().string(), parse_policy(text, env.mdp().n_states(), env.mdp().n_actions()));
          run.extra_input(text);
        }
        for (double lam : go.lambdas) {
          const PolicySet set = PolicySet::build(env.mdp(), lib, uniform_lambda(env.mdp().n_states(), lam));
          GpiSweepEntry e;
          e.lambda_hat = lam;
          for (int k = 0; k < go.repetitions; ++k) {
            GpiRunOptions ro;
            ro.episodes = go.episodes;
            ro.horizon = env.config.horizon;
            ro.seed = repetition_seed(go.seed, k);
            ro.keep_traces = k == 0;
            auto r = run_gpe_gpi(env.mdp(), env.spec, set, ro);
            e.undiscounted.insert(e.undiscounted.end(), r.undiscounted.begin(), r.undiscounted.end());
            e.discounted.insert(e.discounted.end(), r.discounted.begin(), r.discounted.end());
            e.steps.insert(e.steps.end(), r.steps.begin(), r.steps.end());
            if (k == 0) e.traces = std::move(r.traces);
          }
          e.stats = mean_and_se(e.undiscounted);
          e.discounted_stats = mean_and_se(e.discounted);
          entries.push_back(std::move(e));
        }
      }
      run.write("results.csv", results_csv(gpi_result_rows(entries, go.episodes)));
      std::ostringstream summary;
      summary << "agent_lambda,mean_return,se_return,mean_discounted,se_discounted\n";
      for (const auto& e : entries) {
        summary << format_number(e.lambda_hat) << ',' << format_number(e.stats.mean) << ','
                << format_number(e.stats.se) << ',' << format_number(e.discounted_stats.mean) << ','
                << format_number(e.discounted_stats.se) << '\n';
        run.write("trajectories_lambda" + format_number(e.lambda_hat) + ".json",
                  trajectories_json(e.traces, env.world.state_to_cell, env.world.cols));
        out << "agent lambda " << format_number(e.lambda_hat) << ": mean return " << format_number(e.stats.mean)
            << " +- " << format_number(e.stats.se) << "\n";
      }
      run.write("summary.csv", summary.str());
      run.finish();
    } else if (*forage) {
      Run run("forage", args, forage_c, out);
      const Environment env = load_env(forage_env, forage_c, std::nullopt, run);
      ForageOptions fo;
      fo.episodes = forage_episodes;
      fo.horizon = env.config.horizon;
      fo.seed = forage_c.seed;
      fo.learn_lambda = forage_learn;
      fo.lambda_hat = forage_lambda;
      const ForageResult res = run_forage(env.mdp(), env.spec, target_policies(env), fo);
      std::ostringstream trace;
      trace << "episode,lambda_hat,return_undiscounted,return_discounted\n";
      for (std::size_t e = 0; e < res.returns.size(); ++e) {
        trace << e << ',' << format_number(res.lambda_hat[e]) << ',' << format_number(res.returns[e]) << ','
              << format_number(res.discounted_returns[e]) << '\n';
      }
      run.write("lambda_trace.csv", trace.str());
      std::vector<LeaveDiffRow> rows;
      const LeaveSummary ls = leave_time_report(env.config.name, env, res.final_lambda_hat, forage_episodes,
                                                forage_seeds, forage_calibration, forage_c.seed, &rows);
      run.write("mvt_report.csv", leave_report_csv(rows));
      out << "final lambda_hat " << format_number(res.final_lambda_hat) << ", mean return "
          << format_number(mean_and_se(res.returns).mean) << "\n";
      out << "leave-time difference (agent - rule) discounted " << format_number(ls.mean_diff_discounted) << " +- "
          << format_number(ls.se_diff_discounted) << ", undiscounted " << format_number(ls.mean_diff_undiscounted)
          << " +- " << format_number(ls.se_diff_undiscounted) << " over " << ls.patches << " patches\n";
      run.finish();
    } else if (*oracle) {
      Run run("oracle", args, oracle_c, out);
      const Environment env = load_env(oracle_env, oracle_c, std::nullopt, run);
      const TabularMDP& mdp = env.mdp();
      Policy pi = Policy::uniform(mdp.n_states(), mdp.n_actions());
      if (!oracle_policy.empty()) {
        const std::string text = read_text_file(oracle_policy);
        pi = parse_policy(text, mdp.n_states(), mdp.n_actions());
        run.extra_input(text);
      }
      const int start = oracle_start.value_or(first_start_state(mdp));
      if (start < 0 || start >= mdp.n_states()) throw ConfigError("field 'start' is out of range");
      const auto agree = oracle_agreement(mdp, pi, uniform_lambda(mdp.n_states(), oracle_lambda), start,
                                          oracle_rollouts, oracle_c.seed);
      run.write("oracle.csv", agree.csv);
      out << agree.violations << "/" << agree.entries << " entries outside 3 SE + truncation bias ("
          << format_number(agree.truncation_bias) << ")\n";
      run.finish();
      return agree.violations == 0 ? kExitOk : kExitAcceptance;
    } else if (*check) {
      AcceptanceOptions ao;
      ao.seed = check_c.seed;
      ao.only = check_only;
      ao.config_dir = check_configs;
      const auto report = run_acceptance(ao, [&](const CriterionResult& r) { out << format_result_line(r) << "\n"; });
      if (!check_c.out.empty()) {
        for (const auto& [name, text] : report.artifacts) write_output(check_c.out, name, text);
      }
      out << (report.all_passed() ? "all criteria passed" : "some criteria failed") << "\n";
      return report.all_passed() ? kExitOk : kExitAcceptance;
    } else if (*rerun) {
      const RunManifest m = parse_manifest(read_text_file(rerun_manifest));
      std::vector<std::string> argv = m.argv;
      if (!rerun_out.empty()) {
        auto it = std::find(argv.begin(), argv.end(), "--out");
        if (it != argv.end() && it + 1 != argv.end()) {
          *(it + 1) = rerun_out;
        } else {
          argv.push_back("--out");
          argv.push_back(rerun_out);
        }
      }
      return run_cli(argv, out, err);
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const StructuralError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace lambdarep
