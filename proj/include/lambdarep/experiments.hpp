#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "lambdarep/analysis.hpp"
#include "lambdarep/compose.hpp"
#include "lambdarep/config.hpp"
#include "lambdarep/io.hpp"
#include "lambdarep/td_learn.hpp"

namespace lambdarep {

/// Directory holding the shipped configs: $LAMBDAREP_CONFIG_DIR, else the source tree's configs/.
std::string default_config_dir();
Environment load_named_environment(const std::string& config_dir, const std::string& name,
                                   const EnvOverrides& overrides = {});

/// Shortest-path policies to each of the environment's policy targets, named "to_<r>_<c>".
std::vector<std::pair<std::string, Policy>> target_policies(const Environment& env);

/// Seed of repetition k of an experiment.
inline std::uint64_t repetition_seed(std::uint64_t seed, int k) { return mix_seed(seed, 1000 + k); }

struct GpiSweepOptions {
  std::vector<double> lambdas{0.0, 0.5, 1.0};
  int episodes = 50;
  int repetitions = 3;
  std::uint64_t seed = 0;
  bool keep_traces = false;  // first repetition only
  SolveOptions solve{};
};

struct GpiSweepEntry {
  double lambda_hat = 0.0;
  std::vector<double> undiscounted;  // all repetitions, in order
  std::vector<double> discounted;
  std::vector<int> steps;
  ReturnStats stats;
  ReturnStats discounted_stats;
  std::vector<EpisodeTrace> traces;
};

/// GPE+GPI over the target policies for each decay guess; the environment's reward spec is the truth.
std::vector<GpiSweepEntry> gpi_sweep(const Environment& env, const GpiSweepOptions& options);
std::vector<ResultRow> gpi_result_rows(const std::vector<GpiSweepEntry>& entries, int episodes_per_repetition);

struct QLearnSweepOptions {
  std::vector<double> lambdas{0.5, 1.0};
  int episodes = 500;
  int repetitions = 3;
  double alpha = 0.1;
  std::uint64_t seed = 0;
};

struct QLearnCurve {
  double lambda = 0.0;
  std::vector<std::uint64_t> seeds;
  std::vector<std::vector<double>> returns;  // per repetition
};

std::vector<QLearnCurve> qlearn_sweep(const Environment& env, const QLearnSweepOptions& options);

/// Mean of the last `count` entries (all of them if fewer).
double tail_mean(const std::vector<double>& values, int count);

struct OracleAgreement {
  int entries = 0;
  int violations = 0;
  double max_excess = 0.0;  // largest |dp - mc| - (3 se + bias); <= 0 when all agree
  double truncation_bias = 0.0;
  std::string csv;          // column,dp,mc_mean,mc_se
};

/// Compares the DP representation row Phi(start, .) with a Monte-Carlo estimate.
OracleAgreement oracle_agreement(const TabularMDP& mdp, const Policy& pi, const Vector& lambda, int start,
                                 int rollouts, std::uint64_t seed, double dp_tol = 1e-10);

struct ForageComparison {
  ForageResult learned;
  ForageResult baseline;  // fixed decay guess
};

ForageComparison forage_comparison(const Environment& env, int episodes, double baseline_lambda, std::uint64_t seed);

/// Agent-vs-rule leave-time report: calibrates R and T on `calibration` episodes, then
/// collects `episodes` per repetition from a GPE+GPI agent with decay `lambda_hat`.
LeaveSummary leave_time_report(const std::string& environment_id, const Environment& env, double lambda_hat,
                               int episodes, int repetitions, int calibration, std::uint64_t seed,
                               std::vector<LeaveDiffRow>* rows);

}  // namespace lambdarep
