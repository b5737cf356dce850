#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lambdarep/analysis.hpp"
#include "lambdarep/diminish.hpp"
#include "lambdarep/linalg.hpp"

namespace lambdarep {

/// Shortest round-trip-stable text for a double ("%.12g"); -0 prints as 0.
std::string format_number(double x);

/// Matrix with a header row of column indices.
std::string matrix_csv(const Matrix& m);
/// iter,max_residual
std::string residual_log_csv(const std::vector<double>& residuals);
/// t,state,action,reward[,goal_<s>...]
std::string trace_csv(const EpisodeTrace& trace, const std::vector<int>& goal_states = {});
/// episode,return,seed
std::string return_curve_csv(const std::vector<std::vector<double>>& returns_by_seed,
                             const std::vector<std::uint64_t>& seeds);

struct ResultRow {
  double agent_lambda = 0.0;
  int episode = 0;
  double return_undiscounted = 0.0;
  double return_discounted = 0.0;
  int steps = 0;
};
/// agent_lambda,episode,return_undiscounted,return_discounted,steps
std::string results_csv(const std::vector<ResultRow>& rows);

/// environment_id,seed,patch_idx,leave_diff_discounted,leave_diff_undiscounted
std::string leave_report_csv(const std::vector<LeaveDiffRow>& rows);

/// {"states":[...], "actions":[...], "rewards":[...]} for each trace; cells attached when given.
std::string trajectories_json(const std::vector<EpisodeTrace>& traces, const std::vector<int>& state_to_cell,
                              int cols);

struct RunManifest {
  std::string command;
  std::vector<std::string> argv;
  std::uint64_t seed = 0;
  std::string config_hash;
  std::string config_path;
  std::vector<std::string> outputs;
};
std::string manifest_json(const RunManifest& manifest);
RunManifest parse_manifest(const std::string& text);

/// Writes `content` to `dir/name`, creating `dir` if needed. Returns the path.
std::string write_output(const std::string& dir, const std::string& name, const std::string& content);

const char* library_version();

}  // namespace lambdarep
