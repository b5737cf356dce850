#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lambdarep/diminish.hpp"
#include "lambdarep/env.hpp"

namespace lambdarep {

/// Parsed environment file:
///   { "grid": [rows], "goals": {"r,c": {"reward": x, "lambda": y}}, "gamma": g,
///     "noise_prob": p, "wall_penalty": w, "start": "uniform" | [r, c] }
/// plus optional "name", "horizon", "scheme", "lambda_d", "lambda_r", "rate_scale",
/// "termination_threshold" and "policy_targets": [[r, c], ...].
struct EnvConfig {
  std::string name;
  GridSpec grid;
  double gamma = 0.95;
  std::optional<std::pair<int, int>> start;  // empty: "uniform" or 'S' cells
  bool uniform_start = false;
  int horizon = 100;
  RewardScheme scheme = RewardScheme::kPureDiminish;
  double lambda_d = 0.5;
  double lambda_r = 0.5;
  double rate_scale = 0.1;
  double termination_threshold = 0.1;
  std::vector<std::pair<int, int>> policy_targets;
  std::string source;  // raw text, for hashing
};

EnvConfig parse_env_config(const std::string& text, const std::string& name = "env");
EnvConfig load_env_config(const std::string& path);

/// A compiled environment: grid world, reward model and planning targets.
struct Environment {
  EnvConfig config;
  GridWorld world;
  RewardSpec spec;
  std::vector<int> policy_targets;  // state indices; defaults to the goal states

  const TabularMDP& mdp() const { return world.mdp; }
};

struct EnvOverrides {
  std::optional<double> gamma;
  std::optional<double> noise_prob;
};

Environment build_environment(const EnvConfig& config, const EnvOverrides& overrides = {});

/// Policy file: JSON object mapping state index (as a string) to an action-probability row.
/// States that are not listed fall back to the uniform policy.
Policy parse_policy(const std::string& text, int n_states, int n_actions);
Policy load_policy_file(const std::string& path, int n_states, int n_actions);
std::string policy_to_json(const Policy& pi);

std::string read_text_file(const std::string& path);

/// 64-bit FNV-1a digest as 16 hex digits.
std::string fnv1a_hex(const std::string& data);

}  // namespace lambdarep
