#include "lambdarep/config.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "lambdarep/error.hpp"

namespace lambdarep {
namespace {

using nlohmann::json;

std::pair<int, int> parse_cell_key(const std::string& key) {
  const auto comma = key.find(',');
  if (comma == std::string::npos) throw ConfigError("goal key '" + key + "' must look like \"r,c\"");
  try {
    std::size_t used_r = 0;
    std::size_t used_c = 0;
    const std::string rs = key.substr(0, comma);
    const std::string cs = key.substr(comma + 1);
    int r = std::stoi(rs, &used_r);
    int c = std::stoi(cs, &used_c);
    if (used_r != rs.size() || used_c != cs.size()) throw std::invalid_argument(key);
    return {r, c};
  } catch (const std::exception&) {
    throw ConfigError("goal key '" + key + "' must look like \"r,c\"");
  }
}

std::pair<int, int> parse_cell_array(const json& v, const std::string& field) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number_integer() || !v[1].is_number_integer()) {
    throw ConfigError("field '" + field + "' must be [row, col]");
  }
  return {v[0].get<int>(), v[1].get<int>()};
}

double number_field(const json& j, const char* field, double fallback) {
  if (!j.contains(field)) return fallback;
  if (!j[field].is_number()) throw ConfigError(std::string("field '") + field + "' must be a number");
  return j[field].get<double>();
}

int cell_index(const EnvConfig& c, std::pair<int, int> rc, const std::string& what) {
  const auto [r, col] = rc;
  if (r < 0 || r >= c.grid.rows || col < 0 || col >= c.grid.cols) {
    throw ConfigError(what + " (" + std::to_string(r) + "," + std::to_string(col) + ") lies outside the grid");
  }
  return r * c.grid.cols + col;
}

}  // namespace

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string fnv1a_hex(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : data) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

EnvConfig parse_env_config(const std::string& text, const std::string& name) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(name + ": invalid JSON: " + e.what());
  }
  if (!j.is_object()) throw ConfigError(name + ": top level must be an object");

  EnvConfig c;
  c.source = text;
  c.name = j.value("name", name);
  if (!j.contains("grid") || !j["grid"].is_array() || j["grid"].empty()) {
    throw ConfigError("field 'grid' must be a non-empty array of row strings");
  }
  const auto& rows = j["grid"];
  c.grid.rows = static_cast<int>(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (!rows[r].is_string()) throw ConfigError("grid row " + std::to_string(r) + " must be a string");
    const auto row = rows[r].get<std::string>();
    if (r == 0) c.grid.cols = static_cast<int>(row.size());
    if (static_cast<int>(row.size()) != c.grid.cols) {
      throw ConfigError("grid row " + std::to_string(r) + " has " + std::to_string(row.size()) +
                        " cells, expected " + std::to_string(c.grid.cols));
    }
    c.grid.cells += row;
  }
  if (c.grid.cols == 0) throw ConfigError("grid rows must not be empty");

  if (j.contains("goals")) {
    if (!j["goals"].is_object()) throw ConfigError("field 'goals' must be an object");
    for (const auto& [key, ann] : j["goals"].items()) {
      const int cell = cell_index(c, parse_cell_key(key), "goal");
      if (!ann.is_object()) throw ConfigError("goal (" + key + ") must be an object");
      GoalAnnotation g;
      g.reward = number_field(ann, "reward", 0.0);
      g.lambda = number_field(ann, "lambda", 1.0);
      c.grid.goal_annotations[cell] = g;
    }
  }
  c.gamma = number_field(j, "gamma", c.gamma);
  c.grid.noise_prob = number_field(j, "noise_prob", 0.0);
  c.grid.wall_penalty = number_field(j, "wall_penalty", -1.0);
  if (j.contains("start")) {
    const auto& st = j["start"];
    if (st.is_string()) {
      if (st.get<std::string>() != "uniform") throw ConfigError("field 'start' must be \"uniform\" or [row, col]");
      c.uniform_start = true;
    } else {
      c.start = parse_cell_array(st, "start");
      cell_index(c, *c.start, "start");
    }
  }
  if (j.contains("horizon")) {
    if (!j["horizon"].is_number_integer() || j["horizon"].get<int>() <= 0) {
      throw ConfigError("field 'horizon' must be a positive integer");
    }
    c.horizon = j["horizon"].get<int>();
  }
  if (j.contains("scheme")) {
    if (!j["scheme"].is_string()) throw ConfigError("field 'scheme' must be a string");
    c.scheme = parse_scheme(j["scheme"].get<std::string>());
  }
  c.lambda_d = number_field(j, "lambda_d", c.lambda_d);
  c.lambda_r = number_field(j, "lambda_r", c.lambda_r);
  c.rate_scale = number_field(j, "rate_scale", c.rate_scale);
  c.termination_threshold = number_field(j, "termination_threshold", c.termination_threshold);
  if (j.contains("policy_targets")) {
    if (!j["policy_targets"].is_array()) throw ConfigError("field 'policy_targets' must be an array");
    for (const auto& t : j["policy_targets"]) {
      auto rc = parse_cell_array(t, "policy_targets");
      cell_index(c, rc, "policy target");
      c.policy_targets.push_back(rc);
    }
  }
  if (!(c.gamma >= 0.0 && c.gamma < 1.0)) throw ConfigError("field 'gamma' must lie in [0, 1)");
  c.grid.validate();
  return c;
}

EnvConfig load_env_config(const std::string& path) {
  std::string stem = path;
  if (auto slash = stem.find_last_of('/'); slash != std::string::npos) stem = stem.substr(slash + 1);
  if (auto dot = stem.rfind('.'); dot != std::string::npos) stem = stem.substr(0, dot);
  return parse_env_config(read_text_file(path), stem);
}

Environment build_environment(const EnvConfig& config, const EnvOverrides& overrides) {
  EnvConfig c = config;
  if (overrides.gamma) c.gamma = *overrides.gamma;
  if (overrides.noise_prob) c.grid.noise_prob = *overrides.noise_prob;
  if (!(c.gamma >= 0.0 && c.gamma < 1.0)) throw ConfigError("gamma must lie in [0, 1)");

  std::vector<int> start_cells;
  if (c.start) {
    start_cells.push_back(cell_index(c, *c.start, "start"));
  } else if (c.uniform_start) {
    for (int cell = 0; cell < c.grid.rows * c.grid.cols; ++cell) {
      if (c.grid.cells[cell] != '#') start_cells.push_back(cell);
    }
  }
  GridWorld world = build_mdp_from_grid(c.grid, c.gamma, start_cells);

  RewardSpec spec = RewardSpec::pure(world.r_bar, world.lambda);
  spec.scheme = c.scheme;
  spec.lambda_d = c.lambda_d;
  spec.lambda_r = c.lambda_r;
  spec.rate_scale = c.rate_scale;
  spec.wall_penalty = c.grid.wall_penalty;
  spec.termination_threshold = c.termination_threshold;
  spec.goals = world.goal_states;
  spec.validate(world.mdp.n_states());

  std::vector<int> targets;
  for (const auto& rc : c.policy_targets) {
    const int s = world.cell_to_state[cell_index(c, rc, "policy target")];
    if (s < 0) {
      throw ConfigError("policy target (" + std::to_string(rc.first) + "," + std::to_string(rc.second) +
                        ") is a wall");
    }
    targets.push_back(s);
  }
  if (targets.empty()) targets = world.goal_states;
  return Environment{std::move(c), std::move(world), std::move(spec), std::move(targets)};
}

Policy parse_policy(const std::string& text, int n_states, int n_actions) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("policy file: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("policy file must map state index to an action-probability row");
  Matrix probs = Matrix::Constant(n_states, n_actions, 1.0 / n_actions);
  for (const auto& [key, row] : j.items()) {
    int s = -1;
    try {
      std::size_t used = 0;
      s = std::stoi(key, &used);
      if (used != key.size()) s = -1;
    } catch (const std::exception&) {
    }
    if (s < 0 || s >= n_states) throw ConfigError("policy file: state '" + key + "' is out of range");
    if (!row.is_array() || static_cast<int>(row.size()) != n_actions) {
      throw ConfigError("policy file: state " + key + " needs " + std::to_string(n_actions) + " probabilities");
    }
    for (int a = 0; a < n_actions; ++a) {
      if (!row[a].is_number()) throw ConfigError("policy file: state " + key + " has a non-numeric entry");
      probs(s, a) = row[a].get<double>();
    }
  }
  try {
    return Policy(std::move(probs));
  } catch (const Error& e) {
    throw ConfigError(std::string("policy file: ") + e.what());
  }
}

Policy load_policy_file(const std::string& path, int n_states, int n_actions) {
  return parse_policy(read_text_file(path), n_states, n_actions);
}

std::string policy_to_json(const Policy& pi) {
  json j = json::object();
  for (int s = 0; s < pi.n_states(); ++s) {
    json row = json::array();
    for (int a = 0; a < pi.n_actions(); ++a) row.push_back(pi(s, a));
    j[std::to_string(s)] = row;
  }
  return j.dump(1);
}

}  // namespace lambdarep
