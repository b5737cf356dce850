#include "lambdarep/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "lambdarep/error.hpp"

namespace lambdarep {

const char* library_version() { return "0.3.0"; }

std::string format_number(double x) {
  if (x == 0.0) return "0";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

std::string matrix_csv(const Matrix& m) {
  std::ostringstream out;
  out << "row";
  for (Eigen::Index c = 0; c < m.cols(); ++c) out << ',' << c;
  out << '\n';
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    out << r;
    for (Eigen::Index c = 0; c < m.cols(); ++c) out << ',' << format_number(m(r, c));
    out << '\n';
  }
  return out.str();
}

std::string residual_log_csv(const std::vector<double>& residuals) {
  std::ostringstream out;
  out << "iter,max_residual\n";
  for (std::size_t i = 0; i < residuals.size(); ++i) out << i + 1 << ',' << format_number(residuals[i]) << '\n';
  return out.str();
}

std::string trace_csv(const EpisodeTrace& trace, const std::vector<int>& goal_states) {
  std::ostringstream out;
  out << "t,state,action,reward";
  for (int g : goal_states) out << ",goal_" << g;
  out << '\n';
  for (const auto& rec : trace.records) {
    out << rec.t << ',' << rec.state << ',' << rec.action << ',' << format_number(rec.reward);
    for (std::size_t i = 0; i < goal_states.size(); ++i) {
      out << ',' << (i < rec.goal_rewards.size() ? format_number(rec.goal_rewards[i]) : "");
    }
    out << '\n';
  }
  return out.str();
}

std::string return_curve_csv(const std::vector<std::vector<double>>& returns_by_seed,
                             const std::vector<std::uint64_t>& seeds) {
  if (returns_by_seed.size() != seeds.size()) throw StructuralError("one seed per return curve is required");
  std::ostringstream out;
  out << "episode,return,seed\n";
  for (std::size_t k = 0; k < seeds.size(); ++k) {
    for (std::size_t e = 0; e < returns_by_seed[k].size(); ++e) {
      out << e << ',' << format_number(returns_by_seed[k][e]) << ',' << seeds[k] << '\n';
    }
  }
  return out.str();
}

std::string results_csv(const std::vector<ResultRow>& rows) {
  std::ostringstream out;
  out << "agent_lambda,episode,return_undiscounted,return_discounted,steps\n";
  for (const auto& r : rows) {
    out << format_number(r.agent_lambda) << ',' << r.episode << ',' << format_number(r.return_undiscounted) << ','
        << format_number(r.return_discounted) << ',' << r.steps << '\n';
  }
  return out.str();
}

std::string leave_report_csv(const std::vector<LeaveDiffRow>& rows) {
  std::ostringstream out;
  out << "environment_id,seed,patch_idx,leave_diff_discounted,leave_diff_undiscounted\n";
  for (const auto& r : rows) {
    out << r.environment << ',' << r.seed << ',' << r.patch_idx << ',' << r.leave_diff_discounted << ','
        << r.leave_diff_undiscounted << '\n';
  }
  return out.str();
}

std::string trajectories_json(const std::vector<EpisodeTrace>& traces, const std::vector<int>& state_to_cell,
                              int cols) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& tr : traces) {
    nlohmann::json states = nlohmann::json::array();
    nlohmann::json actions = nlohmann::json::array();
    nlohmann::json rewards = nlohmann::json::array();
    nlohmann::json cells = nlohmann::json::array();
    for (const auto& rec : tr.records) {
      states.push_back(rec.state);
      actions.push_back(rec.action);
      rewards.push_back(rec.reward);
      if (!state_to_cell.empty() && cols > 0) {
        const int cell = state_to_cell[rec.state];
        cells.push_back({cell / cols, cell % cols});
      }
    }
    nlohmann::json item = {{"states", states}, {"actions", actions}, {"rewards", rewards},
                           {"undiscounted_return", tr.undiscounted_return},
                           {"discounted_return", tr.discounted_return}};
    if (!cells.empty()) item["cells"] = cells;
    arr.push_back(item);
  }
  return arr.dump() + "\n";
}

std::string manifest_json(const RunManifest& m) {
  nlohmann::json j = {{"command", m.command},
                      {"argv", m.argv},
                      {"seed", m.seed},
                      {"config_hash", m.config_hash},
                      {"config_path", m.config_path},
                      {"outputs", m.outputs},
                      {"version", library_version()}};
  return j.dump(2) + "\n";
}

RunManifest parse_manifest(const std::string& text) {
  RunManifest m;
  try {
    const auto j = nlohmann::json::parse(text);
    m.command = j.at("command").get<std::string>();
    m.argv = j.at("argv").get<std::vector<std::string>>();
    m.seed = j.value("seed", std::uint64_t{0});
    m.config_hash = j.value("config_hash", std::string());
    m.config_path = j.value("config_path", std::string());
    m.outputs = j.value("outputs", std::vector<std::string>{});
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("manifest: ") + e.what());
  }
  return m;
}

std::string write_output(const std::string& dir, const std::string& name, const std::string& content) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + dir + "': " + ec.message());
  const std::string path = (std::filesystem::path(dir) / name).string();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << content;
  return path;
}

}  // namespace lambdarep
