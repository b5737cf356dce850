#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace lambdarep {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct AcceptanceOptions {
  std::uint64_t seed = 7;
  std::string config_dir;  // empty: default_config_dir()
  std::vector<int> only;   // empty: all criteria
};

struct AcceptanceReport {
  std::vector<CriterionResult> results;
  std::map<std::string, std::string> artifacts;  // file name -> CSV text

  bool all_passed() const;
};

inline constexpr int kCriterionCount = 14;

/// Runs the acceptance criteria in order, calling `on_result` after each one.
AcceptanceReport run_acceptance(const AcceptanceOptions& options,
                                const std::function<void(const CriterionResult&)>& on_result = {});

/// "PASS  3  contraction ...  (0.12 s)"
std::string format_result_line(const CriterionResult& result);

}  // namespace lambdarep
