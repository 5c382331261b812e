#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace blowuplab {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  /// Measured quantities behind the verdict.
  std::string detail;
  double seconds = 0.0;
};

struct VerificationOptions {
  /// Directory holding the cNN_*.toml scenario configs.
  std::filesystem::path config_dir = std::filesystem::path(BLOWUPLAB_CONFIG_DIR) / "acceptance";
  /// Output root; each criterion writes below work_dir/cNN.
  std::filesystem::path work_dir = "verify_out";
  /// Criteria to run (1..13); empty runs all.
  std::vector<int> only;
  /// Sweep worker cap; 0 uses worker_limit().
  int threads = 0;
};

/// Ids and short names of the acceptance criteria, in order.
const std::vector<std::pair<int, std::string>>& criterion_names();

/// Runs the selected criteria in id order and calls on_result after each.
/// Unknown ids raise ErrorKind::Usage.
std::vector<CriterionResult> run_verification(const VerificationOptions& opts,
                                              const std::function<void(const CriterionResult&)>& on_result = {});

/// "PASS  7  invariance suites  (12.3 s)  detail".
std::string format_result(const CriterionResult& r);

}  // namespace blowuplab
