#pragma once

// The numbered acceptance checks, shared by the acceptance test binary and
// `eepc verify`.

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace eepc::verify {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct AcceptanceOptions {
  /// Directory holding fig2.json, fig3.json and fig4.json.
  std::filesystem::path preset_dir;
  /// Concurrency for the preset reruns of the determinism check.
  int workers = 1;
};

inline constexpr int kCriterionCount = 12;

/// Runs one criterion (1-based id).
CriterionResult run_criterion(int id, const AcceptanceOptions& options);

/// Runs the given criteria (all when empty), calling `report` after each.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options,
                                            const std::vector<int>& ids = {},
                                            const std::function<void(const CriterionResult&)>& report = {});

/// "[PASS] 3 convexity probe (0.12 s): ..." style line.
std::string format_result(const CriterionResult& r);

}  // namespace eepc::verify
