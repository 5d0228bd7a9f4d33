#pragma once

// Sweep experiments: parse a JSON spec, run every (scheme, sweep value,
// seed) combination on a worker pool, and write a sorted results CSV plus
// one JSON record per run.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "eepc/ee_solver.hpp"
#include "eepc/game.hpp"
#include "eepc/metrics.hpp"
#include "eepc/scenario.hpp"

namespace eepc {

enum class Scheme { eengt, sengt, exhaustive };
enum class SweepVariable { p_max_dbm, n_sues_per_cell };

std::string_view to_string(Scheme s) noexcept;
std::string_view to_string(SweepVariable v) noexcept;

/// Exhaustive search is refused above this many power variables (K * N).
inline constexpr int kMaxExhaustiveDims = 6;

struct SweepSpec {
  SweepVariable variable = SweepVariable::p_max_dbm;
  std::vector<double> values;
};

struct ExperimentSpec {
  std::string name;
  ScenarioConfig scenario;
  EeParams params;
  GameConfig game;
  PenaltySchedule penalty;
  InnerSolverConfig inner;
  int exhaustive_points = 41;
  SweepSpec sweep;
  std::vector<Scheme> schemes;
  std::vector<std::uint64_t> seeds;
  /// When true, runs that stop on InfeasibleRate do not fail the experiment.
  bool allow_infeasible = false;
  std::string output_dir = "results";

  /// Throws ValidationError with a dotted field path.
  void validate() const;

  /// Scenario and parameters for one sweep point and seed.
  ScenarioConfig scenario_for(double value, std::uint64_t seed) const;
  EeParams params_for(double value) const;
};

ExperimentSpec parse_experiment_spec(std::string_view json_text);
ExperimentSpec load_experiment_spec(const std::filesystem::path& path);

enum class RunStatus { converged, not_converged, infeasible, solver_failure };
std::string_view to_string(RunStatus s) noexcept;

struct RunRecord {
  std::string id;
  Scheme scheme = Scheme::eengt;
  SweepVariable sweep_var = SweepVariable::p_max_dbm;
  double value = 0.0;
  std::uint64_t seed = 0;
  RunStatus status = RunStatus::converged;
  std::string message;
  double system_ee = 0.0;
  double system_se = 0.0;
  int rounds = 0;
  bool converged = false;
  PowerProfile profile;
  std::optional<GameTrace> trace;
  std::vector<SolverDiagnostics> diagnostics;
  std::string scenario_json;
};

struct ExperimentResult {
  /// Sorted by (scheme name, value, seed).
  std::vector<RunRecord> runs;

  /// 0 when every run converged or stopped on an allowed infeasibility,
  /// 2 otherwise.
  int exit_code(bool allow_infeasible) const noexcept;
};

std::string run_id(Scheme scheme, SweepVariable var, double value, std::uint64_t seed);

/// Runs one combination. Never throws for solver outcomes; they are
/// recorded in RunRecord::status.
RunRecord run_single(const ExperimentSpec& spec, Scheme scheme, double value, std::uint64_t seed);

/// Runs the whole sweep with at most `workers` concurrent runs.
ExperimentResult run_experiment(const ExperimentSpec& spec, int workers);

/// Worker cap from EEPC_WORKERS, else `fallback`. Throws ValidationError on
/// a malformed value.
int worker_cap_from_env(int fallback);

/// Results CSV. The optional `comment` is written as a leading `#` line and
/// is the only part allowed to differ between identical runs.
void write_results_csv(std::ostream& out, const ExperimentSpec& spec, const ExperimentResult& result,
                       const std::string& comment = {});

std::string run_record_to_json(const RunRecord& run, const ExperimentSpec& spec, int indent = 2);

/// Reads a record written by run_record_to_json. Throws ValidationError.
RunRecord run_record_from_json(std::string_view text);

/// Writes `results.csv` and `traces/<id>.json` under `dir`.
void write_experiment_outputs(const std::filesystem::path& dir, const ExperimentSpec& spec,
                              const ExperimentResult& result, const std::string& comment = {});

}  // namespace eepc
