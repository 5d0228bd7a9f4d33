#pragma once

// Best-response dynamics across the small cells. Every round each SBS
// computes its best response to the previous round's profile (Jacobi) or to
// the most recent responses (Gauss-Seidel); the loop stops once the summed
// absolute change of utilities, beta, drops below epsilon.

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "eepc/ee_solver.hpp"
#include "eepc/errors.hpp"
#include "eepc/metrics.hpp"
#include "eepc/scenario.hpp"

namespace eepc {

enum class UpdateSchedule { jacobi, gauss_seidel };

struct GameConfig {
  double epsilon = 1e-3;
  int max_rounds = 50;
  UpdateSchedule update_schedule = UpdateSchedule::jacobi;
  /// Starting profile; when empty every SBS starts at (P_t / 2N) per RB.
  std::optional<PowerProfile> initial_profile;
  /// Concurrent best-response solves inside a Jacobi round.
  int workers = 1;

  void validate() const;
};

struct GameRound {
  int round = 0;  // 1 is the initial profile
  std::vector<double> utilities;
  double beta = 0.0;  // 0 for the initial profile
  PowerProfile profile;
};

struct GameTrace {
  GameRound initial;
  std::vector<GameRound> rounds;  // one per best-response round
  bool converged = false;
  int rounds_used = 0;
};

/// Raised when max_rounds pass with beta >= epsilon. Carries the trace.
class NotConverged : public Error {
 public:
  NotConverged(const std::string& message, GameTrace trace)
      : Error(message), trace_(std::move(trace)) {}

  const GameTrace& trace() const noexcept { return trace_; }

 private:
  GameTrace trace_;
};

struct GameResult {
  PowerProfile profile;
  GameTrace trace;
  /// Per-cell solver diagnostics of the final round (EE game only).
  std::vector<SolverDiagnostics> diagnostics;
};

/// Best response of `cell` against `profile` (own row ignored).
using ResponseFn =
    std::function<std::vector<double>(const PowerProfile& profile, int cell)>;
/// Utility of `cell` at a full profile.
using UtilityFn = std::function<double(const PowerProfile& profile, int cell)>;

/// Generic best-response loop shared by the EE game and the SE baseline.
GameResult run_dynamics(const NetworkScenario& scn, const EeParams& params, const GameConfig& gcfg,
                        const ResponseFn& respond, const UtilityFn& utility);

/// Uniform starting profile (P_t / 2N on every RB of every cell).
PowerProfile uniform_profile(const NetworkScenario& scn, const EeParams& params);

/// The energy-efficiency game. Throws NotConverged, or InfeasibleRate with
/// the offending cell set.
GameResult run_game(const NetworkScenario& scn, const EeParams& params, const GameConfig& gcfg = {},
                    const PenaltySchedule& sched = {}, const InnerSolverConfig& inner = {});

struct NashReport {
  std::vector<double> max_improvement;  // per cell, relative EE gain
  double worst = 0.0;
  int worst_cell = -1;
  bool passed = false;
  int probes = 0;
};

/// Probes unilateral deviations inside each cell's feasible set: whole-vector
/// scalings, single-RB levels and perturbations, and pairwise power shifts.
NashReport check_nash(const NetworkScenario& scn, const PowerProfile& profile,
                      const EeParams& params, int probe_grid = 41, double tol = 5e-3);

}  // namespace eepc
