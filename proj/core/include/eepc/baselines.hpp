#pragma once

// Comparison schemes and exhaustive oracles.
//
// SENGT here is a proxy: each SBS maximises its own rate under the power
// budget (water-filling) inside the same best-response loop as the EE game.

#include <cstdint>
#include <vector>

#include "eepc/ee_solver.hpp"
#include "eepc/game.hpp"
#include "eepc/metrics.hpp"
#include "eepc/scenario.hpp"

namespace eepc {

/// Rate-maximising allocation of the full budget P_t.
std::vector<double> se_best_response(const EeSubproblem& sub);

/// Best-response dynamics with se_best_response and u_k = R_k.
GameResult run_se_game(const NetworkScenario& scn, const EeParams& params,
                       const GameConfig& gcfg = {});

enum class GridObjective { system_ee, per_sbs_ee, per_sbs_rate };

inline constexpr std::uint64_t kMaxGridEvaluations = 100'000'000;

struct GridOracleConfig {
  int points_per_dim = 41;
  GridObjective objective = GridObjective::system_ee;
  int workers = 1;

  void validate() const;
};

struct GridResult {
  PowerProfile best;
  double value = 0.0;
  bool feasible = false;
  std::uint64_t evaluated = 0;
};

/// Exhaustive search of {0, d, ..., P_t}^(K*N) restricted to per-SBS budget
/// and rate feasibility. Ties go to the lexicographically smallest profile.
/// Only GridObjective::system_ee is accepted.
GridResult grid_search_system_ee(const NetworkScenario& scn, const EeParams& params,
                                 const GridOracleConfig& cfg = {});

struct CellGridResult {
  std::vector<double> best;
  double value = 0.0;
  bool feasible = false;
  std::uint64_t evaluated = 0;
};

/// Exhaustive search of one SBS's {0, d, ..., P_t}^N with the interference
/// frozen, maximising per-SBS EE or rate (budget and, for EE, rate floor
/// enforced).
CellGridResult grid_search_cell(const EeSubproblem& sub, const GridOracleConfig& cfg);

}  // namespace eepc
