#pragma once

// JSON documents for scenarios, solver diagnostics and game traces, and the
// per-round trace CSV. Every document carries `format_version`.

#include <ostream>
#include <string>
#include <string_view>

#include "eepc/ee_solver.hpp"
#include "eepc/game.hpp"
#include "eepc/scenario.hpp"

namespace eepc {

inline constexpr int kFormatVersion = 1;

/// Positions, RB assignment, gains and a config echo. Scenarios built with
/// from_gains are written with a null geometry.
std::string scenario_to_json(const NetworkScenario& scn, int indent = 2);

/// Rebuilds a scenario. With geometry present the gains are recomputed from
/// positions and must match the stored ones; otherwise the stored gains are
/// used as-is. Throws ValidationError naming the offending field.
NetworkScenario scenario_from_json(std::string_view text);

std::string diagnostics_to_json(const SolverDiagnostics& diag, int indent = 2);
SolverDiagnostics diagnostics_from_json(std::string_view text);

std::string trace_to_json(const GameTrace& trace, int indent = 2);
GameTrace trace_from_json(std::string_view text);

/// Writes `round,k,u_k,beta` with a header line; round 1 is the initial
/// profile (beta 0).
void write_trace_csv(std::ostream& out, const GameTrace& trace);

/// Shortest decimal form that round-trips; "nan" / "inf" / "-inf" otherwise.
std::string format_number(double value);

}  // namespace eepc
