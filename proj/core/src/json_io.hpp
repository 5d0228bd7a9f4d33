#pragma once

// nlohmann/json conversions shared by the serialization and experiment
// sources. Not installed; public headers expose strings and streams only.

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "eepc/ee_solver.hpp"
#include "eepc/errors.hpp"
#include "eepc/game.hpp"
#include "eepc/metrics.hpp"
#include "eepc/scenario.hpp"

namespace eepc::detail {

using nlohmann::json;

/// Strict reader for one JSON object. Field errors carry dotted paths and
/// finish() rejects keys that were never read.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path);

  bool has(const char* key) const { return j_.contains(key); }
  std::string field(const char* key) const;
  const json& at(const char* key);

  void get(const char* key, double& out);
  void get(const char* key, int& out);
  void get(const char* key, std::uint64_t& out);
  void get(const char* key, bool& out);
  void get(const char* key, std::string& out);
  void get(const char* key, std::optional<double>& out);

  /// Like get(), but a missing key is a validation error.
  template <typename T>
  void require(const char* key, T& out) {
    if (!has(key)) throw ValidationError(field(key), "is required");
    get(key, out);
  }

  void finish() const;

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

double number_at(const json& j, const std::string& path);
std::vector<double> number_array(const json& j, const std::string& path);

json to_json(const ScenarioConfig& c);
ScenarioConfig scenario_config_from_json(const json& j, const std::string& path);

json to_json(const EeParams& p);
/// Accepts p_max_w or p_max_dbm (not both).
EeParams ee_params_from_json(const json& j, const std::string& path);

json to_json(const PenaltySchedule& s);
PenaltySchedule penalty_from_json(const json& j, const std::string& path);

json to_json(const InnerSolverConfig& c);
InnerSolverConfig inner_from_json(const json& j, const std::string& path);

json to_json(const GameConfig& g);
GameConfig game_config_from_json(const json& j, const std::string& path);

json to_json(const PowerProfile& p);
PowerProfile profile_from_json(const json& j, const std::string& path);

json to_json(const SolverDiagnostics& d);
SolverDiagnostics diagnostics_from_json(const json& j, const std::string& path);

json to_json(const GameTrace& t);
GameTrace trace_from_json(const json& j, const std::string& path);

json to_json(const NetworkScenario& s);
NetworkScenario scenario_from_json(const json& j, const std::string& path);

/// Parses text, turning syntax errors into ValidationError("<document>").
json parse(std::string_view text);

}  // namespace eepc::detail
