#include "eepc/serialization.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "eepc/errors.hpp"
#include "json.hpp"

namespace eepc {
namespace {

using nlohmann::json;

NetworkScenario sample_scenario() {
  ScenarioConfig c;
  c.k_cells = 3;
  c.n_rbs = 4;
  c.n_sues_per_cell = 2;
  c.seed = 77;
  return generate(c);
}

std::string field_of_failure(const std::string& text) {
  try {
    scenario_from_json(text);
  } catch (const ValidationError& e) {
    return e.field();
  }
  return {};
}

TEST(ScenarioJson, RoundTripWithGeometry) {
  const auto s = sample_scenario();
  const auto back = scenario_from_json(scenario_to_json(s));
  ASSERT_TRUE(back.has_geometry());
  EXPECT_EQ(back.k_cells(), s.k_cells());
  EXPECT_EQ(back.n_rbs(), s.n_rbs());
  EXPECT_EQ(back.noise_w(), s.noise_w());
  ASSERT_EQ(back.gains().size(), s.gains().size());
  for (std::size_t i = 0; i < s.gains().size(); ++i) EXPECT_EQ(back.gains()[i], s.gains()[i]);
  EXPECT_EQ(back.rb_assignment(), s.rb_assignment());
  EXPECT_EQ(back.config().seed, 77u);
  EXPECT_EQ(scenario_to_json(back), scenario_to_json(s));
}

TEST(ScenarioJson, RoundTripWithoutGeometry) {
  const auto s = NetworkScenario::from_gains(1, 2, {1e-9, 2e-9, 1e-5, 3e-5}, 1e-12, {0.05, 0.05}, 180e3);
  const auto text = scenario_to_json(s);
  EXPECT_TRUE(json::parse(text).at("geometry").is_null());
  const auto back = scenario_from_json(text);
  EXPECT_FALSE(back.has_geometry());
  EXPECT_EQ(back.bandwidth_hz(), 180e3);
  EXPECT_EQ(back.gain(1, 0, 1), 3e-5);
  EXPECT_EQ(back.mbs_power_w(1), 0.05);
}

TEST(ScenarioJson, VersionIsChecked) {
  auto j = json::parse(scenario_to_json(sample_scenario()));
  j["format_version"] = 99;
  EXPECT_EQ(field_of_failure(j.dump()), "format_version");
  j.erase("format_version");
  EXPECT_EQ(field_of_failure(j.dump()), "format_version");
}

TEST(ScenarioJson, TamperedGainIsRejected) {
  auto j = json::parse(scenario_to_json(sample_scenario()));
  j["gains"][5] = j["gains"][5].get<double>() * 1.001;
  EXPECT_EQ(field_of_failure(j.dump()).rfind("gains", 0), 0u);
}

TEST(ScenarioJson, MalformedDocuments) {
  EXPECT_THROW(scenario_from_json("{not json"), ValidationError);
  EXPECT_THROW(scenario_from_json("[]"), ValidationError);
  auto j = json::parse(scenario_to_json(sample_scenario()));
  j["surprise"] = 1;
  EXPECT_EQ(field_of_failure(j.dump()), "surprise");
}

TEST(DiagnosticsJson, RoundTrip) {
  SolverDiagnostics d;
  d.outer_rounds = 9;
  d.inner_iterations = 314;
  d.final_gradient_norm = 1.25e-9;
  d.equality_violation = -3.5e-8;
  d.inner_cap_hit = true;
  d.equality_history = {0.1, 1e-3, 3.5e-8};
  d.inner_history = {100, 200, 14};
  const auto back = diagnostics_from_json(diagnostics_to_json(d));
  EXPECT_EQ(back.outer_rounds, 9);
  EXPECT_EQ(back.inner_iterations, 314);
  EXPECT_EQ(back.final_gradient_norm, 1.25e-9);
  EXPECT_EQ(back.equality_violation, -3.5e-8);
  EXPECT_TRUE(back.inner_cap_hit);
  EXPECT_EQ(back.equality_history, d.equality_history);
  EXPECT_EQ(back.inner_history, d.inner_history);
  EXPECT_EQ(json::parse(diagnostics_to_json(d)).at("format_version"), kFormatVersion);
}

GameTrace sample_trace() {
  const auto scn = sample_scenario();
  return run_game(scn, EeParams{}).trace;
}

TEST(TraceJson, RoundTrip) {
  const auto t = sample_trace();
  const auto back = trace_from_json(trace_to_json(t));
  EXPECT_EQ(back.converged, t.converged);
  EXPECT_EQ(back.rounds_used, t.rounds_used);
  EXPECT_EQ(back.initial.utilities, t.initial.utilities);
  EXPECT_EQ(back.initial.profile, t.initial.profile);
  ASSERT_EQ(back.rounds.size(), t.rounds.size());
  for (std::size_t r = 0; r < t.rounds.size(); ++r) {
    EXPECT_EQ(back.rounds[r].round, t.rounds[r].round);
    EXPECT_EQ(back.rounds[r].beta, t.rounds[r].beta);
    EXPECT_EQ(back.rounds[r].utilities, t.rounds[r].utilities);
    EXPECT_EQ(back.rounds[r].profile, t.rounds[r].profile);
  }
}

TEST(TraceJson, RequiresVersion) {
  auto j = json::parse(trace_to_json(sample_trace()));
  j.erase("format_version");
  EXPECT_THROW(trace_from_json(j.dump()), ValidationError);
}

TEST(TraceCsv, OneRowPerRoundAndCell) {
  const auto t = sample_trace();
  std::ostringstream out;
  write_trace_csv(out, t);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "round,k,u_k,beta");
  int rows = 0;
  while (std::getline(in, line)) {
    std::istringstream cells(line);
    std::string round, k, u, beta;
    std::getline(cells, round, ',');
    std::getline(cells, k, ',');
    std::getline(cells, u, ',');
    std::getline(cells, beta, ',');
    const int r = rows / 3;
    const auto& g = r == 0 ? t.initial : t.rounds[static_cast<std::size_t>(r - 1)];
    EXPECT_EQ(std::stoi(round), g.round);
    EXPECT_EQ(std::stoi(k), rows % 3);
    EXPECT_EQ(std::stod(u), g.utilities[static_cast<std::size_t>(rows % 3)]);
    EXPECT_EQ(std::stod(beta), g.beta);
    ++rows;
  }
  EXPECT_EQ(rows, 3 * (1 + t.rounds_used));
}

TEST(FormatNumber, ShortestRoundTrip) {
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(20.0), "20");
  EXPECT_EQ(format_number(-2.5e-12), "-2.5e-12");
  EXPECT_EQ(format_number(std::nan("")), "nan");
  EXPECT_EQ(format_number(std::numeric_limits<double>::infinity()), "inf");
  EXPECT_EQ(format_number(-std::numeric_limits<double>::infinity()), "-inf");
  for (double v : {1.0 / 3.0, 6.02214076e23, 3.981071705534973e-21}) EXPECT_EQ(std::stod(format_number(v)), v);
}

}  // namespace
}  // namespace eepc
