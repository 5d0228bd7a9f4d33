#include "json_io.hpp"

#include <cmath>
#include <limits>

#include "eepc/serialization.hpp"

namespace eepc::detail {

namespace {

json point(const Point& p) { return json::array({p.x, p.y}); }

Point point_from(const json& j, const std::string& path) {
  const auto v = number_array(j, path);
  if (v.size() != 2) throw ValidationError(path, "expected [x, y]");
  return {v[0], v[1]};
}

std::string index_path(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

const json& array_at(const json& j, const std::string& path) {
  if (!j.is_array()) throw ValidationError(path, "expected an array");
  return j;
}

}  // namespace

ObjectReader::ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
  if (!j_.is_object()) throw ValidationError(path_.empty() ? "<document>" : path_, "expected an object");
}

std::string ObjectReader::field(const char* key) const {
  return path_.empty() ? std::string(key) : path_ + "." + key;
}

const json& ObjectReader::at(const char* key) {
  seen_.insert(key);
  return j_.at(key);
}

void ObjectReader::get(const char* key, double& out) {
  if (!has(key)) return;
  out = number_at(at(key), field(key));
}

void ObjectReader::get(const char* key, int& out) {
  if (!has(key)) return;
  const json& v = at(key);
  if (!v.is_number_integer()) throw ValidationError(field(key), "expected an integer");
  const auto x = v.get<std::int64_t>();
  if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) {
    throw ValidationError(field(key), "out of range");
  }
  out = static_cast<int>(x);
}

void ObjectReader::get(const char* key, std::uint64_t& out) {
  if (!has(key)) return;
  const json& v = at(key);
  if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
    throw ValidationError(field(key), "expected a non-negative integer");
  }
  out = v.get<std::uint64_t>();
}

void ObjectReader::get(const char* key, bool& out) {
  if (!has(key)) return;
  const json& v = at(key);
  if (!v.is_boolean()) throw ValidationError(field(key), "expected true or false");
  out = v.get<bool>();
}

void ObjectReader::get(const char* key, std::string& out) {
  if (!has(key)) return;
  const json& v = at(key);
  if (!v.is_string()) throw ValidationError(field(key), "expected a string");
  out = v.get<std::string>();
}

void ObjectReader::get(const char* key, std::optional<double>& out) {
  if (!has(key)) return;
  const json& v = at(key);
  if (v.is_null()) {
    out.reset();
    return;
  }
  out = number_at(v, field(key));
}

void ObjectReader::finish() const {
  for (auto it = j_.begin(); it != j_.end(); ++it) {
    if (!seen_.contains(it.key())) throw ValidationError(field(it.key().c_str()), "unknown field");
  }
}

double number_at(const json& j, const std::string& path) {
  if (!j.is_number()) throw ValidationError(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ValidationError(path, "must be finite");
  return v;
}

std::vector<double> number_array(const json& j, const std::string& path) {
  array_at(j, path);
  std::vector<double> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number_at(j[i], index_path(path, i)));
  return out;
}

json to_json(const ScenarioConfig& c) {
  json j = {
      {"k_cells", c.k_cells},
      {"n_rbs", c.n_rbs},
      {"n_sues_per_cell", c.n_sues_per_cell},
      {"macro_radius_m", c.macro_radius_m},
      {"small_radius_m", c.small_radius_m},
      {"pathloss_kappa", c.pathloss_kappa},
      {"pathloss_chi", c.pathloss_chi},
      {"noise_density_dbm_per_hz", c.noise_density_dbm_per_hz},
      {"rb_bandwidth_hz", c.rb_bandwidth_hz},
      {"mbs_total_power_dbm", c.mbs_total_power_dbm},
      {"seed", c.seed},
  };
  j["mbs_power_dbm_per_rb"] = c.mbs_power_dbm_per_rb ? json(*c.mbs_power_dbm_per_rb) : json(nullptr);
  j["min_mbs_distance_m"] = c.min_mbs_distance_m ? json(*c.min_mbs_distance_m) : json(nullptr);
  return j;
}

ScenarioConfig scenario_config_from_json(const json& j, const std::string& path) {
  ScenarioConfig c;
  ObjectReader r(j, path);
  r.get("k_cells", c.k_cells);
  r.get("n_rbs", c.n_rbs);
  r.get("n_sues_per_cell", c.n_sues_per_cell);
  r.get("macro_radius_m", c.macro_radius_m);
  r.get("small_radius_m", c.small_radius_m);
  r.get("pathloss_kappa", c.pathloss_kappa);
  r.get("pathloss_chi", c.pathloss_chi);
  r.get("noise_density_dbm_per_hz", c.noise_density_dbm_per_hz);
  r.get("rb_bandwidth_hz", c.rb_bandwidth_hz);
  r.get("mbs_total_power_dbm", c.mbs_total_power_dbm);
  r.get("mbs_power_dbm_per_rb", c.mbs_power_dbm_per_rb);
  r.get("min_mbs_distance_m", c.min_mbs_distance_m);
  r.get("seed", c.seed);
  r.finish();
  try {
    c.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(path.empty() ? e.field() : path + "." + e.field(), e.message());
  }
  return c;
}

json to_json(const EeParams& p) {
  return {{"p_circuit_w", p.p_circuit_w}, {"sigma", p.sigma}, {"p_max_w", p.p_max_w}, {"r_min", p.r_min}};
}

EeParams ee_params_from_json(const json& j, const std::string& path) {
  EeParams p;
  ObjectReader r(j, path);
  r.get("p_circuit_w", p.p_circuit_w);
  r.get("sigma", p.sigma);
  r.get("r_min", p.r_min);
  if (r.has("p_max_w") && r.has("p_max_dbm")) {
    throw ValidationError(r.field("p_max_dbm"), "give p_max_w or p_max_dbm, not both");
  }
  r.get("p_max_w", p.p_max_w);
  if (r.has("p_max_dbm")) {
    double dbm = 0.0;
    r.get("p_max_dbm", dbm);
    p.p_max_w = dbm_to_watts(dbm);
  }
  r.finish();
  try {
    p.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(path.empty() ? e.field() : path + "." + e.field(), e.message());
  }
  return p;
}

json to_json(const PenaltySchedule& s) {
  return {{"mu_ie0", s.mu_ie0},       {"mu_e0", s.mu_e0},         {"rho_ie", s.rho_ie},
          {"rho_e", s.rho_e},         {"outer_max", s.outer_max}, {"mu_ie_min", s.mu_ie_min},
          {"eq_tol", s.eq_tol}};
}

PenaltySchedule penalty_from_json(const json& j, const std::string& path) {
  PenaltySchedule s;
  ObjectReader r(j, path);
  r.get("mu_ie0", s.mu_ie0);
  r.get("mu_e0", s.mu_e0);
  r.get("rho_ie", s.rho_ie);
  r.get("rho_e", s.rho_e);
  r.get("outer_max", s.outer_max);
  r.get("mu_ie_min", s.mu_ie_min);
  r.get("eq_tol", s.eq_tol);
  r.finish();
  try {
    s.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(path + "." + e.field(), e.message());
  }
  return s;
}

json to_json(const InnerSolverConfig& c) {
  return {{"grad_tol", c.grad_tol},
          {"max_iters", c.max_iters},
          {"armijo_c", c.armijo_c},
          {"backtrack_beta", c.backtrack_beta},
          {"step_init", c.step_init},
          {"method", c.method == DescentMethod::scaled ? "scaled" : "steepest"}};
}

InnerSolverConfig inner_from_json(const json& j, const std::string& path) {
  InnerSolverConfig c;
  ObjectReader r(j, path);
  r.get("grad_tol", c.grad_tol);
  r.get("max_iters", c.max_iters);
  r.get("armijo_c", c.armijo_c);
  r.get("backtrack_beta", c.backtrack_beta);
  r.get("step_init", c.step_init);
  std::string method = c.method == DescentMethod::scaled ? "scaled" : "steepest";
  r.get("method", method);
  if (method == "scaled") {
    c.method = DescentMethod::scaled;
  } else if (method == "steepest") {
    c.method = DescentMethod::steepest;
  } else {
    throw ValidationError(r.field("method"), "expected \"scaled\" or \"steepest\"");
  }
  r.finish();
  try {
    c.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(path + "." + e.field(), e.message());
  }
  return c;
}

json to_json(const PowerProfile& p) {
  json rows = json::array();
  for (int k = 0; k < p.k_cells(); ++k) {
    rows.push_back(std::vector<double>(p.cell(k).begin(), p.cell(k).end()));
  }
  return rows;
}

PowerProfile profile_from_json(const json& j, const std::string& path) {
  array_at(j, path);
  if (j.empty()) throw ValidationError(path, "expected at least one cell");
  std::vector<std::vector<double>> rows;
  for (std::size_t k = 0; k < j.size(); ++k) rows.push_back(number_array(j[k], index_path(path, k)));
  const auto n = rows.front().size();
  if (n == 0) throw ValidationError(path, "expected at least one RB");
  PowerProfile p(static_cast<int>(rows.size()), static_cast<int>(n));
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (rows[k].size() != n) throw ValidationError(index_path(path, k), "ragged profile");
    p.set_cell(static_cast<int>(k), rows[k]);
  }
  try {
    p.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(path, e.message());
  }
  return p;
}

json to_json(const GameConfig& g) {
  json j = {{"epsilon", g.epsilon},
            {"max_rounds", g.max_rounds},
            {"update_schedule", g.update_schedule == UpdateSchedule::jacobi ? "jacobi" : "gauss_seidel"},
            {"workers", g.workers}};
  j["initial_profile"] = g.initial_profile ? to_json(*g.initial_profile) : json("uniform");
  return j;
}

GameConfig game_config_from_json(const json& j, const std::string& path) {
  GameConfig g;
  ObjectReader r(j, path);
  r.get("epsilon", g.epsilon);
  r.get("max_rounds", g.max_rounds);
  r.get("workers", g.workers);
  std::string schedule = "jacobi";
  r.get("update_schedule", schedule);
  if (schedule == "jacobi") {
    g.update_schedule = UpdateSchedule::jacobi;
  } else if (schedule == "gauss_seidel") {
    g.update_schedule = UpdateSchedule::gauss_seidel;
  } else {
    throw ValidationError(r.field("update_schedule"), "expected \"jacobi\" or \"gauss_seidel\"");
  }
  if (r.has("initial_profile")) {
    const json& v = r.at("initial_profile");
    if (v.is_string()) {
      if (v.get<std::string>() != "uniform") {
        throw ValidationError(r.field("initial_profile"), "expected \"uniform\" or a [K][N] array");
      }
    } else {
      g.initial_profile = profile_from_json(v, r.field("initial_profile"));
    }
  }
  r.finish();
  try {
    g.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(path + "." + e.field(), e.message());
  }
  return g;
}

json to_json(const SolverDiagnostics& d) {
  return {{"outer_rounds", d.outer_rounds},
          {"inner_iterations", d.inner_iterations},
          {"final_gradient_norm", d.final_gradient_norm},
          {"equality_violation", d.equality_violation},
          {"inner_cap_hit", d.inner_cap_hit},
          {"equality_history", d.equality_history},
          {"inner_history", d.inner_history}};
}

SolverDiagnostics diagnostics_from_json(const json& j, const std::string& path) {
  SolverDiagnostics d;
  ObjectReader r(j, path);
  r.require("outer_rounds", d.outer_rounds);
  r.require("inner_iterations", d.inner_iterations);
  r.require("final_gradient_norm", d.final_gradient_norm);
  r.require("equality_violation", d.equality_violation);
  r.require("inner_cap_hit", d.inner_cap_hit);
  if (r.has("equality_history")) {
    d.equality_history = number_array(r.at("equality_history"), r.field("equality_history"));
  }
  if (r.has("inner_history")) {
    const json& h = array_at(r.at("inner_history"), r.field("inner_history"));
    for (std::size_t i = 0; i < h.size(); ++i) {
      if (!h[i].is_number_integer()) {
        throw ValidationError(index_path(r.field("inner_history"), i), "expected an integer");
      }
      d.inner_history.push_back(h[i].get<int>());
    }
  }
  r.finish();
  return d;
}

namespace {

json round_to_json(const GameRound& g) {
  return {{"round", g.round}, {"beta", g.beta}, {"utilities", g.utilities}, {"profile", to_json(g.profile)}};
}

GameRound round_from_json(const json& j, const std::string& path) {
  GameRound g;
  ObjectReader r(j, path);
  r.require("round", g.round);
  r.require("beta", g.beta);
  if (!r.has("utilities")) throw ValidationError(r.field("utilities"), "is required");
  g.utilities = number_array(r.at("utilities"), r.field("utilities"));
  if (!r.has("profile")) throw ValidationError(r.field("profile"), "is required");
  g.profile = profile_from_json(r.at("profile"), r.field("profile"));
  r.finish();
  return g;
}

}  // namespace

json to_json(const GameTrace& t) {
  json rounds = json::array();
  rounds.push_back(round_to_json(t.initial));
  for (const auto& g : t.rounds) rounds.push_back(round_to_json(g));
  return {{"converged", t.converged}, {"rounds_used", t.rounds_used}, {"rounds", rounds}};
}

GameTrace trace_from_json(const json& j, const std::string& path) {
  GameTrace t;
  ObjectReader r(j, path);
  r.require("converged", t.converged);
  r.require("rounds_used", t.rounds_used);
  if (!r.has("rounds")) throw ValidationError(r.field("rounds"), "is required");
  const json& rounds = array_at(r.at("rounds"), r.field("rounds"));
  if (rounds.empty()) throw ValidationError(r.field("rounds"), "expected the initial round");
  for (std::size_t i = 0; i < rounds.size(); ++i) {
    auto g = round_from_json(rounds[i], index_path(r.field("rounds"), i));
    if (i == 0) {
      t.initial = std::move(g);
    } else {
      t.rounds.push_back(std::move(g));
    }
  }
  r.finish();
  return t;
}

json to_json(const NetworkScenario& s) {
  json j;
  j["format_version"] = kFormatVersion;
  j["config"] = to_json(s.config());
  j["k_cells"] = s.k_cells();
  j["n_rbs"] = s.n_rbs();
  j["bandwidth_hz"] = s.bandwidth_hz();
  j["noise_w"] = s.noise_w();
  j["mbs_power_w"] = std::vector<double>(s.mbs_power_w().begin(), s.mbs_power_w().end());
  j["gain_layout"] = "tx,cell,rb";
  j["gains"] = std::vector<double>(s.gains().begin(), s.gains().end());
  if (s.has_geometry()) {
    json g;
    g["mbs"] = point(s.mbs());
    g["sbs"] = json::array();
    for (const auto& p : s.sbs()) g["sbs"].push_back(point(p));
    g["sues"] = json::array();
    for (const auto& cell : s.sues()) {
      json c = json::array();
      for (const auto& p : cell) c.push_back(point(p));
      g["sues"].push_back(c);
    }
    g["mues"] = json::array();
    for (const auto& p : s.mues()) g["mues"].push_back(point(p));
    g["rb_assignment"] = s.rb_assignment();
    j["geometry"] = g;
  } else {
    j["geometry"] = nullptr;
  }
  return j;
}

NetworkScenario scenario_from_json(const json& j, const std::string& path) {
  ObjectReader r(j, path);
  int version = 0;
  r.require("format_version", version);
  if (version != kFormatVersion) {
    throw ValidationError(r.field("format_version"), "unsupported version " + std::to_string(version));
  }
  int k = 0;
  int n = 0;
  double bw = 0.0;
  double noise = 0.0;
  std::string layout;
  r.require("k_cells", k);
  r.require("n_rbs", n);
  r.require("bandwidth_hz", bw);
  r.require("noise_w", noise);
  r.require("gain_layout", layout);
  if (layout != "tx,cell,rb") throw ValidationError(r.field("gain_layout"), "expected \"tx,cell,rb\"");
  if (!r.has("gains")) throw ValidationError(r.field("gains"), "is required");
  auto gains = number_array(r.at("gains"), r.field("gains"));
  if (!r.has("mbs_power_w")) throw ValidationError(r.field("mbs_power_w"), "is required");
  auto mbs_power = number_array(r.at("mbs_power_w"), r.field("mbs_power_w"));

  ScenarioConfig config;
  const bool has_config = r.has("config") && !r.at("config").is_null();
  if (has_config) config = scenario_config_from_json(r.at("config"), r.field("config"));

  const bool has_geometry = r.has("geometry") && !r.at("geometry").is_null();
  if (!has_geometry) {
    r.finish();
    return NetworkScenario::from_gains(k, n, std::move(gains), noise, std::move(mbs_power), bw);
  }
  if (!has_config) throw ValidationError(r.field("config"), "required when geometry is present");

  const std::string gpath = r.field("geometry");
  ObjectReader g(r.at("geometry"), gpath);
  r.finish();
  if (!g.has("mbs") || !g.has("sbs") || !g.has("sues") || !g.has("mues") || !g.has("rb_assignment")) {
    throw ValidationError(gpath, "expected mbs, sbs, sues, mues and rb_assignment");
  }
  const Point mbs = point_from(g.at("mbs"), g.field("mbs"));
  std::vector<Point> sbs;
  const json& js = array_at(g.at("sbs"), g.field("sbs"));
  for (std::size_t i = 0; i < js.size(); ++i) sbs.push_back(point_from(js[i], index_path(g.field("sbs"), i)));
  std::vector<std::vector<Point>> sues;
  const json& ju = array_at(g.at("sues"), g.field("sues"));
  for (std::size_t c = 0; c < ju.size(); ++c) {
    const std::string cpath = index_path(g.field("sues"), c);
    array_at(ju[c], cpath);
    std::vector<Point> cell;
    for (std::size_t i = 0; i < ju[c].size(); ++i) cell.push_back(point_from(ju[c][i], index_path(cpath, i)));
    sues.push_back(std::move(cell));
  }
  std::vector<Point> mues;
  const json& jm = array_at(g.at("mues"), g.field("mues"));
  for (std::size_t i = 0; i < jm.size(); ++i) mues.push_back(point_from(jm[i], index_path(g.field("mues"), i)));
  std::vector<std::vector<int>> assignment;
  const json& ja = array_at(g.at("rb_assignment"), g.field("rb_assignment"));
  for (std::size_t c = 0; c < ja.size(); ++c) {
    const std::string cpath = index_path(g.field("rb_assignment"), c);
    array_at(ja[c], cpath);
    std::vector<int> row;
    for (std::size_t i = 0; i < ja[c].size(); ++i) {
      if (!ja[c][i].is_number_integer()) throw ValidationError(index_path(cpath, i), "expected an integer");
      row.push_back(ja[c][i].get<int>());
    }
    assignment.push_back(std::move(row));
  }
  g.finish();

  NetworkScenario s(config, mbs, std::move(sbs), std::move(sues), std::move(mues), std::move(assignment));
  if (s.k_cells() != k || s.n_rbs() != n) throw ValidationError(path.empty() ? "k_cells" : path + ".k_cells", "does not match config");
  const auto recomputed = s.gains();
  if (recomputed.size() != gains.size()) throw ValidationError(r.field("gains"), "size does not match geometry");
  for (std::size_t i = 0; i < gains.size(); ++i) {
    if (std::abs(recomputed[i] - gains[i]) > 1e-12 * std::abs(gains[i])) {
      throw ValidationError(index_path(r.field("gains"), i), "does not match the path loss of the stored geometry");
    }
  }
  return s;
}

json parse(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError("<document>", std::string("invalid JSON: ") + e.what());
  }
}

}  // namespace eepc::detail
