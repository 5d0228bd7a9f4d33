#include "eepc/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include "eepc/baselines.hpp"
#include "eepc/serialization.hpp"
#include "json_io.hpp"

namespace eepc {

namespace {

using detail::json;

Scheme scheme_from(const std::string& s, const std::string& path) {
  if (s == "eengt") return Scheme::eengt;
  if (s == "sengt") return Scheme::sengt;
  if (s == "exhaustive") return Scheme::exhaustive;
  throw ValidationError(path, "unknown scheme \"" + s + "\" (expected eengt, sengt or exhaustive)");
}

RunRecord fail(RunRecord rec, RunStatus status, const std::string& message) {
  rec.status = status;
  rec.message = message;
  rec.converged = false;
  rec.system_ee = std::nan("");
  rec.system_se = std::nan("");
  return rec;
}

}  // namespace

std::string_view to_string(Scheme s) noexcept {
  switch (s) {
    case Scheme::eengt: return "eengt";
    case Scheme::sengt: return "sengt";
    case Scheme::exhaustive: return "exhaustive";
  }
  return "?";
}

std::string_view to_string(SweepVariable v) noexcept {
  return v == SweepVariable::p_max_dbm ? "p_max_dbm" : "n_sues_per_cell";
}

std::string_view to_string(RunStatus s) noexcept {
  switch (s) {
    case RunStatus::converged: return "converged";
    case RunStatus::not_converged: return "not_converged";
    case RunStatus::infeasible: return "infeasible";
    case RunStatus::solver_failure: return "solver_failure";
  }
  return "?";
}

void ExperimentSpec::validate() const {
  if (sweep.values.empty()) throw ValidationError("sweep.values", "must not be empty");
  if (schemes.empty()) throw ValidationError("schemes", "must not be empty");
  if (seeds.empty()) throw ValidationError("seeds", "must not be empty");
  if (exhaustive_points < 2) throw ValidationError("exhaustive.points_per_dim", "must be >= 2");
  for (std::size_t i = 0; i < sweep.values.size(); ++i) {
    const double v = sweep.values[i];
    const std::string field = "sweep.values[" + std::to_string(i) + "]";
    if (!std::isfinite(v)) throw ValidationError(field, "must be finite");
    if (sweep.variable == SweepVariable::n_sues_per_cell) {
      if (v != std::floor(v) || v < 1 || v > scenario.n_rbs) {
        throw ValidationError(field, "n_sues_per_cell must be an integer in [1, scenario.n_rbs]");
      }
    }
  }
  const bool exhaustive = std::find(schemes.begin(), schemes.end(), Scheme::exhaustive) != schemes.end();
  if (exhaustive && scenario.k_cells * scenario.n_rbs > kMaxExhaustiveDims) {
    throw ValidationError("schemes", "exhaustive needs k_cells * n_rbs <= " + std::to_string(kMaxExhaustiveDims));
  }
  try {
    scenario.validate();
  } catch (const ValidationError& e) {
    throw ValidationError("scenario." + e.field(), e.message());
  }
  try {
    params.validate();
  } catch (const ValidationError& e) {
    throw ValidationError("params." + e.field(), e.message());
  }
  try {
    game.validate();
  } catch (const ValidationError& e) {
    throw ValidationError("game." + e.field(), e.message());
  }
  try {
    penalty.validate();
  } catch (const ValidationError& e) {
    throw ValidationError("solver.penalty." + e.field(), e.message());
  }
  try {
    inner.validate();
  } catch (const ValidationError& e) {
    throw ValidationError("solver.inner." + e.field(), e.message());
  }
}

ScenarioConfig ExperimentSpec::scenario_for(double value, std::uint64_t seed) const {
  ScenarioConfig c = scenario;
  c.seed = seed;
  if (sweep.variable == SweepVariable::n_sues_per_cell) c.n_sues_per_cell = static_cast<int>(value);
  return c;
}

EeParams ExperimentSpec::params_for(double value) const {
  EeParams p = params;
  if (sweep.variable == SweepVariable::p_max_dbm) p.p_max_w = dbm_to_watts(value);
  return p;
}

ExperimentSpec parse_experiment_spec(std::string_view json_text) {
  const json doc = detail::parse(json_text);
  detail::ObjectReader r(doc, "");
  ExperimentSpec spec;

  int version = 0;
  r.require("format_version", version);
  if (version != kFormatVersion) {
    throw ValidationError("format_version", "unsupported version " + std::to_string(version));
  }
  r.get("name", spec.name);
  if (r.has("scenario")) spec.scenario = detail::scenario_config_from_json(r.at("scenario"), "scenario");
  if (r.has("params")) spec.params = detail::ee_params_from_json(r.at("params"), "params");
  if (r.has("game")) spec.game = detail::game_config_from_json(r.at("game"), "game");
  if (r.has("solver")) {
    detail::ObjectReader s(r.at("solver"), "solver");
    if (s.has("penalty")) spec.penalty = detail::penalty_from_json(s.at("penalty"), "solver.penalty");
    if (s.has("inner")) spec.inner = detail::inner_from_json(s.at("inner"), "solver.inner");
    s.finish();
  }
  if (r.has("exhaustive")) {
    detail::ObjectReader e(r.at("exhaustive"), "exhaustive");
    e.get("points_per_dim", spec.exhaustive_points);
    e.finish();
  }

  if (!r.has("sweep")) throw ValidationError("sweep", "is required");
  {
    detail::ObjectReader s(r.at("sweep"), "sweep");
    std::string variable;
    s.require("variable", variable);
    if (variable == "p_max_dbm") {
      spec.sweep.variable = SweepVariable::p_max_dbm;
    } else if (variable == "n_sues_per_cell") {
      spec.sweep.variable = SweepVariable::n_sues_per_cell;
    } else {
      throw ValidationError("sweep.variable", "expected \"p_max_dbm\" or \"n_sues_per_cell\"");
    }
    if (!s.has("values")) throw ValidationError("sweep.values", "is required");
    spec.sweep.values = detail::number_array(s.at("values"), "sweep.values");
    s.finish();
  }

  if (!r.has("schemes")) throw ValidationError("schemes", "is required");
  {
    const json& schemes = r.at("schemes");
    if (!schemes.is_array()) throw ValidationError("schemes", "expected an array");
    for (std::size_t i = 0; i < schemes.size(); ++i) {
      const std::string path = "schemes[" + std::to_string(i) + "]";
      if (!schemes[i].is_string()) throw ValidationError(path, "expected a string");
      const Scheme s = scheme_from(schemes[i].get<std::string>(), path);
      if (std::find(spec.schemes.begin(), spec.schemes.end(), s) != spec.schemes.end()) {
        throw ValidationError(path, "duplicate scheme");
      }
      spec.schemes.push_back(s);
    }
  }

  if (!r.has("seeds")) throw ValidationError("seeds", "is required");
  {
    const json& seeds = r.at("seeds");
    if (!seeds.is_array()) throw ValidationError("seeds", "expected an array");
    for (std::size_t i = 0; i < seeds.size(); ++i) {
      const json& v = seeds[i];
      if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
        throw ValidationError("seeds[" + std::to_string(i) + "]", "expected a non-negative integer");
      }
      spec.seeds.push_back(v.get<std::uint64_t>());
    }
  }
  r.get("allow_infeasible", spec.allow_infeasible);
  r.get("output_dir", spec.output_dir);
  r.finish();

  spec.validate();
  return spec;
}

ExperimentSpec load_experiment_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("<file>", "cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_experiment_spec(buf.str());
}

int ExperimentResult::exit_code(bool allow_infeasible) const noexcept {
  for (const auto& r : runs) {
    if (r.status == RunStatus::converged) continue;
    if (r.status == RunStatus::infeasible && allow_infeasible) continue;
    return 2;
  }
  return 0;
}

std::string run_id(Scheme scheme, SweepVariable var, double value, std::uint64_t seed) {
  return std::string(to_string(scheme)) + "_" + std::string(to_string(var)) + "_" + format_number(value) +
         "_seed" + std::to_string(seed);
}

RunRecord run_single(const ExperimentSpec& spec, Scheme scheme, double value, std::uint64_t seed) {
  RunRecord rec;
  rec.id = run_id(scheme, spec.sweep.variable, value, seed);
  rec.scheme = scheme;
  rec.sweep_var = spec.sweep.variable;
  rec.value = value;
  rec.seed = seed;

  const NetworkScenario scn = generate(spec.scenario_for(value, seed));
  rec.scenario_json = scenario_to_json(scn, -1);
  const EeParams params = spec.params_for(value);
  GameConfig gcfg = spec.game;
  gcfg.workers = 1;

  try {
    switch (scheme) {
      case Scheme::eengt: {
        auto res = run_game(scn, params, gcfg, spec.penalty, spec.inner);
        rec.profile = std::move(res.profile);
        rec.rounds = res.trace.rounds_used;
        rec.trace = std::move(res.trace);
        rec.diagnostics = std::move(res.diagnostics);
        break;
      }
      case Scheme::sengt: {
        auto res = run_se_game(scn, params, gcfg);
        rec.profile = std::move(res.profile);
        rec.rounds = res.trace.rounds_used;
        rec.trace = std::move(res.trace);
        break;
      }
      case Scheme::exhaustive: {
        GridOracleConfig ocfg;
        ocfg.points_per_dim = spec.exhaustive_points;
        const auto res = grid_search_system_ee(scn, params, ocfg);
        if (!res.feasible) return fail(std::move(rec), RunStatus::infeasible, "no grid point meets the rate floor");
        rec.profile = res.best;
        break;
      }
    }
  } catch (const NotConverged& e) {
    rec.trace = e.trace();
    rec.rounds = e.trace().rounds_used;
    return fail(std::move(rec), RunStatus::not_converged, e.what());
  } catch (const InfeasibleRate& e) {
    return fail(std::move(rec), RunStatus::infeasible, e.what());
  } catch (const MaxItersExceeded& e) {
    return fail(std::move(rec), RunStatus::solver_failure, e.what());
  } catch (const DegenerateScale& e) {
    return fail(std::move(rec), RunStatus::solver_failure, e.what());
  } catch (const OutOfDomain& e) {
    return fail(std::move(rec), RunStatus::solver_failure, e.what());
  }

  rec.status = RunStatus::converged;
  rec.converged = true;
  rec.system_ee = system_ee(scn, rec.profile, params);
  rec.system_se = system_se(scn, rec.profile);
  return rec;
}

ExperimentResult run_experiment(const ExperimentSpec& spec, int workers) {
  spec.validate();
  if (workers < 1) throw ValidationError("workers", "must be >= 1");

  struct Job {
    Scheme scheme;
    double value;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (Scheme s : spec.schemes) {
    for (double v : spec.sweep.values) {
      for (std::uint64_t seed : spec.seeds) jobs.push_back({s, v, seed});
    }
  }

  std::vector<RunRecord> records(jobs.size());
  std::vector<std::exception_ptr> errors(jobs.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        records[i] = run_single(spec, jobs[i].scheme, jobs[i].value, jobs[i].seed);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const auto threads = static_cast<std::size_t>(std::clamp<std::size_t>(static_cast<std::size_t>(workers), 1, jobs.size()));
  if (threads == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  std::sort(records.begin(), records.end(), [](const RunRecord& a, const RunRecord& b) {
    const auto sa = to_string(a.scheme);
    const auto sb = to_string(b.scheme);
    if (sa != sb) return sa < sb;
    if (a.value != b.value) return a.value < b.value;
    return a.seed < b.seed;
  });
  return {std::move(records)};
}

int worker_cap_from_env(int fallback) {
  const char* raw = std::getenv("EEPC_WORKERS");
  if (raw == nullptr || *raw == '\0') return std::max(fallback, 1);
  char* end = nullptr;
  const long v = std::strtol(raw, &end, 10);
  if (*end != '\0' || v < 1 || v > 4096) {
    throw ValidationError("EEPC_WORKERS", "expected an integer in [1, 4096], got \"" + std::string(raw) + "\"");
  }
  return static_cast<int>(v);
}

void write_results_csv(std::ostream& out, const ExperimentSpec& spec, const ExperimentResult& result,
                       const std::string& comment) {
  if (!comment.empty()) out << "# " << comment << '\n';
  out << "scheme,sweep_var,value,seed,system_ee,system_se,rounds,converged\n";
  for (const auto& r : result.runs) {
    out << to_string(r.scheme) << ',' << to_string(spec.sweep.variable) << ',' << format_number(r.value) << ','
        << r.seed << ',' << format_number(r.system_ee) << ',' << format_number(r.system_se) << ',' << r.rounds
        << ',' << (r.converged ? "true" : "false") << '\n';
  }
}

std::string run_record_to_json(const RunRecord& run, const ExperimentSpec& spec, int indent) {
  json j;
  j["format_version"] = kFormatVersion;
  j["id"] = run.id;
  j["experiment"] = spec.name;
  j["scheme"] = to_string(run.scheme);
  j["sweep_var"] = to_string(run.sweep_var);
  j["value"] = run.value;
  j["seed"] = run.seed;
  j["status"] = to_string(run.status);
  j["message"] = run.message;
  j["converged"] = run.converged;
  j["rounds"] = run.rounds;
  j["system_ee"] = std::isfinite(run.system_ee) ? json(run.system_ee) : json(nullptr);
  j["system_se"] = std::isfinite(run.system_se) ? json(run.system_se) : json(nullptr);
  j["params"] = detail::to_json(spec.params_for(run.value));
  j["profile"] = run.profile.k_cells() > 0 ? detail::to_json(run.profile) : json(nullptr);
  j["trace"] = run.trace ? detail::to_json(*run.trace) : json(nullptr);
  json diags = json::array();
  for (const auto& d : run.diagnostics) diags.push_back(detail::to_json(d));
  j["diagnostics"] = diags;
  j["scenario"] = run.scenario_json.empty() ? json(nullptr) : json::parse(run.scenario_json);
  return j.dump(indent);
}

RunRecord run_record_from_json(std::string_view text) {
  const json doc = detail::parse(text);
  detail::ObjectReader r(doc, "");
  RunRecord rec;
  int version = 0;
  r.require("format_version", version);
  if (version != kFormatVersion) {
    throw ValidationError("format_version", "unsupported version " + std::to_string(version));
  }
  std::string experiment;
  std::string scheme;
  std::string sweep_var;
  std::string status;
  r.require("id", rec.id);
  r.get("experiment", experiment);
  r.require("scheme", scheme);
  rec.scheme = scheme_from(scheme, "scheme");
  r.require("sweep_var", sweep_var);
  if (sweep_var == "p_max_dbm") {
    rec.sweep_var = SweepVariable::p_max_dbm;
  } else if (sweep_var == "n_sues_per_cell") {
    rec.sweep_var = SweepVariable::n_sues_per_cell;
  } else {
    throw ValidationError("sweep_var", "unknown sweep variable");
  }
  r.require("value", rec.value);
  r.require("seed", rec.seed);
  r.require("status", status);
  if (status == "converged") {
    rec.status = RunStatus::converged;
  } else if (status == "not_converged") {
    rec.status = RunStatus::not_converged;
  } else if (status == "infeasible") {
    rec.status = RunStatus::infeasible;
  } else if (status == "solver_failure") {
    rec.status = RunStatus::solver_failure;
  } else {
    throw ValidationError("status", "unknown status");
  }
  r.get("message", rec.message);
  r.require("converged", rec.converged);
  r.require("rounds", rec.rounds);
  for (const char* key : {"system_ee", "system_se"}) {
    double& dst = std::string_view(key) == "system_ee" ? rec.system_ee : rec.system_se;
    if (!r.has(key)) throw ValidationError(key, "is required");
    const json& v = r.at(key);
    dst = v.is_null() ? std::nan("") : detail::number_at(v, key);
  }
  if (r.has("params")) detail::ee_params_from_json(r.at("params"), "params");
  if (r.has("profile") && !r.at("profile").is_null()) rec.profile = detail::profile_from_json(r.at("profile"), "profile");
  if (r.has("trace") && !r.at("trace").is_null()) rec.trace = detail::trace_from_json(r.at("trace"), "trace");
  if (r.has("diagnostics")) {
    const json& d = r.at("diagnostics");
    if (!d.is_array()) throw ValidationError("diagnostics", "expected an array");
    for (std::size_t i = 0; i < d.size(); ++i) {
      rec.diagnostics.push_back(detail::diagnostics_from_json(d[i], "diagnostics[" + std::to_string(i) + "]"));
    }
  }
  if (r.has("scenario") && !r.at("scenario").is_null()) rec.scenario_json = r.at("scenario").dump();
  r.finish();
  return rec;
}

void write_experiment_outputs(const std::filesystem::path& dir, const ExperimentSpec& spec,
                              const ExperimentResult& result, const std::string& comment) {
  std::filesystem::create_directories(dir / "traces");
  {
    std::ofstream csv(dir / "results.csv", std::ios::binary);
    if (!csv) throw Error("cannot write " + (dir / "results.csv").string());
    write_results_csv(csv, spec, result, comment);
  }
  for (const auto& run : result.runs) {
    std::ofstream out(dir / "traces" / (run.id + ".json"), std::ios::binary);
    if (!out) throw Error("cannot write trace for " + run.id);
    out << run_record_to_json(run, spec) << '\n';
  }
}

}  // namespace eepc
