// eepc: run power-control experiments, check the acceptance suite, and
// inspect stored runs.
//
// Exit codes: 0 ok, 1 validation error, 2 non-convergence (or a failed
// verification check), 3 internal error.

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "acceptance.hpp"
#include "eepc/errors.hpp"
#include "eepc/experiment.hpp"
#include "eepc/serialization.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitNonConvergence = 2;
constexpr int kExitInternal = 3;

#ifndef EEPC_PRESET_DIR
#define EEPC_PRESET_DIR "presets"
#endif

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

int resolve_workers(int flag) {
  if (flag > 0) return flag;
  const unsigned hw = std::thread::hardware_concurrency();
  return eepc::worker_cap_from_env(hw == 0 ? 1 : static_cast<int>(hw));
}

int cmd_run(const std::string& spec_path, const std::string& output_dir, int workers_flag) {
  const auto spec = eepc::load_experiment_spec(spec_path);
  const int workers = resolve_workers(workers_flag);
  const std::filesystem::path dir = output_dir.empty() ? spec.output_dir : output_dir;

  const auto t0 = std::chrono::steady_clock::now();
  const auto result = eepc::run_experiment(spec, workers);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  eepc::write_experiment_outputs(dir, spec, result, "eepc run " + spec.name + " " + utc_timestamp());

  int converged = 0;
  int infeasible = 0;
  int failed = 0;
  for (const auto& r : result.runs) {
    if (r.status == eepc::RunStatus::converged) {
      ++converged;
    } else if (r.status == eepc::RunStatus::infeasible) {
      ++infeasible;
    } else {
      ++failed;
    }
  }
  std::cout << spec.name << ": " << result.runs.size() << " runs (" << converged << " converged, " << infeasible
            << " infeasible, " << failed << " failed) in " << std::fixed << std::setprecision(2) << secs
            << " s with " << workers << " workers\n"
            << "results: " << (dir / "results.csv").string() << "\n"
            << "traces:  " << (dir / "traces").string() << "/<id>.json\n";
  for (const auto& r : result.runs) {
    if (r.status == eepc::RunStatus::converged) continue;
    std::cout << "  " << r.id << ": " << eepc::to_string(r.status) << ": " << r.message << '\n';
  }
  return result.exit_code(spec.allow_infeasible);
}

int cmd_verify(const std::vector<int>& ids, const std::string& preset_dir, int workers_flag) {
  eepc::verify::AcceptanceOptions options;
  options.preset_dir = preset_dir.empty() ? EEPC_PRESET_DIR : preset_dir;
  options.workers = resolve_workers(workers_flag);
  bool all = true;
  eepc::verify::run_acceptance(options, ids, [&](const eepc::verify::CriterionResult& r) {
    all = all && r.passed;
    std::cout << eepc::verify::format_result(r) << std::endl;
  });
  return all ? kExitOk : kExitNonConvergence;
}

std::filesystem::path find_record(const std::string& id, const std::string& dir) {
  const std::filesystem::path direct(id);
  if (std::filesystem::is_regular_file(direct)) return direct;
  const auto under = std::filesystem::path(dir) / "traces" / (id + ".json");
  if (std::filesystem::is_regular_file(under)) return under;
  throw eepc::ValidationError("id", "no stored run \"" + id + "\" (looked for " + under.string() + ")");
}

int cmd_trace(const std::string& id, const std::string& dir, bool csv) {
  const auto path = find_record(id, dir);
  std::ifstream in(path);
  std::stringstream buf;
  buf << in.rdbuf();
  const auto rec = eepc::run_record_from_json(buf.str());

  if (csv) {
    if (!rec.trace) throw eepc::ValidationError("trace", "run " + rec.id + " has no game trace");
    eepc::write_trace_csv(std::cout, *rec.trace);
    return kExitOk;
  }

  std::cout << "run       " << rec.id << '\n'
            << "scheme    " << eepc::to_string(rec.scheme) << '\n'
            << "sweep     " << eepc::to_string(rec.sweep_var) << " = " << eepc::format_number(rec.value) << '\n'
            << "seed      " << rec.seed << '\n'
            << "status    " << eepc::to_string(rec.status) << (rec.message.empty() ? "" : ": " + rec.message)
            << '\n';
  if (std::isfinite(rec.system_ee)) {
    std::cout << "system EE " << eepc::format_number(rec.system_ee) << " bit/J\n"
              << "system SE " << eepc::format_number(rec.system_se) << " bit/s\n";
  }
  if (rec.trace) {
    const auto& t = *rec.trace;
    std::cout << "rounds    " << t.rounds_used << (t.converged ? " (converged)" : " (not converged)") << "\n\n";
    std::cout << "round  beta          utilities\n";
    auto row = [](const eepc::GameRound& g) {
      std::ostringstream line;
      line << std::setw(5) << g.round << "  " << std::setw(12) << std::left << eepc::format_number(g.beta)
           << std::right << "  ";
      for (double u : g.utilities) line << eepc::format_number(u) << "  ";
      return line.str();
    };
    std::cout << row(t.initial) << '\n';
    for (const auto& g : t.rounds) std::cout << row(g) << '\n';
  }
  if (rec.profile.k_cells() > 0) {
    std::cout << "\nfinal powers (W)\n";
    for (int k = 0; k < rec.profile.k_cells(); ++k) {
      std::cout << "  SBS " << k + 1 << ':';
      for (double p : rec.profile.cell(k)) std::cout << ' ' << eepc::format_number(p);
      std::cout << '\n';
    }
  }
  if (!rec.diagnostics.empty()) {
    std::cout << "\nlast-round solver diagnostics\n";
    for (std::size_t k = 0; k < rec.diagnostics.size(); ++k) {
      const auto& d = rec.diagnostics[k];
      std::cout << "  SBS " << k + 1 << ": outer " << d.outer_rounds << ", inner " << d.inner_iterations
                << ", |grad| " << eepc::format_number(d.final_gradient_norm) << ", eq violation "
                << eepc::format_number(d.equality_violation) << (d.inner_cap_hit ? ", inner cap hit" : "") << '\n';
    }
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Energy-efficient power control game for small-cell networks"};
  app.require_subcommand(1);

  std::string spec_path;
  std::string output_dir;
  int workers = 0;
  auto* run = app.add_subcommand("run", "Run an experiment spec and write results.csv plus per-run traces");
  run->add_option("spec", spec_path, "Experiment spec (JSON)")->required();
  run->add_option("-o,--output-dir", output_dir, "Override the spec's output_dir");
  run->add_option("-j,--workers", workers, "Concurrent runs (default: EEPC_WORKERS, else hardware threads)")
      ->check(CLI::PositiveNumber);

  std::vector<int> criteria;
  std::string preset_dir;
  auto* verify = app.add_subcommand("verify", "Run the acceptance checks and print one line per criterion");
  verify->add_option("-c,--criteria", criteria, "Criterion ids to run (default: all)")
      ->delimiter(',')
      ->check(CLI::Range(1, eepc::verify::kCriterionCount));
  verify->add_option("--presets", preset_dir, "Directory with fig2/fig3/fig4.json");
  verify->add_option("-j,--workers", workers, "Concurrency for preset reruns")->check(CLI::PositiveNumber);

  std::string id;
  std::string results_dir = "results";
  bool csv = false;
  auto* trace = app.add_subcommand("trace", "Summarise a stored run");
  trace->add_option("id", id, "Run id (or path to a trace JSON file)")->required();
  trace->add_option("-d,--dir", results_dir, "Results directory holding traces/");
  trace->add_flag("--csv", csv, "Emit round,k,u_k,beta rows instead of the summary");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*run) return cmd_run(spec_path, output_dir, workers);
    if (*verify) return cmd_verify(criteria, preset_dir, workers);
    if (*trace) return cmd_trace(id, results_dir, csv);
  } catch (const eepc::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const eepc::SpacingInfeasible& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitInternal;
}
