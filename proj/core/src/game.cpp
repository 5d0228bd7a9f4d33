#include "eepc/game.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>

namespace eepc {

namespace {

std::vector<double> utilities(const NetworkScenario& scn, const PowerProfile& profile,
                              const UtilityFn& utility) {
  std::vector<double> u(static_cast<std::size_t>(scn.k_cells()));
  for (int k = 0; k < scn.k_cells(); ++k) u[static_cast<std::size_t>(k)] = utility(profile, k);
  return u;
}

// Runs respond(previous, k) for every k, possibly on several threads. Each
// worker writes only its own cell, so the result matches a sequential sweep.
PowerProfile jacobi_round(const NetworkScenario& scn, const PowerProfile& previous,
                          const ResponseFn& respond, int workers) {
  const int k_cells = scn.k_cells();
  std::vector<std::vector<double>> responses(static_cast<std::size_t>(k_cells));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(k_cells));
  std::atomic<int> next{0};
  auto work = [&] {
    for (int k = next++; k < k_cells; k = next++) {
      try {
        responses[static_cast<std::size_t>(k)] = respond(previous, k);
      } catch (...) {
        errors[static_cast<std::size_t>(k)] = std::current_exception();
      }
    }
  };
  const int threads = std::clamp(workers, 1, k_cells);
  if (threads == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(work);
  }
  // Lowest failing index wins, as in a sequential sweep.
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  PowerProfile next_profile = previous;
  for (int k = 0; k < k_cells; ++k) next_profile.set_cell(k, responses[static_cast<std::size_t>(k)]);
  return next_profile;
}

}  // namespace

void GameConfig::validate() const {
  if (!(epsilon > 0.0)) throw ValidationError("epsilon", "must be > 0");
  if (max_rounds < 1) throw ValidationError("max_rounds", "must be >= 1");
  if (workers < 1) throw ValidationError("workers", "must be >= 1");
  if (initial_profile) initial_profile->validate();
}

PowerProfile uniform_profile(const NetworkScenario& scn, const EeParams& params) {
  return PowerProfile(scn.k_cells(), scn.n_rbs(), params.p_max_w / (2.0 * scn.n_rbs()));
}

GameResult run_dynamics(const NetworkScenario& scn, const EeParams& params, const GameConfig& gcfg,
                        const ResponseFn& respond, const UtilityFn& utility) {
  params.validate();
  gcfg.validate();
  PowerProfile profile = gcfg.initial_profile.value_or(uniform_profile(scn, params));
  if (profile.k_cells() != scn.k_cells() || profile.n_rbs() != scn.n_rbs()) {
    throw ValidationError("initial_profile", "dimensions do not match the scenario");
  }

  GameTrace trace;
  trace.initial.round = 1;
  trace.initial.utilities = utilities(scn, profile, utility);
  trace.initial.profile = profile;
  std::vector<double> u = trace.initial.utilities;

  for (int n = 1; n <= gcfg.max_rounds; ++n) {
    PowerProfile next;
    if (gcfg.update_schedule == UpdateSchedule::jacobi) {
      next = jacobi_round(scn, profile, respond, gcfg.workers);
    } else {
      next = profile;
      for (int k = 0; k < scn.k_cells(); ++k) next.set_cell(k, respond(next, k));
    }
    auto u_next = utilities(scn, next, utility);
    double beta = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) beta += std::abs(u_next[k] - u[k]);

    GameRound rec;
    rec.round = n + 1;
    rec.utilities = u_next;
    rec.beta = beta;
    rec.profile = next;
    trace.rounds.push_back(std::move(rec));
    trace.rounds_used = n;
    profile = std::move(next);
    u = std::move(u_next);
    if (beta < gcfg.epsilon) {
      trace.converged = true;
      return {std::move(profile), std::move(trace), {}};
    }
  }
  throw NotConverged("beta stayed above " + std::to_string(gcfg.epsilon) + " for " +
                         std::to_string(gcfg.max_rounds) + " rounds",
                     std::move(trace));
}

GameResult run_game(const NetworkScenario& scn, const EeParams& params, const GameConfig& gcfg,
                    const PenaltySchedule& sched, const InnerSolverConfig& inner) {
  // Each cell writes only its own slot, so Jacobi workers never share one.
  std::vector<SolverDiagnostics> diagnostics(static_cast<std::size_t>(scn.k_cells()));
  auto respond = [&](const PowerProfile& profile, int k) {
    const auto sub = EeSubproblem::for_cell(scn, profile, k, params);
    try {
      auto best = solve_best_response(sub, sched, inner);
      diagnostics[static_cast<std::size_t>(k)] = std::move(best.diagnostics);
      return std::move(best.power);
    } catch (const InfeasibleRate& e) {
      throw InfeasibleRate("cell " + std::to_string(k) + ": " + e.what(), k);
    }
  };
  auto utility = [&](const PowerProfile& profile, int k) {
    return ee_of_sbs(scn, profile, k, params);
  };
  auto result = run_dynamics(scn, params, gcfg, respond, utility);
  result.diagnostics = std::move(diagnostics);
  return result;
}

NashReport check_nash(const NetworkScenario& scn, const PowerProfile& profile,
                      const EeParams& params, int probe_grid, double tol) {
  if (probe_grid < 2) throw ValidationError("probe_grid", "must be >= 2");
  const int n = scn.n_rbs();
  NashReport report;
  report.max_improvement.assign(static_cast<std::size_t>(scn.k_cells()), 0.0);

  for (int k = 0; k < scn.k_cells(); ++k) {
    const auto sub = EeSubproblem::for_cell(scn, profile, k, params);
    const std::vector<double> base(profile.cell(k).begin(), profile.cell(k).end());
    const double base_ee =
        rate(sub.direct_gain, sub.interference, base, sub.bandwidth_hz) / params.consumed_power(base);
    double best = 0.0;

    auto probe = [&](const std::vector<double>& p) {
      double total = 0.0;
      for (double v : p) {
        if (v < 0.0) return;
        total += v;
      }
      if (total > params.p_max_w) return;
      const double r = rate(sub.direct_gain, sub.interference, p, sub.bandwidth_hz);
      if (r < params.r_min) return;
      ++report.probes;
      const double ee = r / params.consumed_power(p);
      const double gain = base_ee > 0.0 ? (ee - base_ee) / base_ee : ee;
      best = std::max(best, gain);
    };

    const double base_total = std::accumulate(base.begin(), base.end(), 0.0);
    const double step = params.p_max_w / (probe_grid - 1);

    // Whole-vector scalings up to the budget.
    if (base_total > 0.0) {
      const double t_max = params.p_max_w / base_total;
      for (int j = 0; j < probe_grid; ++j) {
        std::vector<double> p = base;
        const double t = t_max * j / (probe_grid - 1);
        for (auto& v : p) v *= t;
        probe(p);
      }
    }
    for (int i = 0; i < n; ++i) {
      const auto ii = static_cast<std::size_t>(i);
      // Absolute levels on one RB.
      for (int j = 0; j < probe_grid; ++j) {
        std::vector<double> p = base;
        p[ii] = step * j;
        probe(p);
      }
      // Relative perturbations on one RB.
      for (double delta : {1e-3, 1e-2, 5e-2, 0.1, 0.25, 0.5}) {
        for (double sign : {-1.0, 1.0}) {
          std::vector<double> p = base;
          p[ii] *= 1.0 + sign * delta;
          probe(p);
        }
      }
      // Shift power from RB i to every other RB.
      for (int l = 0; l < n; ++l) {
        if (l == i) continue;
        for (double frac : {0.01, 0.05, 0.1, 0.25, 0.5, 1.0}) {
          std::vector<double> p = base;
          const double moved = frac * p[ii];
          p[ii] -= moved;
          p[static_cast<std::size_t>(l)] += moved;
          probe(p);
        }
      }
    }
    report.max_improvement[static_cast<std::size_t>(k)] = best;
    if (report.worst_cell < 0 || best > report.worst) {
      report.worst = best;
      report.worst_cell = k;
    }
  }
  report.passed = report.worst <= tol;
  return report;
}

}  // namespace eepc
