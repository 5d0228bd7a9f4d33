#include "eepc/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "eepc/allocation.hpp"
#include "eepc/errors.hpp"

namespace eepc {

namespace {

std::uint64_t grid_size(int points, int dims) {
  std::uint64_t total = 1;
  for (int d = 0; d < dims; ++d) {
    total *= static_cast<std::uint64_t>(points);
    if (total > kMaxGridEvaluations) {
      throw ValidationError("points_per_dim", "grid exceeds the evaluation cap");
    }
  }
  return total;
}

// Candidate `a` beats `b` on strictly larger value, or equal value and
// lexicographically smaller index vector.
bool better(double va, const std::vector<int>& a, double vb, const std::vector<int>& b) {
  if (va != vb) return va > vb;
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

struct Incumbent {
  bool found = false;
  double value = 0.0;
  std::vector<int> index;
  std::uint64_t evaluated = 0;

  void offer(double v, const std::vector<int>& idx) {
    if (!found || better(v, idx, value, index)) {
      found = true;
      value = v;
      index = idx;
    }
  }
};

// Enumerates every index vector whose leading coordinate is in [first_lo,
// first_hi) and calls visit(idx).
template <typename Visit>
void enumerate(int dims, int points, int first_lo, int first_hi, Visit&& visit) {
  std::vector<int> idx(static_cast<std::size_t>(dims), 0);
  for (int lead = first_lo; lead < first_hi; ++lead) {
    std::fill(idx.begin(), idx.end(), 0);
    idx[0] = lead;
    for (;;) {
      visit(idx);
      int d = dims - 1;
      while (d > 0 && ++idx[static_cast<std::size_t>(d)] == points) {
        idx[static_cast<std::size_t>(d)] = 0;
        --d;
      }
      if (d == 0) break;
    }
  }
}

// Splits the leading coordinate across workers and merges incumbents with
// the same tie-break, so the answer does not depend on the split.
template <typename Visit>
Incumbent parallel_search(int dims, int points, int workers, Visit visit) {
  const int chunks = std::clamp(workers, 1, points);
  std::vector<Incumbent> partial(static_cast<std::size_t>(chunks));
  auto run = [&](int c) {
    const int lo = points * c / chunks;
    const int hi = points * (c + 1) / chunks;
    auto& inc = partial[static_cast<std::size_t>(c)];
    enumerate(dims, points, lo, hi, [&](const std::vector<int>& idx) { visit(idx, inc); });
  };
  if (chunks == 1) {
    run(0);
  } else {
    std::vector<std::jthread> pool;
    for (int c = 0; c < chunks; ++c) pool.emplace_back(run, c);
  }
  Incumbent merged;
  for (const auto& inc : partial) {
    merged.evaluated += inc.evaluated;
    if (inc.found) merged.offer(inc.value, inc.index);
  }
  return merged;
}

}  // namespace

std::vector<double> se_best_response(const EeSubproblem& sub) {
  sub.validate();
  std::vector<double> snr(sub.direct_gain.size());
  for (std::size_t i = 0; i < snr.size(); ++i) snr[i] = sub.direct_gain[i] / sub.interference[i];
  return water_fill(snr, sub.params.p_max_w);
}

GameResult run_se_game(const NetworkScenario& scn, const EeParams& params, const GameConfig& gcfg) {
  auto respond = [&](const PowerProfile& profile, int k) {
    return se_best_response(EeSubproblem::for_cell(scn, profile, k, params));
  };
  auto utility = [&](const PowerProfile& profile, int k) { return rate(scn, profile, k); };
  return run_dynamics(scn, params, gcfg, respond, utility);
}

void GridOracleConfig::validate() const {
  if (points_per_dim < 2) throw ValidationError("points_per_dim", "must be >= 2");
  if (workers < 1) throw ValidationError("workers", "must be >= 1");
}

GridResult grid_search_system_ee(const NetworkScenario& scn, const EeParams& params,
                                 const GridOracleConfig& cfg) {
  cfg.validate();
  params.validate();
  if (cfg.objective != GridObjective::system_ee) {
    throw ValidationError("objective", "grid_search_system_ee needs the system_ee objective");
  }
  const int k_cells = scn.k_cells();
  const int n = scn.n_rbs();
  const int dims = k_cells * n;
  const int points = cfg.points_per_dim;
  grid_size(points, dims);
  const double step = params.p_max_w / (points - 1);

  auto visit = [&](const std::vector<int>& idx, Incumbent& inc) {
    PowerProfile p(k_cells, n);
    for (int k = 0; k < k_cells; ++k) {
      int used = 0;
      for (int i = 0; i < n; ++i) {
        const int level = idx[static_cast<std::size_t>(k * n + i)];
        used += level;
        p(k, i) = step * level;
      }
      // Budget on integer levels so P_t itself is reachable exactly.
      if (used > points - 1) return;
    }
    ++inc.evaluated;
    for (int k = 0; k < k_cells; ++k) {
      if (rate(scn, p, k) < params.r_min) return;
    }
    inc.offer(system_ee(scn, p, params), idx);
  };
  const auto inc = parallel_search(dims, points, cfg.workers, visit);

  GridResult out;
  out.evaluated = inc.evaluated;
  out.feasible = inc.found;
  out.best = PowerProfile(k_cells, n);
  if (inc.found) {
    out.value = inc.value;
    for (int k = 0; k < k_cells; ++k) {
      for (int i = 0; i < n; ++i) out.best(k, i) = step * inc.index[static_cast<std::size_t>(k * n + i)];
    }
  }
  return out;
}

CellGridResult grid_search_cell(const EeSubproblem& sub, const GridOracleConfig& cfg) {
  cfg.validate();
  sub.validate();
  if (cfg.objective == GridObjective::system_ee) {
    throw ValidationError("objective", "grid_search_cell needs a per-SBS objective");
  }
  const int n = sub.n_rbs();
  const int points = cfg.points_per_dim;
  grid_size(points, n);
  const double step = sub.params.p_max_w / (points - 1);
  const bool want_ee = cfg.objective == GridObjective::per_sbs_ee;

  auto visit = [&](const std::vector<int>& idx, Incumbent& inc) {
    int used = 0;
    std::vector<double> p(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      used += idx[static_cast<std::size_t>(i)];
      p[static_cast<std::size_t>(i)] = step * idx[static_cast<std::size_t>(i)];
    }
    if (used > points - 1) return;
    ++inc.evaluated;
    const double r = rate(sub.direct_gain, sub.interference, p, sub.bandwidth_hz);
    if (want_ee && r < sub.params.r_min) return;
    inc.offer(want_ee ? r / sub.params.consumed_power(p) : r, idx);
  };
  const auto inc = parallel_search(n, points, cfg.workers, visit);

  CellGridResult out;
  out.evaluated = inc.evaluated;
  out.feasible = inc.found;
  out.best.assign(static_cast<std::size_t>(n), 0.0);
  if (inc.found) {
    out.value = inc.value;
    for (int i = 0; i < n; ++i) out.best[static_cast<std::size_t>(i)] = step * inc.index[static_cast<std::size_t>(i)];
  }
  return out;
}

}  // namespace eepc
