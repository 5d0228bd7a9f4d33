#include "eepc/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "eepc/errors.hpp"

namespace eepc {

namespace {

// std::uniform_real_distribution is implementation-defined; this keeps the
// draw sequence identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  Point in_disc(const Point& centre, double radius) {
    for (;;) {
      const double x = uniform(-1.0, 1.0);
      const double y = uniform(-1.0, 1.0);
      if (x * x + y * y <= 1.0) return {centre.x + radius * x, centre.y + radius * y};
    }
  }

 private:
  std::mt19937_64 engine_;
};

void require(bool ok, const char* field, const char* message) {
  if (!ok) throw ValidationError(field, message);
}

}  // namespace

double distance(const Point& a, const Point& b) noexcept {
  return std::hypot(a.x - b.x, a.y - b.y);
}

void ScenarioConfig::validate() const {
  require(k_cells >= 1, "k_cells", "must be >= 1");
  require(n_rbs >= 1, "n_rbs", "must be >= 1");
  require(n_sues_per_cell >= 1 && n_sues_per_cell <= n_rbs, "n_sues_per_cell",
          "must satisfy 1 <= n_sues_per_cell <= n_rbs");
  require(macro_radius_m > 0.0 && std::isfinite(macro_radius_m), "macro_radius_m", "must be > 0");
  require(small_radius_m > 0.0 && std::isfinite(small_radius_m), "small_radius_m", "must be > 0");
  require(pathloss_kappa > 0.0 && std::isfinite(pathloss_kappa), "pathloss_kappa", "must be > 0");
  require(pathloss_chi > 0.0 && std::isfinite(pathloss_chi), "pathloss_chi", "must be > 0");
  require(std::isfinite(noise_density_dbm_per_hz), "noise_density_dbm_per_hz", "must be finite");
  require(rb_bandwidth_hz > 0.0 && std::isfinite(rb_bandwidth_hz), "rb_bandwidth_hz", "must be > 0");
  require(std::isfinite(mbs_total_power_dbm), "mbs_total_power_dbm", "must be finite");
  if (min_mbs_distance_m) {
    require(*min_mbs_distance_m >= 0.0 && *min_mbs_distance_m < macro_radius_m,
            "min_mbs_distance_m", "must satisfy 0 <= value < macro_radius_m");
  }
  if (mbs_power_dbm_per_rb) {
    require(std::isfinite(*mbs_power_dbm_per_rb), "mbs_power_dbm_per_rb", "must be finite");
  }
}

double ScenarioConfig::mbs_power_w_per_rb() const {
  if (mbs_power_dbm_per_rb) return dbm_to_watts(*mbs_power_dbm_per_rb);
  return dbm_to_watts(mbs_total_power_dbm) / static_cast<double>(n_rbs);
}

double path_loss(double distance_m, double kappa, double chi) noexcept {
  return kappa * std::pow(std::max(distance_m, 1.0), -chi);
}

double dbm_to_watts(double p_dbm) noexcept { return std::pow(10.0, (p_dbm - 30.0) / 10.0); }

double watts_to_dbm(double p_w) noexcept { return 10.0 * std::log10(p_w) + 30.0; }

double noise_power(double density_dbm_per_hz, double bandwidth_hz) {
  if (!(bandwidth_hz > 0.0)) throw ValidationError("bandwidth_hz", "must be > 0");
  return dbm_to_watts(density_dbm_per_hz) * bandwidth_hz;
}

NetworkScenario::NetworkScenario(ScenarioConfig config, Point mbs, std::vector<Point> sbs,
                                 std::vector<std::vector<Point>> sues, std::vector<Point> mues,
                                 std::vector<std::vector<int>> rb_assignment)
    : config_(std::move(config)),
      mbs_(mbs),
      sbs_(std::move(sbs)),
      sues_(std::move(sues)),
      mues_(std::move(mues)),
      rb_assignment_(std::move(rb_assignment)) {
  config_.validate();
  k_ = config_.k_cells;
  n_ = config_.n_rbs;
  if (sbs_.size() != static_cast<std::size_t>(k_)) throw ValidationError("sbs", "expected k_cells positions");
  if (sues_.size() != static_cast<std::size_t>(k_)) throw ValidationError("sues", "expected k_cells groups");
  if (rb_assignment_.size() != static_cast<std::size_t>(k_)) {
    throw ValidationError("rb_assignment", "expected k_cells rows");
  }
  for (int k = 0; k < k_; ++k) {
    const auto& row = rb_assignment_[static_cast<std::size_t>(k)];
    if (row.size() != static_cast<std::size_t>(n_)) {
      throw ValidationError("rb_assignment", "expected n_rbs entries per cell");
    }
    for (int u : row) {
      if (u < 0 || static_cast<std::size_t>(u) >= sues_[static_cast<std::size_t>(k)].size()) {
        throw ValidationError("rb_assignment", "SUE index out of range");
      }
    }
  }

  bandwidth_hz_ = config_.rb_bandwidth_hz;
  noise_w_ = noise_power(config_.noise_density_dbm_per_hz, bandwidth_hz_);
  mbs_power_w_.assign(static_cast<std::size_t>(n_), config_.mbs_power_w_per_rb());

  gains_.resize(static_cast<std::size_t>(k_ + 1) * static_cast<std::size_t>(k_) *
                static_cast<std::size_t>(n_));
  for (int tx = 0; tx <= k_; ++tx) {
    const Point& from = tx == 0 ? mbs_ : sbs_[static_cast<std::size_t>(tx - 1)];
    for (int k = 0; k < k_; ++k) {
      for (int i = 0; i < n_; ++i) {
        const double d = distance(from, served_user(k, i));
        gains_[(static_cast<std::size_t>(tx) * static_cast<std::size_t>(k_) +
                static_cast<std::size_t>(k)) *
                   static_cast<std::size_t>(n_) +
               static_cast<std::size_t>(i)] =
            path_loss(d, config_.pathloss_kappa, config_.pathloss_chi);
      }
    }
  }
  check_gains();
}

NetworkScenario NetworkScenario::from_gains(int k_cells, int n_rbs, std::vector<double> gains,
                                            double noise_w, std::vector<double> mbs_power_w,
                                            double bandwidth_hz) {
  if (k_cells < 1) throw ValidationError("k_cells", "must be >= 1");
  if (n_rbs < 1) throw ValidationError("n_rbs", "must be >= 1");
  if (gains.size() != static_cast<std::size_t>(k_cells + 1) * static_cast<std::size_t>(k_cells) *
                          static_cast<std::size_t>(n_rbs)) {
    throw ValidationError("gains", "expected (K+1)*K*N entries");
  }
  if (!(noise_w > 0.0) || !std::isfinite(noise_w)) throw ValidationError("noise_w", "must be > 0");
  if (mbs_power_w.size() != static_cast<std::size_t>(n_rbs)) {
    throw ValidationError("mbs_power_w", "expected n_rbs entries");
  }
  for (double p : mbs_power_w) {
    if (!(p >= 0.0) || !std::isfinite(p)) throw ValidationError("mbs_power_w", "must be >= 0");
  }
  if (!(bandwidth_hz > 0.0)) throw ValidationError("bandwidth_hz", "must be > 0");

  NetworkScenario s;
  s.config_.k_cells = k_cells;
  s.config_.n_rbs = n_rbs;
  s.config_.n_sues_per_cell = 1;
  s.config_.rb_bandwidth_hz = bandwidth_hz;
  s.k_ = k_cells;
  s.n_ = n_rbs;
  s.bandwidth_hz_ = bandwidth_hz;
  s.noise_w_ = noise_w;
  s.mbs_power_w_ = std::move(mbs_power_w);
  s.gains_ = std::move(gains);
  s.check_gains();
  return s;
}

const Point& NetworkScenario::served_user(int cell, int rb) const {
  const auto k = static_cast<std::size_t>(cell);
  const auto u = static_cast<std::size_t>(rb_assignment_.at(k).at(static_cast<std::size_t>(rb)));
  return sues_.at(k).at(u);
}

void NetworkScenario::check_gains() const {
  for (double g : gains_) {
    if (!(g > 0.0) || !std::isfinite(g)) {
      throw ValidationError("gains", "every channel gain must be positive and finite");
    }
  }
}

NetworkScenario generate(const ScenarioConfig& config) {
  config.validate();
  Rng rng(config.seed);
  const Point mbs{0.0, 0.0};
  const double min_spacing = 2.0 * config.small_radius_m;

  std::vector<Point> sbs;
  sbs.reserve(static_cast<std::size_t>(config.k_cells));
  int attempts = 0;
  while (sbs.size() < static_cast<std::size_t>(config.k_cells)) {
    if (attempts++ >= kPlacementAttempts) {
      throw SpacingInfeasible("could not place " + std::to_string(config.k_cells) +
                              " small cells with spacing " + std::to_string(min_spacing) +
                              " m within " + std::to_string(kPlacementAttempts) + " draws");
    }
    const Point candidate = rng.in_disc(mbs, config.macro_radius_m);
    if (distance(candidate, mbs) < config.mbs_clearance_m()) continue;
    const bool clear = std::all_of(sbs.begin(), sbs.end(), [&](const Point& p) {
      return distance(p, candidate) >= min_spacing;
    });
    if (clear) sbs.push_back(candidate);
  }

  std::vector<std::vector<Point>> sues(static_cast<std::size_t>(config.k_cells));
  for (int k = 0; k < config.k_cells; ++k) {
    auto& cell = sues[static_cast<std::size_t>(k)];
    for (int u = 0; u < config.n_sues_per_cell; ++u) {
      cell.push_back(rng.in_disc(sbs[static_cast<std::size_t>(k)], config.small_radius_m));
    }
  }

  // One MUE per RB. They carry no optimised quantity.
  std::vector<Point> mues;
  for (int i = 0; i < config.n_rbs; ++i) mues.push_back(rng.in_disc(mbs, config.macro_radius_m));

  std::vector<std::vector<int>> assignment(static_cast<std::size_t>(config.k_cells));
  for (auto& row : assignment) {
    for (int i = 0; i < config.n_rbs; ++i) row.push_back(i % config.n_sues_per_cell);
  }

  return NetworkScenario(config, mbs, std::move(sbs), std::move(sues), std::move(mues),
                         std::move(assignment));
}

}  // namespace eepc
