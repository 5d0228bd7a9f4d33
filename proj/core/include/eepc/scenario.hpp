#pragma once

// Two-tier network instances: one macro base station at the origin, K small
// cells dropped in the macrocell disc, their users, and every channel gain
// derived from the distance-based path-loss model.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace eepc {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

double distance(const Point& a, const Point& b) noexcept;

struct ScenarioConfig {
  int k_cells = 2;
  int n_rbs = 2;
  int n_sues_per_cell = 1;
  double macro_radius_m = 1000.0;
  double small_radius_m = 100.0;
  double pathloss_kappa = 0.1;
  double pathloss_chi = 4.0;
  double noise_density_dbm_per_hz = -174.0;
  double rb_bandwidth_hz = 1.0;
  /// Total macro power, split evenly over the RBs unless
  /// `mbs_power_dbm_per_rb` is set.
  double mbs_total_power_dbm = 20.0;
  std::optional<double> mbs_power_dbm_per_rb;
  /// Minimum MBS-to-SBS distance; 2 * small_radius_m when unset, the same
  /// clearance the SBSs keep from each other.
  std::optional<double> min_mbs_distance_m;
  std::uint64_t seed = 1;

  /// Throws ValidationError naming the first bad field.
  void validate() const;

  /// Per-RB macro transmit power in watts.
  double mbs_power_w_per_rb() const;
  double mbs_clearance_m() const { return min_mbs_distance_m.value_or(2.0 * small_radius_m); }
};

/// Maximum number of SBS placement draws before giving up.
inline constexpr int kPlacementAttempts = 10'000;

class NetworkScenario {
 public:
  NetworkScenario() = default;

  /// Builds a scenario from explicit geometry. Gains are recomputed from
  /// positions; throws ValidationError if any gain is zero or non-finite.
  NetworkScenario(ScenarioConfig config, Point mbs, std::vector<Point> sbs,
                  std::vector<std::vector<Point>> sues, std::vector<Point> mues,
                  std::vector<std::vector<int>> rb_assignment);

  /// Builds a scenario from explicit gains, bypassing geometry. Positions
  /// are left empty. Used for hand-built instances and tests.
  static NetworkScenario from_gains(int k_cells, int n_rbs,
                                    std::vector<double> gains, double noise_w,
                                    std::vector<double> mbs_power_w,
                                    double bandwidth_hz = 1.0);

  int k_cells() const noexcept { return k_; }
  int n_rbs() const noexcept { return n_; }
  double bandwidth_hz() const noexcept { return bandwidth_hz_; }
  double noise_w() const noexcept { return noise_w_; }
  double mbs_power_w(int rb) const { return mbs_power_w_.at(static_cast<std::size_t>(rb)); }
  std::span<const double> mbs_power_w() const noexcept { return mbs_power_w_; }

  /// Gain from transmitter `tx` (0 = MBS, 1..K = SBS) to the user served by
  /// cell `cell` (0-based) on `rb`.
  double gain(int tx, int cell, int rb) const noexcept {
    return gains_[(static_cast<std::size_t>(tx) * static_cast<std::size_t>(k_) +
                   static_cast<std::size_t>(cell)) *
                      static_cast<std::size_t>(n_) +
                  static_cast<std::size_t>(rb)];
  }
  /// Direct gain of cell `cell` (0-based) on `rb`.
  double direct_gain(int cell, int rb) const noexcept { return gain(cell + 1, cell, rb); }

  std::span<const double> gains() const noexcept { return gains_; }

  const ScenarioConfig& config() const noexcept { return config_; }
  const Point& mbs() const noexcept { return mbs_; }
  const std::vector<Point>& sbs() const noexcept { return sbs_; }
  const std::vector<std::vector<Point>>& sues() const noexcept { return sues_; }
  const std::vector<Point>& mues() const noexcept { return mues_; }
  const std::vector<std::vector<int>>& rb_assignment() const noexcept { return rb_assignment_; }
  bool has_geometry() const noexcept { return !sbs_.empty(); }

  /// Position of the user served by `cell` on `rb`.
  const Point& served_user(int cell, int rb) const;

 private:
  void check_gains() const;

  ScenarioConfig config_;
  int k_ = 0;
  int n_ = 0;
  double bandwidth_hz_ = 1.0;
  double noise_w_ = 0.0;
  std::vector<double> mbs_power_w_;
  std::vector<double> gains_;  // [(K+1)][K][N]
  Point mbs_;
  std::vector<Point> sbs_;
  std::vector<std::vector<Point>> sues_;
  std::vector<Point> mues_;
  std::vector<std::vector<int>> rb_assignment_;
};

/// Draws a reproducible scenario. Throws SpacingInfeasible when the SBS
/// placement budget runs out.
NetworkScenario generate(const ScenarioConfig& config);

/// kappa * max(d, 1)^(-chi).
double path_loss(double distance_m, double kappa, double chi) noexcept;

double dbm_to_watts(double p_dbm) noexcept;
double watts_to_dbm(double p_w) noexcept;

/// Noise power in watts over `bandwidth_hz` for a PSD in dBm/Hz.
double noise_power(double density_dbm_per_hz, double bandwidth_hz);

}  // namespace eepc
