#pragma once

// Rate, energy efficiency and spectral efficiency of a power profile. Every
// other module evaluates utilities through these functions.

#include <span>
#include <vector>

#include "eepc/scenario.hpp"

namespace eepc {

/// Transmit power of every SBS on every RB, in watts.
class PowerProfile {
 public:
  PowerProfile() = default;
  PowerProfile(int k_cells, int n_rbs, double fill = 0.0);

  int k_cells() const noexcept { return k_; }
  int n_rbs() const noexcept { return n_; }

  double& operator()(int cell, int rb) { return p_[index(cell, rb)]; }
  double operator()(int cell, int rb) const { return p_[index(cell, rb)]; }

  std::span<double> cell(int k) { return {p_.data() + index(k, 0), static_cast<std::size_t>(n_)}; }
  std::span<const double> cell(int k) const {
    return {p_.data() + index(k, 0), static_cast<std::size_t>(n_)};
  }
  void set_cell(int k, std::span<const double> powers);

  std::span<const double> values() const noexcept { return p_; }

  /// Throws ValidationError on negative or non-finite entries.
  void validate() const;

  friend bool operator==(const PowerProfile&, const PowerProfile&) = default;

 private:
  std::size_t index(int cell, int rb) const noexcept {
    return static_cast<std::size_t>(cell) * static_cast<std::size_t>(n_) +
           static_cast<std::size_t>(rb);
  }

  int k_ = 0;
  int n_ = 0;
  std::vector<double> p_;
};

struct EeParams {
  double p_circuit_w = 0.05;
  double sigma = 1.0;
  double p_max_w = 0.1;
  double r_min = 3.0;

  void validate() const;
  /// Circuit plus amplifier-scaled radiated power for one SBS.
  double consumed_power(std::span<const double> powers) const noexcept;
};

/// I_k^i: macro interference + co-tier interference + noise seen by the user
/// of `cell` on `rb`.
double interference_plus_noise(const NetworkScenario& scn, const PowerProfile& profile, int cell,
                               int rb);

/// Interference-plus-noise on every RB for `cell`.
std::vector<double> interference_vector(const NetworkScenario& scn, const PowerProfile& profile,
                                        int cell);

/// Shannon rate W * sum_i log2(1 + SINR_i), bit/s.
double rate(const NetworkScenario& scn, const PowerProfile& profile, int cell);

/// Rate given direct gains, interference snapshot and own powers.
double rate(std::span<const double> direct_gain, std::span<const double> interference,
            std::span<const double> powers, double bandwidth_hz);

double ee_of_sbs(const NetworkScenario& scn, const PowerProfile& profile, int cell,
                 const EeParams& params);

double system_ee(const NetworkScenario& scn, const PowerProfile& profile, const EeParams& params);

/// Sum rate over all cells, bit/s.
double system_se(const NetworkScenario& scn, const PowerProfile& profile);

/// Sum rate normalised by the total bandwidth N*W, bit/s/Hz.
double system_se_per_hz(const NetworkScenario& scn, const PowerProfile& profile);

}  // namespace eepc
