#include "eepc/metrics.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

#include "eepc/errors.hpp"

namespace eepc {

PowerProfile::PowerProfile(int k_cells, int n_rbs, double fill)
    : k_(k_cells), n_(n_rbs),
      p_(static_cast<std::size_t>(k_cells) * static_cast<std::size_t>(n_rbs), fill) {
  if (k_cells < 1 || n_rbs < 1) throw ValidationError("profile", "dimensions must be >= 1");
}

void PowerProfile::set_cell(int k, std::span<const double> powers) {
  if (powers.size() != static_cast<std::size_t>(n_)) {
    throw ValidationError("profile", "cell power vector has wrong length");
  }
  std::copy(powers.begin(), powers.end(), cell(k).begin());
}

void PowerProfile::validate() const {
  for (double v : p_) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw ValidationError("profile", "powers must be finite and >= 0");
    }
  }
}

void EeParams::validate() const {
  if (!(p_circuit_w > 0.0) || !std::isfinite(p_circuit_w)) {
    throw ValidationError("p_circuit_w", "must be > 0");
  }
  if (!(sigma > 0.0 && sigma <= 1.0)) throw ValidationError("sigma", "must lie in (0, 1]");
  if (!(p_max_w > 0.0) || !std::isfinite(p_max_w)) throw ValidationError("p_max_w", "must be > 0");
  if (!(r_min >= 0.0) || !std::isfinite(r_min)) throw ValidationError("r_min", "must be >= 0");
}

double EeParams::consumed_power(std::span<const double> powers) const noexcept {
  return p_circuit_w + std::accumulate(powers.begin(), powers.end(), 0.0) / sigma;
}

double interference_plus_noise(const NetworkScenario& scn, const PowerProfile& profile, int cell,
                               int rb) {
  double total = scn.gain(0, cell, rb) * scn.mbs_power_w(rb) + scn.noise_w();
  for (int l = 0; l < scn.k_cells(); ++l) {
    if (l != cell) total += scn.gain(l + 1, cell, rb) * profile(l, rb);
  }
  return total;
}

std::vector<double> interference_vector(const NetworkScenario& scn, const PowerProfile& profile,
                                        int cell) {
  std::vector<double> out(static_cast<std::size_t>(scn.n_rbs()));
  for (int i = 0; i < scn.n_rbs(); ++i) {
    out[static_cast<std::size_t>(i)] = interference_plus_noise(scn, profile, cell, i);
  }
  return out;
}

double rate(std::span<const double> direct_gain, std::span<const double> interference,
            std::span<const double> powers, double bandwidth_hz) {
  double bits = 0.0;
  for (std::size_t i = 0; i < powers.size(); ++i) {
    bits += std::log1p(direct_gain[i] * powers[i] / interference[i]);
  }
  return bandwidth_hz * bits / std::numbers::ln2;
}

double rate(const NetworkScenario& scn, const PowerProfile& profile, int cell) {
  double bits = 0.0;
  for (int i = 0; i < scn.n_rbs(); ++i) {
    const double sinr =
        scn.direct_gain(cell, i) * profile(cell, i) / interference_plus_noise(scn, profile, cell, i);
    bits += std::log1p(sinr);
  }
  return scn.bandwidth_hz() * bits / std::numbers::ln2;
}

double ee_of_sbs(const NetworkScenario& scn, const PowerProfile& profile, int cell,
                 const EeParams& params) {
  return rate(scn, profile, cell) / params.consumed_power(profile.cell(cell));
}

double system_ee(const NetworkScenario& scn, const PowerProfile& profile, const EeParams& params) {
  double bits = 0.0;
  double power = 0.0;
  for (int k = 0; k < scn.k_cells(); ++k) {
    bits += rate(scn, profile, k);
    power += params.consumed_power(profile.cell(k));
  }
  return bits / power;
}

double system_se(const NetworkScenario& scn, const PowerProfile& profile) {
  double bits = 0.0;
  for (int k = 0; k < scn.k_cells(); ++k) bits += rate(scn, profile, k);
  return bits;
}

double system_se_per_hz(const NetworkScenario& scn, const PowerProfile& profile) {
  return system_se(scn, profile) / (scn.n_rbs() * scn.bandwidth_hz());
}

}  // namespace eepc
