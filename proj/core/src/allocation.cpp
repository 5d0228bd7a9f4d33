#include "eepc/allocation.hpp"

#include <algorithm>
#include <cmath>

#include "eepc/errors.hpp"

namespace eepc {

std::vector<double> water_fill(std::span<const double> snr_per_watt, double budget, double tol) {
  if (snr_per_watt.empty()) throw ValidationError("snr_per_watt", "must not be empty");
  if (!(budget > 0.0)) throw ValidationError("budget", "must be > 0");
  std::vector<double> floor(snr_per_watt.size());
  for (std::size_t i = 0; i < floor.size(); ++i) {
    if (!(snr_per_watt[i] > 0.0)) throw ValidationError("snr_per_watt", "must be > 0");
    floor[i] = 1.0 / snr_per_watt[i];
  }

  auto allocated = [&](double level) {
    double total = 0.0;
    for (double f : floor) total += std::max(0.0, level - f);
    return total;
  };

  double lo = *std::min_element(floor.begin(), floor.end());
  double hi = lo + budget;
  double level = hi;
  for (int it = 0; it < 400; ++it) {
    level = 0.5 * (lo + hi);
    const double total = allocated(level);
    if (std::abs(total - budget) <= tol) break;
    (total > budget ? hi : lo) = level;
  }

  // Exact level on the active set.
  double active_floor = 0.0;
  int active = 0;
  for (double f : floor) {
    if (level - f > 0.0) {
      active_floor += f;
      ++active;
    }
  }
  if (active > 0) level = (budget + active_floor) / active;

  std::vector<double> p(floor.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = std::max(0.0, level - floor[i]);
  return p;
}

}  // namespace eepc
