#pragma once

#include <span>
#include <vector>

namespace eepc {

/// Water-filling over parallel channels: maximises sum_i log(1 + g_i p_i)
/// subject to sum_i p_i <= budget, p >= 0, where g_i = gain / interference.
/// The water level is bracketed by bisection until the allocated total is
/// within `tol` watts of the budget, then solved exactly on the resulting
/// active set so the allocation sums to the budget up to rounding.
std::vector<double> water_fill(std::span<const double> snr_per_watt, double budget,
                               double tol = 1e-10);

}  // namespace eepc
