#pragma once

// Reference computations that do not share code with the solvers they check.

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "eepc/ee_solver.hpp"
#include "eepc/metrics.hpp"
#include "eepc/scenario.hpp"

namespace eepc::oracle {

struct Maximum {
  double x = 0.0;
  double value = 0.0;
};

/// Golden-section search for the maximum of a unimodal f on [lo, hi].
Maximum golden_section_max(const std::function<double(double)>& f, double lo, double hi,
                           double tol = 1e-13);

/// W * sum log2(1 + a p / I), written out independently of metrics.cpp.
double rate_of(std::span<const double> a, std::span<const double> intf, std::span<const double> p,
               double bandwidth_hz);

double ee_of(const EeSubproblem& sub, std::span<const double> p);

/// Smallest single-RB power that meets the rate floor.
double min_power_for_rate(double a, double intf, double bandwidth_hz, double r_min);

/// Constrained EE optimum of a one-RB subproblem by golden section over
/// [p_min, P_t]. `feasible` is false when P_t cannot meet the rate floor.
struct ScalarOptimum {
  double power = 0.0;
  double ee = 0.0;
  bool feasible = false;
};
ScalarOptimum best_ee_single_rb(const EeSubproblem& sub);

/// Best EE over a points x points grid on [0, P_t]^2 with sum <= P_t and
/// rate >= R_t. Two-RB subproblems only.
struct GridOptimum {
  std::vector<double> power;
  double ee = 0.0;
  bool feasible = false;
};
GridOptimum grid_best_ee_two_rb(const EeSubproblem& sub, int points = 400);

/// Central differences of psi with step h_i = rel_step * |y_i|.
std::vector<double> fd_gradient(const TransformedPoint& y, const EeSubproblem& sub, double mu_ie,
                                double mu_e, double rel_step = 1e-6);

/// Symmetrised central-difference Hessian of psi built from psi_gradient.
/// Returned row-major, (N+1) x (N+1).
std::vector<double> fd_hessian(const TransformedPoint& y, const EeSubproblem& sub, double mu_ie,
                               double mu_e, double rel_step = 1e-5);

/// Eigenvalues of a symmetric row-major matrix, ascending.
std::vector<double> symmetric_eigenvalues(std::span<const double> m, int n);

/// Random subproblem with N RBs and a rate floor set to `floor_fraction` of
/// the rate reachable with the full budget spread evenly.
EeSubproblem random_subproblem(std::mt19937_64& rng, int n_rbs, double floor_fraction);

/// Strictly interior transformed point for `sub`, jittered off the
/// consumed-power equality.
TransformedPoint random_interior_point(std::mt19937_64& rng, const EeSubproblem& sub);

/// Fixed point of Jacobi best responses where each response is the argmax
/// of a points x points grid (two RBs per cell). Returns the last profile;
/// `converged` is set when a round leaves the profile unchanged.
struct GridGameResult {
  PowerProfile profile;
  int rounds = 0;
  bool converged = false;
};
GridGameResult grid_best_response_game(const NetworkScenario& scn, const EeParams& params,
                                       int points = 200, int max_rounds = 200);

}  // namespace eepc::oracle
