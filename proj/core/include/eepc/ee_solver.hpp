#pragma once

// Best-response energy-efficiency maximisation for one small cell.
//
// The ratio rate / consumed power is convexified by the perspective change of
// variables
//
//   y0 = 1 / T,   yi = pi / T,   T = Pc + (1/sigma) * sum_i pi,
//
// under which the objective becomes zeta(y) = y0 * R(y1/y0, ..., yN/y0) and
// the consumed-power normalisation turns into the linear equality
// Pc*y0 + (1/sigma)*sum_i yi = 1. Inequalities (positivity, power budget,
// rate floor) go into a log barrier, the equality into a quadratic penalty,
// and the resulting unconstrained function psi is minimised by gradient
// descent while the barrier weight shrinks and the penalty weight grows.
// Powers are recovered as pi = yi / y0.

#include <functional>
#include <span>
#include <vector>

#include "eepc/metrics.hpp"
#include "eepc/scenario.hpp"

namespace eepc {

/// One SBS's view of the game with everyone else's powers frozen.
struct EeSubproblem {
  std::vector<double> direct_gain;   // a_i
  std::vector<double> interference;  // I_i, watts
  double bandwidth_hz = 1.0;
  EeParams params;

  int n_rbs() const noexcept { return static_cast<int>(direct_gain.size()); }
  void validate() const;

  /// Snapshot for `cell` against `profile` (the cell's own row is ignored).
  static EeSubproblem for_cell(const NetworkScenario& scn, const PowerProfile& profile, int cell,
                               const EeParams& params);
};

/// y = (y0, y1, ..., yN).
struct TransformedPoint {
  std::vector<double> y;

  double scale() const { return y.front(); }
  int n_rbs() const noexcept { return static_cast<int>(y.size()) - 1; }
};

struct PenaltySchedule {
  double mu_ie0 = 1.0;
  double mu_e0 = 10.0;
  double rho_ie = 0.2;
  double rho_e = 5.0;
  int outer_max = 12;
  double mu_ie_min = 1e-6;
  double eq_tol = 1e-6;

  void validate() const;
};

enum class DescentMethod {
  /// Plain negative gradient.
  steepest,
  /// Negative gradient in the metric of the separable and linear-argument
  /// curvature of psi (see InnerSolverConfig::method).
  scaled,
};

struct InnerSolverConfig {
  double grad_tol = 1e-8;  // relative to 1 + |psi|
  int max_iters = 5000;
  double armijo_c = 1e-4;
  double backtrack_beta = 0.5;
  double step_init = 1.0;
  DescentMethod method = DescentMethod::scaled;

  void validate() const;
};

TransformedPoint to_transformed(std::span<const double> power, const EeParams& params);

/// pi = yi / y0. Throws DegenerateScale when y0 <= 1e-300.
std::vector<double> from_transformed(const TransformedPoint& point);

/// zeta(y) = y0 * W * sum_i log2(1 + a_i (yi/y0) / I_i).
double zeta(const TransformedPoint& point, const EeSubproblem& sub);

/// Pc*y0 + (1/sigma)*sum_i yi - 1.
double equality_violation(const TransformedPoint& point, const EeParams& params);

/// Barrier arguments: y0..yN, the budget slack y0*Pt - sum yi, and the rate
/// slack R(y/y0) - Rt. All must be positive inside the domain.
struct BarrierSlacks {
  std::vector<double> positivity;
  double budget = 0.0;
  double rate = 0.0;

  bool interior() const noexcept;
  double min() const noexcept;
};

BarrierSlacks barrier_slacks(const TransformedPoint& point, const EeSubproblem& sub);

/// psi = -zeta + mu_ie * phi_ie + mu_e * phi_e. Throws OutOfDomain outside
/// the barrier domain.
double psi(const TransformedPoint& point, const EeSubproblem& sub, double mu_ie, double mu_e);

/// Analytic gradient of psi. Throws OutOfDomain outside the barrier domain.
std::vector<double> psi_gradient(const TransformedPoint& point, const EeSubproblem& sub,
                                 double mu_ie, double mu_e);

/// Interior starting point. Throws InfeasibleRate when no candidate clears
/// the rate floor.
TransformedPoint find_strictly_feasible(const EeSubproblem& sub);

struct InnerResult {
  TransformedPoint point;
  int iterations = 0;
  double gradient_norm = 0.0;
  double psi = 0.0;
  bool converged = false;
};

/// Called once per accepted step with the new psi value.
using StepObserver = std::function<void(int iteration, double psi)>;

/// Minimises psi for fixed weights from an interior start using backtracking
/// (Armijo) line search with a fraction-to-boundary cap of 0.99 on every
/// barrier argument.
InnerResult minimize_psi(TransformedPoint start, const EeSubproblem& sub, double mu_ie, double mu_e,
                         const InnerSolverConfig& cfg, const StepObserver& observer = {});

struct SolverDiagnostics {
  int outer_rounds = 0;
  int inner_iterations = 0;
  double final_gradient_norm = 0.0;
  double equality_violation = 0.0;
  bool inner_cap_hit = false;
  std::vector<double> equality_history;  // |violation| after each outer round
  std::vector<int> inner_history;        // inner iterations per outer round
};

struct BestResponse {
  std::vector<double> power;
  double ee = 0.0;
  double rate = 0.0;
  SolverDiagnostics diagnostics;
};

/// Penalty continuation around minimize_psi. Throws InfeasibleRate (from the
/// starting-point search) or MaxItersExceeded if outer_max rounds pass
/// without mu_ie <= mu_ie_min and |violation| <= eq_tol.
BestResponse solve_best_response(const EeSubproblem& sub, const PenaltySchedule& sched = {},
                                 const InnerSolverConfig& inner = {});

}  // namespace eepc
