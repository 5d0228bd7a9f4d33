#include "eepc/ee_solver.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>
#include <string>

#include "eepc/allocation.hpp"
#include "eepc/errors.hpp"

namespace eepc {

namespace {

constexpr double kMinScale = 1e-300;
constexpr double kBoundaryFraction = 0.01;

// Everything psi and its derivatives need at one point.
struct Evaluation {
  double psi = 0.0;
  double zeta = 0.0;
  double rate = 0.0;  // R(y / y0)
  double budget_slack = 0.0;
  double rate_slack = 0.0;
  double violation = 0.0;
};

std::optional<Evaluation> evaluate(std::span<const double> y, const EeSubproblem& sub,
                                   double mu_ie, double mu_e) {
  const auto& prm = sub.params;
  const double y0 = y[0];
  double log_sum = 0.0;
  for (double v : y) {
    if (!(v > 0.0)) return std::nullopt;
    log_sum += std::log(v);
  }
  double radiated = 0.0;
  double bits = 0.0;
  for (std::size_t i = 1; i < y.size(); ++i) {
    radiated += y[i];
    bits += std::log1p(sub.direct_gain[i - 1] * (y[i] / y0) / sub.interference[i - 1]);
  }
  Evaluation ev;
  ev.rate = sub.bandwidth_hz * bits / std::numbers::ln2;
  ev.zeta = y0 * ev.rate;
  ev.budget_slack = y0 * prm.p_max_w - radiated;
  ev.rate_slack = ev.rate - prm.r_min;
  ev.violation = prm.p_circuit_w * y0 + radiated / prm.sigma - 1.0;
  if (!(ev.budget_slack > 0.0) || !(ev.rate_slack > 0.0) || !std::isfinite(ev.rate)) {
    return std::nullopt;
  }
  const double barrier = -log_sum - std::log(ev.budget_slack) - std::log(ev.rate_slack);
  ev.psi = -ev.zeta + mu_ie * barrier + mu_e * ev.violation * ev.violation;
  return ev;
}

// q_i = d zeta / d y_i for i >= 1.
std::vector<double> rate_slopes(std::span<const double> y, const EeSubproblem& sub) {
  std::vector<double> q(y.size() - 1);
  const double scale = sub.bandwidth_hz / std::numbers::ln2;
  for (std::size_t i = 0; i < q.size(); ++i) {
    const double g = sub.direct_gain[i] / sub.interference[i];
    q[i] = scale * g / (1.0 + g * y[i + 1] / y[0]);
  }
  return q;
}

std::vector<double> gradient(std::span<const double> y, const EeSubproblem& sub, double mu_ie,
                             double mu_e, const Evaluation& ev) {
  const auto& prm = sub.params;
  const double y0 = y[0];
  const auto q = rate_slopes(y, sub);
  double qt = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) qt += q[i] * y[i + 1] / y0;

  std::vector<double> g(y.size());
  g[0] = -(ev.rate - qt) +
         mu_ie * (-1.0 / y0 - prm.p_max_w / ev.budget_slack + qt / (y0 * ev.rate_slack)) +
         2.0 * mu_e * ev.violation * prm.p_circuit_w;
  for (std::size_t i = 1; i < y.size(); ++i) {
    const double qi = q[i - 1];
    g[i] = -qi + mu_ie * (-1.0 / y[i] + 1.0 / ev.budget_slack - qi / (y0 * ev.rate_slack)) +
           2.0 * mu_e * ev.violation / prm.sigma;
  }
  return g;
}

// Positive-definite metric for the scaled method: curvature of -zeta, of the
// positivity and budget barriers, of the equality penalty, and the
// outer-product part of the rate barrier. Only the rate barrier's own second
// derivative is left out.
Eigen::MatrixXd scaling_metric(std::span<const double> y, const EeSubproblem& sub, double mu_ie,
                               double mu_e, const Evaluation& ev) {
  const auto& prm = sub.params;
  const auto n = static_cast<Eigen::Index>(y.size());
  const double y0 = y[0];
  const double scale = sub.bandwidth_hz / std::numbers::ln2;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);

  Eigen::VectorXd rate_grad(n);
  rate_grad(0) = 0.0;
  for (Eigen::Index i = 1; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i - 1);
    const double g = sub.direct_gain[k] / sub.interference[k];
    const double t = y[static_cast<std::size_t>(i)] / y0;
    const double denom = 1.0 + g * t;
    // -zeta term: perspective of a concave log; curvature along (-t, 1).
    const double w = scale * g * g / (denom * denom * y0);
    m(0, 0) += w * t * t;
    m(0, i) -= w * t;
    m(i, 0) -= w * t;
    m(i, i) += w;
    const double qi = scale * g / denom;
    rate_grad(i) = qi / y0;
    rate_grad(0) -= qi * t / y0;
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    m(j, j) += mu_ie / (y[static_cast<std::size_t>(j)] * y[static_cast<std::size_t>(j)]);
  }
  Eigen::VectorXd budget_grad = Eigen::VectorXd::Constant(n, -1.0);
  budget_grad(0) = prm.p_max_w;
  m += (mu_ie / (ev.budget_slack * ev.budget_slack)) * budget_grad * budget_grad.transpose();
  m += (mu_ie / (ev.rate_slack * ev.rate_slack)) * rate_grad * rate_grad.transpose();
  Eigen::VectorXd eq_grad = Eigen::VectorXd::Constant(n, 1.0 / prm.sigma);
  eq_grad(0) = prm.p_circuit_w;
  m += (2.0 * mu_e) * eq_grad * eq_grad.transpose();
  return m;
}

double norm2(std::span<const double> v) {
  return std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
}

// Largest step keeping every linear barrier argument at >= 1% of its value.
double boundary_step(std::span<const double> y, std::span<const double> d, const EeParams& prm,
                     double budget_slack) {
  double limit = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < y.size(); ++j) {
    if (d[j] < 0.0) limit = std::min(limit, (1.0 - kBoundaryFraction) * y[j] / -d[j]);
  }
  double d_budget = d[0] * prm.p_max_w;
  for (std::size_t i = 1; i < d.size(); ++i) d_budget -= d[i];
  if (d_budget < 0.0) limit = std::min(limit, (1.0 - kBoundaryFraction) * budget_slack / -d_budget);
  return limit;
}

}  // namespace

void EeSubproblem::validate() const {
  if (direct_gain.empty()) throw ValidationError("direct_gain", "must not be empty");
  if (interference.size() != direct_gain.size()) {
    throw ValidationError("interference", "must match direct_gain in length");
  }
  for (double a : direct_gain) {
    if (!(a > 0.0) || !std::isfinite(a)) throw ValidationError("direct_gain", "must be > 0");
  }
  for (double v : interference) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError("interference", "must be > 0");
  }
  if (!(bandwidth_hz > 0.0)) throw ValidationError("bandwidth_hz", "must be > 0");
  params.validate();
}

EeSubproblem EeSubproblem::for_cell(const NetworkScenario& scn, const PowerProfile& profile,
                                    int cell, const EeParams& params) {
  EeSubproblem sub;
  sub.direct_gain.resize(static_cast<std::size_t>(scn.n_rbs()));
  for (int i = 0; i < scn.n_rbs(); ++i) {
    sub.direct_gain[static_cast<std::size_t>(i)] = scn.direct_gain(cell, i);
  }
  sub.interference = interference_vector(scn, profile, cell);
  sub.bandwidth_hz = scn.bandwidth_hz();
  sub.params = params;
  return sub;
}

void PenaltySchedule::validate() const {
  if (!(mu_ie0 > 0.0)) throw ValidationError("mu_ie0", "must be > 0");
  if (!(mu_e0 > 0.0)) throw ValidationError("mu_e0", "must be > 0");
  if (!(rho_ie > 0.0 && rho_ie < 1.0)) throw ValidationError("rho_ie", "must lie in (0, 1)");
  if (!(rho_e > 1.0)) throw ValidationError("rho_e", "must be > 1");
  if (outer_max < 1) throw ValidationError("outer_max", "must be >= 1");
  if (!(mu_ie_min > 0.0)) throw ValidationError("mu_ie_min", "must be > 0");
  if (!(eq_tol > 0.0)) throw ValidationError("eq_tol", "must be > 0");
}

void InnerSolverConfig::validate() const {
  if (!(grad_tol > 0.0)) throw ValidationError("grad_tol", "must be > 0");
  if (max_iters < 1) throw ValidationError("max_iters", "must be >= 1");
  if (!(armijo_c > 0.0 && armijo_c < 1.0)) throw ValidationError("armijo_c", "must lie in (0, 1)");
  if (!(backtrack_beta > 0.0 && backtrack_beta < 1.0)) {
    throw ValidationError("backtrack_beta", "must lie in (0, 1)");
  }
  if (!(step_init > 0.0)) throw ValidationError("step_init", "must be > 0");
}

TransformedPoint to_transformed(std::span<const double> power, const EeParams& params) {
  const double total = params.consumed_power(power);
  if (!(total > 0.0)) throw ValidationError("power", "consumed power must be > 0");
  TransformedPoint out;
  out.y.reserve(power.size() + 1);
  out.y.push_back(1.0 / total);
  for (double p : power) {
    if (!(p >= 0.0)) throw ValidationError("power", "must be >= 0");
    out.y.push_back(p / total);
  }
  return out;
}

std::vector<double> from_transformed(const TransformedPoint& point) {
  if (point.y.size() < 2) throw ValidationError("y", "needs at least two entries");
  const double y0 = point.y[0];
  if (!(y0 > kMinScale)) throw DegenerateScale("y0 collapsed to " + std::to_string(y0));
  std::vector<double> p(point.y.size() - 1);
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = point.y[i + 1] / y0;
  return p;
}

double zeta(const TransformedPoint& point, const EeSubproblem& sub) {
  const auto& y = point.y;
  const double y0 = y[0];
  double bits = 0.0;
  for (std::size_t i = 1; i < y.size(); ++i) {
    bits += std::log1p(sub.direct_gain[i - 1] * (y[i] / y0) / sub.interference[i - 1]);
  }
  return y0 * (sub.bandwidth_hz * bits / std::numbers::ln2);
}

double equality_violation(const TransformedPoint& point, const EeParams& params) {
  const auto& y = point.y;
  const double radiated = std::accumulate(y.begin() + 1, y.end(), 0.0);
  return params.p_circuit_w * y[0] + radiated / params.sigma - 1.0;
}

bool BarrierSlacks::interior() const noexcept { return min() > 0.0; }

double BarrierSlacks::min() const noexcept {
  double m = std::min(budget, rate);
  for (double v : positivity) m = std::min(m, v);
  return m;
}

BarrierSlacks barrier_slacks(const TransformedPoint& point, const EeSubproblem& sub) {
  BarrierSlacks s;
  s.positivity = point.y;
  const double radiated = std::accumulate(point.y.begin() + 1, point.y.end(), 0.0);
  s.budget = point.y[0] * sub.params.p_max_w - radiated;
  s.rate = (point.y[0] > 0.0 ? zeta(point, sub) / point.y[0] : 0.0) - sub.params.r_min;
  return s;
}

double psi(const TransformedPoint& point, const EeSubproblem& sub, double mu_ie, double mu_e) {
  const auto ev = evaluate(point.y, sub, mu_ie, mu_e);
  if (!ev) throw OutOfDomain("psi evaluated outside the barrier domain");
  return ev->psi;
}

std::vector<double> psi_gradient(const TransformedPoint& point, const EeSubproblem& sub,
                                 double mu_ie, double mu_e) {
  const auto ev = evaluate(point.y, sub, mu_ie, mu_e);
  if (!ev) throw OutOfDomain("psi gradient evaluated outside the barrier domain");
  return gradient(point.y, sub, mu_ie, mu_e, *ev);
}

TransformedPoint find_strictly_feasible(const EeSubproblem& sub) {
  sub.validate();
  const auto& prm = sub.params;
  const auto n = static_cast<std::size_t>(sub.n_rbs());
  // Margin on the rate slack so the barrier starts finite and well away from
  // its pole.
  const double margin = 1e-9 * std::max(prm.r_min, 1.0);
  auto clears = [&](const std::vector<double>& p) {
    const double total = std::accumulate(p.begin(), p.end(), 0.0);
    if (!(total < prm.p_max_w)) return false;
    if (std::any_of(p.begin(), p.end(), [](double v) { return !(v > 0.0); })) return false;
    return rate(sub.direct_gain, sub.interference, p, sub.bandwidth_hz) - prm.r_min > margin;
  };

  const double uniform = prm.p_max_w / static_cast<double>(n);
  for (double alpha : {0.9, 0.7, 0.5, 0.3, 0.1}) {
    std::vector<double> p(n, alpha * uniform);
    if (clears(p)) return to_transformed(p, prm);
  }

  std::vector<double> snr(n);
  for (std::size_t i = 0; i < n; ++i) snr[i] = sub.direct_gain[i] / sub.interference[i];

  // Nearly all power on the best RB; the rest keeps the start strictly
  // positive.
  const auto best = static_cast<std::size_t>(std::max_element(snr.begin(), snr.end()) - snr.begin());
  for (double alpha : {0.9, 0.99, 0.999}) {
    std::vector<double> p(n, 1e-6 * alpha * prm.p_max_w / static_cast<double>(n));
    p[best] = alpha * prm.p_max_w * (1.0 - 1e-6);
    if (clears(p)) return to_transformed(p, prm);
  }

  // Rate-maximising split of almost the whole budget.
  for (double alpha : {0.99, 0.999, 0.9999}) {
    auto p = water_fill(snr, alpha * prm.p_max_w);
    const double floor = 1e-9 * prm.p_max_w / static_cast<double>(n);
    for (auto& v : p) v = std::max(v, floor);
    if (clears(p)) return to_transformed(p, prm);
  }

  throw InfeasibleRate("rate floor " + std::to_string(prm.r_min) +
                       " bit/s is unreachable within the power budget");
}

InnerResult minimize_psi(TransformedPoint start, const EeSubproblem& sub, double mu_ie, double mu_e,
                         const InnerSolverConfig& cfg, const StepObserver& observer) {
  auto y = std::move(start.y);
  auto ev = evaluate(y, sub, mu_ie, mu_e);
  if (!ev) throw OutOfDomain("inner solve started outside the barrier domain");

  InnerResult out;
  const auto n = y.size();
  std::vector<double> d(n);
  std::vector<double> trial(n);
  double step = cfg.step_init;
  for (int it = 0;; ++it) {
    const auto g = gradient(y, sub, mu_ie, mu_e, *ev);
    out.gradient_norm = norm2(g);
    out.iterations = it;
    if (out.gradient_norm <= cfg.grad_tol * (1.0 + std::abs(ev->psi))) {
      out.converged = true;
      break;
    }
    if (it >= cfg.max_iters) break;

    if (cfg.method == DescentMethod::scaled) {
      const Eigen::MatrixXd m = scaling_metric(y, sub, mu_ie, mu_e, *ev);
      const Eigen::Map<const Eigen::VectorXd> gv(g.data(), static_cast<Eigen::Index>(n));
      const Eigen::VectorXd dv = -m.llt().solve(gv);
      for (std::size_t j = 0; j < n; ++j) d[j] = dv(static_cast<Eigen::Index>(j));
      step = 1.0;
    } else {
      for (std::size_t j = 0; j < n; ++j) d[j] = -g[j];
      step = std::min(2.0 * step, 1e12 * cfg.step_init);
    }
    const double slope = std::inner_product(g.begin(), g.end(), d.begin(), 0.0);
    if (!(slope < 0.0)) break;
    step = std::min(step, boundary_step(y, d, sub.params, ev->budget_slack));

    bool accepted = false;
    std::optional<Evaluation> next;
    while (step > 0.0) {
      for (std::size_t j = 0; j < n; ++j) trial[j] = y[j] + step * d[j];
      next = evaluate(trial, sub, mu_ie, mu_e);
      if (next && next->rate_slack >= kBoundaryFraction * ev->rate_slack &&
          next->psi <= ev->psi + cfg.armijo_c * step * slope) {
        accepted = true;
        break;
      }
      step *= cfg.backtrack_beta;
      if (step * norm2(d) <= 1e-16 * norm2(y)) break;
    }
    if (!accepted) {
      // No representable decrease left along d.
      out.converged = out.gradient_norm <= 1e-6 * (1.0 + std::abs(ev->psi));
      break;
    }
    y.swap(trial);
    ev = next;
    if (observer) observer(it + 1, ev->psi);
  }
  out.psi = ev->psi;
  out.point.y = std::move(y);
  return out;
}

BestResponse solve_best_response(const EeSubproblem& sub, const PenaltySchedule& sched,
                                 const InnerSolverConfig& inner) {
  sched.validate();
  inner.validate();
  auto point = find_strictly_feasible(sub);

  SolverDiagnostics diag;
  // The equality is dimensionless while zeta carries the units of EE, so the
  // penalty weight is taken relative to the objective at the start.
  const double objective_scale = std::max(1.0, zeta(point, sub));
  double mu_ie = sched.mu_ie0;
  double mu_e = sched.mu_e0 * objective_scale;
  bool done = false;
  for (int round = 0; round < sched.outer_max; ++round) {
    auto res = minimize_psi(std::move(point), sub, mu_ie, mu_e, inner);
    point = std::move(res.point);
    ++diag.outer_rounds;
    diag.inner_iterations += res.iterations;
    diag.inner_history.push_back(res.iterations);
    diag.final_gradient_norm = res.gradient_norm;
    diag.inner_cap_hit = diag.inner_cap_hit || !res.converged;
    diag.equality_violation = std::abs(equality_violation(point, sub.params));
    diag.equality_history.push_back(diag.equality_violation);
    if (mu_ie <= sched.mu_ie_min && diag.equality_violation <= sched.eq_tol) {
      done = true;
      break;
    }
    mu_ie *= sched.rho_ie;
    mu_e *= sched.rho_e;
  }

  BestResponse out;
  out.power = from_transformed(point);
  out.rate = rate(sub.direct_gain, sub.interference, out.power, sub.bandwidth_hz);
  out.ee = out.rate / sub.params.consumed_power(out.power);
  out.diagnostics = std::move(diag);
  if (!done) {
    throw MaxItersExceeded("penalty continuation did not terminate within " +
                               std::to_string(sched.outer_max) + " outer rounds",
                           out.power);
  }
  return out;
}

}  // namespace eepc
