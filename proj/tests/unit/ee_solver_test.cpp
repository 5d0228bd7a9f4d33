#include "eepc/ee_solver.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "eepc/errors.hpp"
#include "oracles.hpp"

namespace eepc {
namespace {

EeSubproblem make_sub(std::vector<double> a, std::vector<double> intf, EeParams params, double w = 1.0) {
  EeSubproblem s;
  s.direct_gain = std::move(a);
  s.interference = std::move(intf);
  s.bandwidth_hz = w;
  s.params = params;
  return s;
}

EeParams unit_params(double r_min = 0.0) {
  EeParams p;
  p.p_circuit_w = 1.0;
  p.sigma = 1.0;
  p.p_max_w = 2.0;
  p.r_min = r_min;
  return p;
}

TEST(Transform, WorkedExamples) {
  const auto zero = to_transformed(std::vector<double>{0.0, 0.0, 0.0}, unit_params());
  EXPECT_EQ(zero.y, (std::vector<double>{1.0, 0.0, 0.0, 0.0}));
  const auto one = to_transformed(std::vector<double>{1.0}, unit_params());
  EXPECT_EQ(one.y, (std::vector<double>{0.5, 0.5}));
  EXPECT_EQ(from_transformed({{0.5, 0.5}}), std::vector<double>{1.0});
  EXPECT_EQ(from_transformed({{1.0, 0.0, 0.0}}), (std::vector<double>{0.0, 0.0}));
}

TEST(Transform, RoundTripIsIdentity) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 0.1);
  std::uniform_real_distribution<double> sig(0.2, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    EeParams params;
    params.sigma = sig(rng);
    std::vector<double> p(static_cast<std::size_t>(1 + trial % 6));
    for (auto& v : p) v = u(rng);
    const auto y = to_transformed(p, params);
    EXPECT_NEAR(equality_violation(y, params), 0.0, 1e-15);
    const auto back = from_transformed(y);
    for (std::size_t i = 0; i < p.size(); ++i) EXPECT_NEAR(back[i], p[i], 1e-12 * p[i]);
  }
}

TEST(Transform, Errors) {
  EXPECT_THROW(from_transformed({{1e-310, 1.0}}), DegenerateScale);
  EXPECT_THROW(from_transformed({{1.0}}), ValidationError);
  EXPECT_THROW(to_transformed(std::vector<double>{-1e-3}, unit_params()), ValidationError);
}

TEST(Zeta, WorkedExamples) {
  const auto sub = make_sub({1.0}, {1.0}, unit_params());
  EXPECT_EQ(zeta({{1.0, 0.0}}, sub), 0.0);
  EXPECT_NEAR(zeta({{0.5, 0.5}}, sub), 0.5, 1e-15);
}

TEST(Zeta, EqualsEnergyEfficiencyAtTransformedPoint) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(1e-4, 0.1);
  for (int trial = 0; trial < 500; ++trial) {
    const auto sub = oracle::random_subproblem(rng, 1 + trial % 5, 0.0);
    std::vector<double> p(static_cast<std::size_t>(sub.n_rbs()));
    for (auto& v : p) v = u(rng);
    const double ee = oracle::ee_of(sub, p);
    EXPECT_NEAR(zeta(to_transformed(p, sub.params), sub), ee, 1e-12 * ee);
  }
}

TEST(Psi, ZeroWeightsLeaveMinusZeta) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 100; ++trial) {
    const auto sub = oracle::random_subproblem(rng, 3, 0.3);
    const auto y = oracle::random_interior_point(rng, sub);
    EXPECT_EQ(psi(y, sub, 0.0, 0.0), -zeta(y, sub));
  }
}

TEST(Psi, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const auto sub = oracle::random_subproblem(rng, 1 + trial % 4, 0.4);
    const auto y = oracle::random_interior_point(rng, sub);
    const double mu_ie = trial % 2 ? 1e-3 : 1.0;
    const double mu_e = 10.0;
    const auto g = psi_gradient(y, sub, mu_ie, mu_e);
    const auto fd = oracle::fd_gradient(y, sub, mu_ie, mu_e);
    double diff = 0.0;
    double norm = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      diff += (g[i] - fd[i]) * (g[i] - fd[i]);
      norm += fd[i] * fd[i];
    }
    EXPECT_LE(std::sqrt(diff), 1e-5 * std::sqrt(norm)) << "trial " << trial;
  }
}

TEST(Psi, EqualityPenaltyVanishesOnTheConstraint) {
  // Pc = sigma = 1: 0.5 + 0.25 + 0.25 = 1 exactly.
  const auto sub = make_sub({1.0, 0.5}, {1.0, 1.0}, unit_params());
  const TransformedPoint y{{0.5, 0.25, 0.25}};
  ASSERT_EQ(equality_violation(y, sub.params), 0.0);
  EXPECT_EQ(psi(y, sub, 0.1, 1e6), psi(y, sub, 0.1, 0.0));
  const auto g0 = psi_gradient(y, sub, 0.1, 0.0);
  const auto g1 = psi_gradient(y, sub, 0.1, 1e6);
  for (std::size_t i = 0; i < g0.size(); ++i) EXPECT_EQ(g0[i], g1[i]);
}

TEST(Psi, OutsideTheDomainThrows) {
  const auto sub = make_sub({1.0, 0.5}, {1.0, 1.0}, unit_params());
  EXPECT_THROW(psi({{0.5, 0.0, 0.25}}, sub, 1.0, 1.0), OutOfDomain);
  EXPECT_THROW(psi_gradient({{0.5, 0.0, 0.25}}, sub, 1.0, 1.0), OutOfDomain);
  // Budget slack: 0.5 * 2 - (0.6 + 0.6) < 0.
  EXPECT_THROW(psi({{0.5, 0.6, 0.6}}, sub, 1.0, 1.0), OutOfDomain);
}

TEST(Psi, HessianIsPositiveSemidefiniteAtInteriorPoints) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 30; ++trial) {
    const auto sub = oracle::random_subproblem(rng, 1 + trial % 3, 0.5);
    const auto y = oracle::random_interior_point(rng, sub);
    const int n = static_cast<int>(y.y.size());
    const auto h = oracle::fd_hessian(y, sub, 0.1, 10.0);
    double fro = 0.0;
    for (double v : h) fro += v * v;
    const auto eig = oracle::symmetric_eigenvalues(h, n);
    EXPECT_GE(eig.front(), -1e-8 * std::sqrt(fro)) << "trial " << trial;
  }
}

TEST(FindStrictlyFeasible, ZeroFloorAlwaysSucceeds) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 100; ++trial) {
    const auto sub = oracle::random_subproblem(rng, 1 + trial % 6, 0.0);
    const auto y = find_strictly_feasible(sub);
    const auto s = barrier_slacks(y, sub);
    EXPECT_TRUE(s.interior());
    EXPECT_GT(s.min(), 0.0);
  }
}

TEST(FindStrictlyFeasible, StartsStrictlyInsideWithABindingFloor) {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 100; ++trial) {
    const auto sub = oracle::random_subproblem(rng, 1 + trial % 6, 0.9);
    const auto y = find_strictly_feasible(sub);
    const auto s = barrier_slacks(y, sub);
    for (double v : s.positivity) EXPECT_GT(v, 0.0);
    EXPECT_GT(s.budget, 0.0);
    EXPECT_GT(s.rate, 0.0);
  }
}

TEST(FindStrictlyFeasible, UnreachableFloorIsInfeasible) {
  const auto sub = make_sub({1e-5}, {1e-12}, unit_params(1e6));
  EXPECT_THROW(find_strictly_feasible(sub), InfeasibleRate);
  EXPECT_THROW(solve_best_response(sub), InfeasibleRate);
}

TEST(MinimizePsi, AcceptedStepsNeverIncreasePsi) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const auto sub = oracle::random_subproblem(rng, 1 + trial % 4, 0.5);
    const auto start = find_strictly_feasible(sub);
    double last = psi(start, sub, 0.1, 10.0);
    int steps = 0;
    const auto res = minimize_psi(start, sub, 0.1, 10.0, InnerSolverConfig{}, [&](int it, double v) {
      EXPECT_EQ(it, steps + 1);
      EXPECT_LE(v, last);
      last = v;
      ++steps;
    });
    EXPECT_EQ(res.iterations, steps);
    EXPECT_EQ(res.psi, last);
    EXPECT_TRUE(barrier_slacks(res.point, sub).interior());
  }
}

TEST(MinimizePsi, SteepestDescentAlsoDescends) {
  std::mt19937_64 rng(12);
  const auto sub = oracle::random_subproblem(rng, 2, 0.3);
  InnerSolverConfig cfg;
  cfg.method = DescentMethod::steepest;
  cfg.max_iters = 200;
  const auto start = find_strictly_feasible(sub);
  const auto res = minimize_psi(start, sub, 1.0, 10.0, cfg);
  EXPECT_LE(res.psi, psi(start, sub, 1.0, 10.0));
}

TEST(SolveBestResponse, SingleRbInstanceMatchesGoldenSection) {
  EeParams params;
  params.p_circuit_w = 0.1;
  params.sigma = 1.0;
  params.p_max_w = 0.1;
  params.r_min = 0.0;
  const auto sub = make_sub({1e-5}, {1e-12}, params);
  const auto ref = oracle::best_ee_single_rb(sub);
  const auto br = solve_best_response(sub);
  EXPECT_NEAR(br.ee, ref.ee, 0.01 * ref.ee);
  EXPECT_NEAR(oracle::ee_of(sub, br.power), br.ee, 1e-9 * br.ee);
  EXPECT_LE(br.power[0], params.p_max_w * (1.0 + 1e-9));
}

TEST(SolveBestResponse, TwoRbInstanceMatchesGridSearch) {
  EeParams params;
  params.p_circuit_w = 0.05;
  params.p_max_w = 0.1;
  params.r_min = 3.0;
  const auto sub = make_sub({3e-6, 8e-7}, {2e-12, 5e-12}, params);
  const auto ref = oracle::grid_best_ee_two_rb(sub, 400);
  ASSERT_TRUE(ref.feasible);
  const auto br = solve_best_response(sub);
  EXPECT_GE(br.ee, 0.99 * ref.ee);
  EXPECT_GE(br.rate, params.r_min * (1.0 - 1e-6));
  EXPECT_LE(std::accumulate(br.power.begin(), br.power.end(), 0.0), params.p_max_w * (1.0 + 1e-6));
}

TEST(SolveBestResponse, BindingBudgetIsSpentInFull) {
  // Circuit power dwarfs the budget, so EE rises all the way to P_t.
  EeParams params;
  params.p_circuit_w = 1.0;
  params.p_max_w = 0.1;
  params.r_min = 0.0;
  const auto sub = make_sub({1e-6, 2e-6}, {1e-9, 1e-9}, params);
  const auto ref = oracle::grid_best_ee_two_rb(sub, 400);
  // The grid optimum sits on the budget face up to a few grid steps.
  ASSERT_NEAR(ref.power[0] + ref.power[1], params.p_max_w, 0.02 * params.p_max_w);
  const auto br = solve_best_response(sub);
  EXPECT_NEAR(br.power[0] + br.power[1], params.p_max_w, 1e-3 * params.p_max_w);
}

TEST(SolveBestResponse, RandomInstancesAreFeasibleAndMonotoneInEquality) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 40; ++trial) {
    const auto sub = oracle::random_subproblem(rng, 1 + trial % 4, 0.6);
    const auto br = solve_best_response(sub);
    for (double p : br.power) EXPECT_GT(p, 0.0);
    EXPECT_LE(std::accumulate(br.power.begin(), br.power.end(), 0.0), sub.params.p_max_w * (1.0 + 1e-6));
    EXPECT_GE(br.rate, sub.params.r_min * (1.0 - 1e-6));
    const auto& h = br.diagnostics.equality_history;
    ASSERT_FALSE(h.empty());
    EXPECT_EQ(static_cast<int>(h.size()), br.diagnostics.outer_rounds);
    EXPECT_LE(br.diagnostics.equality_violation, PenaltySchedule{}.eq_tol);
    for (std::size_t i = 1; i < h.size(); ++i) EXPECT_LE(h[i], h[i - 1] * (1.0 + 1e-9) + 1e-15) << "trial " << trial;
  }
}

TEST(SolveBestResponse, TooFewOuterRoundsCarriesBestPower) {
  std::mt19937_64 rng(14);
  const auto sub = oracle::random_subproblem(rng, 3, 0.3);
  PenaltySchedule sched;
  sched.outer_max = 1;
  try {
    solve_best_response(sub, sched);
    FAIL() << "expected MaxItersExceeded";
  } catch (const MaxItersExceeded& e) {
    ASSERT_EQ(e.best_power().size(), 3u);
    for (double p : e.best_power()) EXPECT_GT(p, 0.0);
  }
}

TEST(Config, PenaltyScheduleValidation) {
  const auto field_of = [](PenaltySchedule s) {
    try {
      s.validate();
    } catch (const ValidationError& e) {
      return e.field();
    }
    return std::string();
  };
  EXPECT_EQ(field_of({}), "");
  EXPECT_EQ(field_of({.mu_ie0 = 0.0}), "mu_ie0");
  EXPECT_EQ(field_of({.mu_e0 = -1.0}), "mu_e0");
  EXPECT_EQ(field_of({.rho_ie = 1.0}), "rho_ie");
  EXPECT_EQ(field_of({.rho_e = 1.0}), "rho_e");
  EXPECT_EQ(field_of({.outer_max = 0}), "outer_max");
  EXPECT_EQ(field_of({.mu_ie_min = 0.0}), "mu_ie_min");
  EXPECT_EQ(field_of({.eq_tol = 0.0}), "eq_tol");
}

TEST(Config, InnerSolverValidation) {
  const auto field_of = [](InnerSolverConfig c) {
    try {
      c.validate();
    } catch (const ValidationError& e) {
      return e.field();
    }
    return std::string();
  };
  EXPECT_EQ(field_of({}), "");
  EXPECT_EQ(field_of({.grad_tol = 0.0}), "grad_tol");
  EXPECT_EQ(field_of({.max_iters = 0}), "max_iters");
  EXPECT_EQ(field_of({.armijo_c = 1.0}), "armijo_c");
  EXPECT_EQ(field_of({.backtrack_beta = 0.0}), "backtrack_beta");
  EXPECT_EQ(field_of({.step_init = 0.0}), "step_init");
}

TEST(Subproblem, Validation) {
  EXPECT_THROW(make_sub({}, {}, unit_params()).validate(), ValidationError);
  EXPECT_THROW(make_sub({1.0}, {1.0, 2.0}, unit_params()).validate(), ValidationError);
  EXPECT_THROW(make_sub({0.0}, {1.0}, unit_params()).validate(), ValidationError);
  EXPECT_THROW(make_sub({1.0}, {0.0}, unit_params()).validate(), ValidationError);
  EXPECT_THROW(make_sub({1.0}, {1.0}, unit_params(), 0.0).validate(), ValidationError);
}

TEST(Subproblem, ForCellSnapshotsInterference) {
  ScenarioConfig c;
  c.k_cells = 3;
  c.n_rbs = 2;
  const auto scn = generate(c);
  PowerProfile p(3, 2, 0.02);
  const auto sub = EeSubproblem::for_cell(scn, p, 1, EeParams{});
  ASSERT_EQ(sub.n_rbs(), 2);
  for (int i = 0; i < 2; ++i) {
    EXPECT_EQ(sub.direct_gain[static_cast<std::size_t>(i)], scn.direct_gain(1, i));
    EXPECT_EQ(sub.interference[static_cast<std::size_t>(i)], interference_plus_noise(scn, p, 1, i));
  }
}

}  // namespace
}  // namespace eepc
