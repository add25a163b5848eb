// vapp - block-decomposition augmented Lagrangian solver
// Copyright 2026 vapp contributors
// Licensed under the Apache License, Version 2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <memory>
#include <vector>

#include "vapp/applications.hpp"
#include "vapp/core_function.hpp"
#include "vapp/diagnostics.hpp"
#include "vapp/errors.hpp"
#include "vapp/problem.hpp"
#include "vapp/prox.hpp"
#include "vapp/solver.hpp"

using namespace vapp;

namespace {

VectorXd scalar(double v) { return VectorXd::Constant(1, v); }

//! One scalar block: min q/2 u^2 + j(u) s.t. a u = b.
BlockProblem scalar_problem(double a, double b, double q,
                            NonsmoothTerm j = NonsmoothTerm::zero()) {
  std::vector<BlockSpec> blocks(1);
  blocks[0].a = CouplingMatrix::from_dense(MatrixXd::Constant(1, 1, a));
  blocks[0].j = std::move(j);
  SmoothCoupler g = q == 0.0
                        ? SmoothCoupler::zero(1)
                        : SmoothCoupler::quadratic(MatrixXd::Constant(1, 1, q),
                                                   VectorXd::Zero(1));
  BlockProblem prob(std::move(blocks), std::move(g), scalar(b));
  prob.qp_data = std::make_shared<QpData>(
      QpData{MatrixXd::Constant(1, 1, q), VectorXd::Zero(1)});
  return prob;
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Internal;  // placeholder meaning "did not throw"
}

}  // namespace

TEST_CASE("merit vanishes at the reference and scales with the weight") {
  const BlockProblem p = scalar_problem(1.0, 0.0, 0.0);
  const BoundCore core = bind_core(CoreFunctionSpec::identity_quadratic(1.0), p);
  SolverParams params;
  params.epsilon = 0.5;
  params.gamma = 1.0;
  params.rho = 1.0;

  SaddleReference ref;
  ref.u_star = scalar(0.0);
  ref.p_star = VectorXd::Zero(1);

  CHECK(merit_lambda(p, core, params, 1.0, ref.u_star, ref.p_star, ref) ==
        doctest::Approx(0.0));

  // D(u*, u) = 1/2, dual term 0, residual penalty (gamma eps / 2) r^2 = 1/4.
  const double lam =
      merit_lambda(p, core, params, 1.0, scalar(1.0), VectorXd::Zero(1), ref);
  CHECK(lam == doctest::Approx(0.25));
  CHECK(merit_lambda(p, core, params, 0.5, scalar(1.0), VectorXd::Zero(1),
                     ref) == doctest::Approx(0.125));

  SaddleReference bad = ref;
  bad.u_star = VectorXd::Zero(2);
  CHECK(code_of([&] {
          merit_lambda(p, core, params, 1.0, scalar(1.0), VectorXd::Zero(1),
                       bad);
        }) == ErrorCode::Dimension);
  CHECK(code_of([&] {
          merit_lambda(p, core, params, 0.0, scalar(1.0), VectorXd::Zero(1),
                       ref);
        }) == ErrorCode::InvalidArgument);
}

TEST_CASE("ergodic average of shadow points") {
  const BlockProblem p = scalar_problem(1.0, 0.0, 0.0);

  SUBCASE("identical iterates average to themselves") {
    // u fixed at 2 with b = 2, so the dual shadow keeps p unchanged.
    const BlockProblem feas = scalar_problem(1.0, 2.0, 0.0);
    const std::vector<VectorXd> u_hist = {scalar(2.0), scalar(2.0), scalar(2.0)};
    const std::vector<VectorXd> p_hist = {scalar(-1.0), scalar(-1.0)};
    const ErgodicPoint pt = ergodic_average(feas, 1.0, u_hist, p_hist,
                                            {1.0, 1.0}, 1);
    CHECK(pt.u_bar[0] == doctest::Approx(2.0));
    CHECK(pt.p_bar[0] == doctest::Approx(-1.0));
    CHECK(pt.sigma == doctest::Approx(2.0));
    CHECK(pt.t == 1);
  }

  SUBCASE("midpoint of two distinct shadow points") {
    // Shadows (0,0) and (2,2): u^1 = 0, u^2 = 2, p^0 = p^1 = 0, gamma = 1.
    const std::vector<VectorXd> u_hist = {scalar(5.0), scalar(0.0), scalar(2.0)};
    const std::vector<VectorXd> p_hist = {scalar(0.0), scalar(0.0)};
    const ErgodicPoint pt =
        ergodic_average(p, 1.0, u_hist, p_hist, {1.0, 1.0}, 1);
    CHECK(pt.u_bar[0] == doctest::Approx(1.0));
    CHECK(pt.p_bar[0] == doctest::Approx(1.0));
  }

  SUBCASE("weights tilt the mean") {
    // Shadows 0 and 3 with weights (1, 0.5): mean 1.5 / 1.5 = 1.
    const std::vector<VectorXd> u_hist = {scalar(5.0), scalar(0.0), scalar(3.0)};
    const std::vector<VectorXd> p_hist = {scalar(0.0), scalar(0.0)};
    const ErgodicPoint pt =
        ergodic_average(p, 1.0, u_hist, p_hist, {1.0, 0.5}, 1);
    CHECK(pt.u_bar[0] == doctest::Approx(1.0));
    CHECK(pt.p_bar[0] == doctest::Approx(1.0));
    CHECK(pt.sigma == doctest::Approx(1.5));
  }

  SUBCASE("history length is enforced") {
    const std::vector<VectorXd> u_hist = {scalar(0.0), scalar(0.0)};
    const std::vector<VectorXd> p_hist = {scalar(0.0)};
    CHECK_THROWS_AS(ergodic_average(p, 1.0, u_hist, p_hist, {1.0, 1.0}, 1),
                    Error);
    CHECK_THROWS_AS(ergodic_average(p, 1.0, u_hist, p_hist, {}, 0), Error);
  }
}

TEST_CASE("mixed gap formula") {
  SUBCASE("identical points give zero") {
    const BlockProblem p = scalar_problem(1.0, 0.5, 2.0);
    const double g =
        vi_gap(p, scalar(0.7), scalar(-0.2), scalar(0.7), scalar(-0.2));
    CHECK(g == doctest::Approx(0.0));
  }

  SUBCASE("hand-computed l1 case") {
    const BlockProblem p =
        scalar_problem(1.0, 0.0, 0.0, NonsmoothTerm::l1(1.0));
    const double g =
        vi_gap(p, scalar(1.0), scalar(0.0), scalar(0.0), scalar(0.0));
    CHECK(g == doctest::Approx(1.0));
  }

  SUBCASE("dimension mismatch") {
    const BlockProblem p = scalar_problem(1.0, 0.0, 0.0);
    CHECK_THROWS_AS(
        vi_gap(p, VectorXd::Zero(2), scalar(0.0), scalar(0.0), scalar(0.0)),
        Error);
  }
}

TEST_CASE("sharpest-step bound check") {
  SUBCASE("a decreasing run satisfies its own bound") {
    // du_k = dp_k = 1/(k+1): min over k <= t is 2/(t+1)^2, bound with
    // lambda0 = 2, nu = 1 is 2/(t+1). The min decays quadratically, the
    // bound only linearly, so the check holds everywhere.
    std::vector<double> du, dp;
    for (int k = 1; k <= 50; ++k) {
      du.push_back(1.0 / k);
      dp.push_back(1.0 / k);
    }
    const BoundCheck chk = nonergodic_bound_check(du, dp, 2.0, 1.0);
    CHECK(chk.holds);
    CHECK(chk.first_violation == -1);
    CHECK(chk.max_ratio <= 1.0 + 1e-9);
  }

  SUBCASE("a stationary run is trivially within bound") {
    const std::vector<double> zero(10, 0.0);
    const BoundCheck chk = nonergodic_bound_check(zero, zero, 0.0, 0.5);
    CHECK(chk.holds);
    CHECK(chk.max_ratio == 0.0);
  }

  SUBCASE("a flat step sequence eventually violates") {
    // Constant steps of size 1 against bound 1/(t+1): fails from t = 1.
    const std::vector<double> du(5, 1.0);
    const std::vector<double> dp(5, 0.0);
    const BoundCheck chk = nonergodic_bound_check(du, dp, 1.0, 1.0);
    CHECK_FALSE(chk.holds);
    CHECK(chk.first_violation == 1);
    CHECK(chk.max_ratio > 1.0);
  }

  SUBCASE("parameter guards") {
    CHECK_THROWS_AS(nonergodic_bound_check({1.0}, {1.0}, 1.0, 0.0), Error);
    CHECK_THROWS_AS(nonergodic_bound_check({1.0}, {1.0}, -1.0, 1.0), Error);
    CHECK_THROWS_AS(nonergodic_bound_check({1.0}, {1.0, 2.0}, 1.0, 1.0), Error);
  }
}

TEST_CASE("explicit rate constant") {
  SolverParams params;
  params.epsilon = 0.25;
  params.gamma = 1.0;
  params.rho = 1.0;
  params.delta = 1.0;
  // nu1 = (1/2)(1 - 0.25 * (0 + 1)) = 0.375, nu2 = 0.25 * (2 - 1) / 2 = 0.125.
  CHECK(explicit_nu(1.0, 0.0, 1.0, params) == doctest::Approx(0.125));
  // Shrinking rho moves the dual constant up; nu1 takes over.
  params.rho = 0.25;
  // nu2 = 1 * 0.25 * (2 - 0.25) / (2 * 0.0625) = 3.5 -> min is nu1 = 0.375.
  CHECK(explicit_nu(1.0, 0.0, 1.0, params) == doctest::Approx(0.375));
  // Outside the strict regime the candidate goes nonpositive.
  params.rho = 1.0;
  params.epsilon = 2.0;
  CHECK(explicit_nu(1.0, 0.0, 1.0, params) <= 0.0);
}

TEST_CASE("step-energy monotonicity check") {
  const BlockProblem p = scalar_problem(1.0, 0.0, 0.0);
  const BoundCore quad = bind_core(
      CoreFunctionSpec::jacobian_quadratic(scalar(1.0), scalar(1.0), {}), p);
  SolverParams params;
  params.epsilon = 1.0;
  params.gamma = 1.0;
  params.rho = 1.0;

  SUBCASE("monotone sequences pass") {
    const std::vector<double> du_hbar = {4.0, 3.0, 3.0, 1.0};
    const std::vector<double> dp = {2.0, 1.0, 1.0, 0.5};
    const MonotonicityCheck chk =
        lemma5_monotonicity_check(p, quad, params, du_hbar, dp);
    CHECK(chk.applicable);
    CHECK(chk.monotone);
    CHECK(chk.first_violation == -1);
  }

  SUBCASE("an increase is pinpointed") {
    const std::vector<double> du_hbar = {1.0, 1.0, 2.0};
    const std::vector<double> dp = {0.0, 0.0, 0.0};
    const MonotonicityCheck chk =
        lemma5_monotonicity_check(p, quad, params, du_hbar, dp);
    CHECK(chk.applicable);
    CHECK_FALSE(chk.monotone);
    CHECK(chk.first_violation == 2);
    CHECK(chk.max_increase == doctest::Approx(1.0));
  }

  SUBCASE("anchor-dependent cores are out of scope") {
    const BoundCore newton = bind_core(
        CoreFunctionSpec::newton_diagonal(
            [](const VectorXd& x) { return VectorXd::Ones(x.size()); }, 1e-8,
            2.0),
        p);
    const MonotonicityCheck chk =
        lemma5_monotonicity_check(p, newton, params, {1.0}, {1.0});
    CHECK_FALSE(chk.applicable);
    CHECK(!chk.reason.empty());
  }

  SUBCASE("a non-twice-differentiable smooth part is out of scope") {
    std::vector<BlockSpec> blocks(1);
    blocks[0].a = CouplingMatrix::from_dense(MatrixXd::Identity(1, 1));
    SmoothCoupler g;
    g.value = [](const VectorXd& u) { return std::abs(u[0]); };
    g.gradient = [](const VectorXd& u) {
      return VectorXd(scalar(u[0] >= 0.0 ? 1.0 : -1.0));
    };
    g.lipschitz_grad = 1.0;
    g.twice_differentiable = false;
    const BlockProblem rough(std::move(blocks), std::move(g), scalar(0.0));
    const BoundCore core = bind_core(
        CoreFunctionSpec::jacobian_quadratic(scalar(1.0), scalar(1.0), {}),
        rough);
    const MonotonicityCheck chk =
        lemma5_monotonicity_check(rough, core, params, {1.0}, {1.0});
    CHECK_FALSE(chk.applicable);
  }

  SUBCASE("an oversized dual step is out of scope") {
    SolverParams wild = params;
    wild.rho = 3.0;
    const MonotonicityCheck chk =
        lemma5_monotonicity_check(p, quad, params, {1.0}, {1.0});
    CHECK(chk.applicable);  // baseline sanity
    const MonotonicityCheck bad =
        lemma5_monotonicity_check(p, quad, wild, {1.0}, {1.0});
    CHECK_FALSE(bad.applicable);
    CHECK(!bad.reason.empty());
  }
}

TEST_CASE("log-log rate fit") {
  std::vector<double> inv_k, inv_k2;
  for (int k = 1; k <= 200; ++k) {
    inv_k.push_back(1.0 / k);
    inv_k2.push_back(1.0 / (static_cast<double>(k) * k));
  }

  const RateFit f1 = rate_fit(inv_k, 100);
  CHECK(f1.slope == doctest::Approx(-1.0).epsilon(0.01));
  CHECK_FALSE(f1.small_o);

  const RateFit f2 = rate_fit(inv_k2, 100);
  CHECK(f2.slope == doctest::Approx(-2.0).epsilon(0.01));
  CHECK(f2.small_o);

  CHECK_THROWS_AS(rate_fit(std::vector<double>(10, 1.0), 5), Error);
  CHECK_THROWS_AS(rate_fit(inv_k, 1), Error);
}

TEST_CASE("reference solver on pinned scalar and symmetric programs") {
  // min u^2/2 s.t. u = 1.
  const BlockProblem p1 = scalar_problem(1.0, 1.0, 1.0);
  const SaddleReference r1 = reference_saddle(p1);
  CHECK(r1.u_star[0] == doctest::Approx(1.0));
  CHECK(r1.p_star[0] == doctest::Approx(-1.0));
  CHECK(r1.objective_star == doctest::Approx(0.5));
  CHECK_FALSE(r1.degenerate);

  // min ||u||^2/2 s.t. u1 + u2 = 2.
  std::vector<BlockSpec> blocks(2);
  MatrixXd ones_row(1, 2);
  ones_row << 1, 1;
  blocks[0].a = CouplingMatrix::from_dense(ones_row.leftCols(1));
  blocks[1].a = CouplingMatrix::from_dense(ones_row.rightCols(1));
  BlockProblem p2(std::move(blocks),
                  SmoothCoupler::quadratic(MatrixXd::Identity(2, 2),
                                           VectorXd::Zero(2)),
                  scalar(2.0));
  p2.qp_data = std::make_shared<QpData>(
      QpData{MatrixXd::Identity(2, 2), VectorXd::Zero(2)});
  const SaddleReference r2 = reference_saddle(p2);
  CHECK((r2.u_star - VectorXd::Ones(2)).norm() < 1e-12);
  CHECK(r2.p_star[0] == doctest::Approx(-1.0));
}

TEST_CASE("reference solver agrees with the projected-gradient oracle") {
  // Box QP in 3 variables with one coupling row. The reference gives
  // (u*, p*); u* must then minimize the p*-shifted objective over the box,
  // which the first-order oracle can confirm independently.
  Rng rng(29);
  const MatrixXd m = rng.normal_matrix(3, 3);
  const MatrixXd q = m.transpose() * m + MatrixXd::Identity(3, 3);
  const VectorXd c = rng.normal_vector(3);
  MatrixXd a(1, 3);
  a << 1, -1, 2;
  const VectorXd b = scalar(0.3);

  std::vector<BlockSpec> blocks(1);
  blocks[0].a = CouplingMatrix::from_dense(a);
  blocks[0].set = ConstraintSet::box(VectorXd::Zero(3), VectorXd::Ones(3));
  BlockProblem p(std::move(blocks), SmoothCoupler::quadratic(q, c), b);
  p.qp_data = std::make_shared<QpData>(QpData{q, c});

  const SaddleReference ref = reference_saddle(p);
  CHECK(p.primal_residual(ref.u_star).lpNorm<Eigen::Infinity>() < 1e-9);

  OracleObjective obj;
  const VectorXd shift = a.transpose() * ref.p_star;
  obj.value = [&](const VectorXd& u) {
    return 0.5 * u.dot(q * u) + (c + shift).dot(u);
  };
  obj.gradient = [&](const VectorXd& u) { return VectorXd(q * u + c + shift); };
  obj.lipschitz = std::sqrt(spectral_norm_sq(q));
  const VectorXd check = inner_solve_oracle(obj, p.block(0).set,
                                            VectorXd::Zero(3), 1e-12, 2000000);
  CHECK((check - ref.u_star).lpNorm<Eigen::Infinity>() < 1e-9);
}

TEST_CASE("reference solver flags weakly active bounds") {
  // min ||u||^2/2 s.t. u1 + u2 = 0, u >= 0: solution 0 with zero
  // multipliers on the active bounds.
  std::vector<BlockSpec> blocks(1);
  MatrixXd a(1, 2);
  a << 1, 1;
  blocks[0].a = CouplingMatrix::from_dense(a);
  blocks[0].set = ConstraintSet::orthant();
  BlockProblem p(std::move(blocks),
                 SmoothCoupler::quadratic(MatrixXd::Identity(2, 2),
                                          VectorXd::Zero(2)),
                 VectorXd::Zero(1));
  p.qp_data = std::make_shared<QpData>(
      QpData{MatrixXd::Identity(2, 2), VectorXd::Zero(2)});
  const SaddleReference ref = reference_saddle(p);
  CHECK(ref.u_star.norm() < 1e-12);
  CHECK(ref.degenerate);
}

TEST_CASE("reference solver guards its domain") {
  // No exact quadratic description.
  std::vector<BlockSpec> blocks(1);
  blocks[0].a = CouplingMatrix::from_dense(MatrixXd::Identity(1, 1));
  const BlockProblem bare(std::move(blocks), SmoothCoupler::zero(1),
                          VectorXd::Zero(1));
  CHECK(code_of([&] { reference_saddle(bare); }) == ErrorCode::Unavailable);

  // Nonsmooth terms are out of scope.
  const BlockProblem l1p = scalar_problem(1.0, 0.0, 1.0, NonsmoothTerm::l1(1.0));
  CHECK(code_of([&] { reference_saddle(l1p); }) == ErrorCode::Unavailable);

  // Enumeration refuses large problems.
  std::vector<BlockSpec> big(1);
  big[0].a = CouplingMatrix::from_dense(MatrixXd::Identity(13, 13));
  BlockProblem bigp(std::move(big), SmoothCoupler::zero(13), VectorXd::Zero(13));
  bigp.qp_data = std::make_shared<QpData>(
      QpData{MatrixXd::Identity(13, 13), VectorXd::Zero(13)});
  CHECK(code_of([&] { reference_saddle(bigp); }) == ErrorCode::SizeLimit);
}
