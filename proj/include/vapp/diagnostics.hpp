// vapp - block-decomposition augmented Lagrangian solver
// Copyright 2026 vapp contributors
// Licensed under the Apache License, Version 2.0

#ifndef VAPP_DIAGNOSTICS_HPP_
#define VAPP_DIAGNOSTICS_HPP_

#include <string>
#include <vector>

#include "vapp/core_function.hpp"
#include "vapp/problem.hpp"
#include "vapp/solver.hpp"

namespace vapp {

//! Weighted merit of a state against a reference saddle point:
//!   m * ( D(u*, u) + (eps / 2 rho) ||p - p*||^2
//!         - (gamma eps / 2) ||Au - b||^2 )
//! where D is the core distance built at the current iterate. Nonnegative
//! and nonincreasing along valid runs.
double merit_lambda(const BlockProblem& problem, const BoundCore& core,
                    const SolverParams& params, double m_k, const VectorXd& u,
                    const VectorXd& p, const SaddleReference& ref);

struct ErgodicPoint {
  VectorXd u_bar;
  VectorXd p_bar;
  double sigma = 0.0;  // sum of the weights
  long t = 0;
};

//! Weighted average of the shadow points
//!   w~^k = ( u^{k+1}, p^k + gamma (A u^{k+1} - b) ),  k = 0..t.
//! Histories must hold u^0..u^{t+1} and p^0..p^t; weights supply m^0..m^t.
ErgodicPoint ergodic_average(const BlockProblem& problem, double gamma,
                             const std::vector<VectorXd>& u_history,
                             const std::vector<VectorXd>& p_history,
                             const std::vector<double>& weights, long t);

//! Mixed gap of the saddle reformulation, evaluated at w_bar against a
//! comparison point w:
//!   [G+J](u_bar) - [G+J](u) + p'(A u_bar - A u) + (b - A u)'(p_bar - p).
//! Nonnegative at w = (u*, p*) for any primal-feasible comparison point.
double vi_gap(const BlockProblem& problem, const VectorXd& u_bar,
              const VectorXd& p_bar, const VectorXd& u, const VectorXd& p);

struct BoundCheck {
  bool holds = true;
  long first_violation = -1;  // step index of the first failure
  double max_ratio = 0.0;     // max lhs/rhs over the horizon
};

//! Sharpest-step bound: for every t,
//!   min_{k<=t} (du_k^2 + dp_k^2) <= lambda0 / ((t+1) nu),
//! with du_k = ||u^{k+1}-u^k||, dp_k = ||p^{k+1}-p^k|| (entry k of the
//! inputs). Requires nu > 0 and lambda0 >= 0.
BoundCheck nonergodic_bound_check(const std::vector<double>& du,
                                  const std::vector<double>& dp,
                                  double lambda0, double nu);

//! Explicit rate constant: min of
//!   nu1 = (delta/2) (beta - eps (b_g + gamma lambda_max)),
//!   nu2 = delta eps ((1+delta) gamma - rho) / (2 rho^2).
double explicit_nu(double beta, double b_g, double lambda_max_ata,
                   const SolverParams& params);

struct MonotonicityCheck {
  bool applicable = false;
  std::string reason;
  bool monotone = false;
  double max_increase = 0.0;
  long first_violation = -1;
};

//! Checks that a_k = du_hbar_sq[k] + (1/rho) dp[k]^2 never increases
//! (slack 1e-10). Applicable only for anchor-independent quadratic cores
//! with h_under psd, rho <= (1+delta) gamma, and a twice differentiable
//! smooth coupler.
MonotonicityCheck lemma5_monotonicity_check(const BlockProblem& problem,
                                            const BoundCore& core,
                                            const SolverParams& params,
                                            const std::vector<double>& du_hbar_sq,
                                            const std::vector<double>& dp);

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  bool small_o = false;  // tail of k*a_k at k=t under 10% of its value at t/10
};

//! Least-squares slope of log a_k against log k over the trailing `window`
//! points. series[i] is a_{i+1}. Needs at least 20 points.
RateFit rate_fit(const std::vector<double>& series, int window);

//! Exact saddle point of a small quadratic program by active-set
//! enumeration. Requires qp_data, zero nonsmooth terms, and n <= 12.
//! The first feasible candidate in a fixed enumeration order (all-free
//! first) wins; near-zero multipliers or distinct optima set the
//! degenerate flag.
SaddleReference reference_saddle(const BlockProblem& problem);

}  // namespace vapp

#endif  // VAPP_DIAGNOSTICS_HPP_
