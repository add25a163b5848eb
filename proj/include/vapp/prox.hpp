// vapp - block-decomposition augmented Lagrangian solver
// Copyright 2026 vapp contributors
// Licensed under the Apache License, Version 2.0

#ifndef VAPP_PROX_HPP_
#define VAPP_PROX_HPP_

#include <functional>

#include "vapp/problem.hpp"

namespace vapp {

//! Soft threshold: sign(r) * max(|r| - t, 0). Requires t >= 0.
double shrink(double r, double t);
VectorXd shrink(const VectorXd& r, double t);
VectorXd shrink(const VectorXd& r, const VectorXd& t);

//! Componentwise clamp onto [lo, hi].
VectorXd project_box(const VectorXd& u, const VectorXd& lo, const VectorXd& hi);

//! Minimizes <lin, x> + (1/2) x'Wx over the set. Dense weights are solved by
//! a positive-definite factorization and are only supported on the whole
//! space; constrained sets need a diagonal weight (componentwise clamp).
VectorXd solve_quadratic_block(const VectorXd& lin, const BlockWeight& w,
                               const ConstraintSet& set);

//! Objective handed to the verification oracle: a smooth part plus an
//! optional separable l1 term. `l1` may be empty (no nonsmooth part), a
//! single entry (uniform weight), or one weight per coordinate.
struct OracleObjective {
  std::function<double(const VectorXd&)> value;
  std::function<VectorXd(const VectorXd&)> gradient;
  VectorXd l1;
  double lipschitz = 0.0;  // optional; 0 means estimate by backtracking
};

//! Proximal-gradient reference solver with halving backtracking. Used by the
//! tests to cross-check every closed-form update; never called on the solve
//! path. Stops when the prox-gradient residual drops below tol.
VectorXd inner_solve_oracle(const OracleObjective& objective,
                            const ConstraintSet& set, const VectorXd& start,
                            double tol, long max_iter = 1000000);

}  // namespace vapp

#endif  // VAPP_PROX_HPP_
