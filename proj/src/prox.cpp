// vapp - block-decomposition augmented Lagrangian solver
// Copyright 2026 vapp contributors
// Licensed under the Apache License, Version 2.0

#include "vapp/prox.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "vapp/errors.hpp"

namespace vapp {

double shrink(double r, double t) {
  require(t >= 0.0, ErrorCode::InvalidArgument,
          "shrink threshold must be nonnegative");
  if (r > t) return r - t;
  if (r < -t) return r + t;
  return 0.0;
}

VectorXd shrink(const VectorXd& r, double t) {
  VectorXd out(r.size());
  for (int i = 0; i < r.size(); ++i) out[i] = shrink(r[i], t);
  return out;
}

VectorXd shrink(const VectorXd& r, const VectorXd& t) {
  require(r.size() == t.size(), ErrorCode::Dimension,
          "shrink: threshold length mismatch");
  VectorXd out(r.size());
  for (int i = 0; i < r.size(); ++i) out[i] = shrink(r[i], t[i]);
  return out;
}

VectorXd project_box(const VectorXd& u, const VectorXd& lo, const VectorXd& hi) {
  return ConstraintSet::box(lo, hi).project(u);
}

VectorXd solve_quadratic_block(const VectorXd& lin, const BlockWeight& w,
                               const ConstraintSet& set) {
  require(w.size() == lin.size(), ErrorCode::Dimension,
          "quadratic block: weight does not match linear term");
  if (w.diagonal) {
    VectorXd x(lin.size());
    for (int i = 0; i < lin.size(); ++i) {
      require(w.diag[i] > 0.0, ErrorCode::Singular,
              "quadratic block: diagonal weight must be positive");
      x[i] = -lin[i] / w.diag[i];
    }
    return set.project(x);
  }
  require(set.kind() == ConstraintSet::Kind::AllSpace, ErrorCode::Unsupported,
          "quadratic block: dense weight requires an unconstrained block");
  Eigen::LDLT<MatrixXd> ldlt(w.dense);
  require(ldlt.info() == Eigen::Success && ldlt.isPositive(),
          ErrorCode::Singular,
          "quadratic block: dense weight is not positive definite");
  VectorXd x = ldlt.solve(-lin);
  require(x.allFinite(), ErrorCode::Singular,
          "quadratic block: factorization produced non-finite values");
  return x;
}

namespace {

VectorXd prox_step(const OracleObjective& objective, const ConstraintSet& set,
                   const VectorXd& x, const VectorXd& grad, double step) {
  VectorXd y = x - step * grad;
  if (objective.l1.size() == 1) {
    y = shrink(y, step * objective.l1[0]);
  } else if (objective.l1.size() > 1) {
    y = shrink(y, VectorXd(step * objective.l1));
  }
  return set.project(y);
}

}  // namespace

VectorXd inner_solve_oracle(const OracleObjective& objective,
                            const ConstraintSet& set, const VectorXd& start,
                            double tol, long max_iter) {
  require(tol > 0.0, ErrorCode::InvalidArgument,
          "oracle tolerance must be positive");
  require(static_cast<bool>(objective.value) &&
              static_cast<bool>(objective.gradient),
          ErrorCode::InvalidArgument, "oracle objective needs value and gradient");
  if (objective.l1.size() > 1) {
    require(objective.l1.size() == start.size(), ErrorCode::Dimension,
            "oracle: l1 weight length mismatch");
  }

  VectorXd x = set.project(start);
  double step = objective.lipschitz > 0.0 ? 1.0 / objective.lipschitz : 1.0;
  double sx = objective.value(x);

  for (long it = 0; it < max_iter; ++it) {
    const VectorXd grad = objective.gradient(x);
    VectorXd next = prox_step(objective, set, x, grad, step);
    double snext = objective.value(next);
    // Halve until the smooth part satisfies the sufficient-decrease model;
    // the l1 and indicator parts are handled exactly by the prox step and
    // must stay out of this comparison. The slack is relative because near
    // the solution the comparison sits at rounding level of the values.
    const double slack = 1e-12 * (1.0 + std::abs(sx));
    while (snext > sx + grad.dot(next - x) +
                       (next - x).squaredNorm() / (2.0 * step) + slack &&
           step > 1e-18) {
      step *= 0.5;
      next = prox_step(objective, set, x, grad, step);
      snext = objective.value(next);
    }
    require(step > 1e-18, ErrorCode::Numerical,
            "oracle: backtracking collapsed the step");
    const double residual = (x - next).norm() / step;
    x = next;
    sx = snext;
    if (residual <= tol) return x;
  }
  fail(ErrorCode::NoConvergence, "oracle: iteration cap reached");
}

}  // namespace vapp
