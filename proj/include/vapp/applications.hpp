// vapp - block-decomposition augmented Lagrangian solver
// Copyright 2026 vapp contributors
// Licensed under the Apache License, Version 2.0

#ifndef VAPP_APPLICATIONS_HPP_
#define VAPP_APPLICATIONS_HPP_

#include <utility>
#include <vector>

#include "vapp/core_function.hpp"
#include "vapp/problem.hpp"
#include "vapp/solver.hpp"

namespace vapp {

//! A problem together with its natural core and parameter choices.
struct AppBuild {
  BlockProblem problem;
  CoreFunctionSpec core;
  SolverParams params;
};

// ---------------------------------------------------------------------------
// Fused-penalty squared-hinge SVM.
//
// min (1/m) sum_i max(0, 1 - b_i <B_i, u>)^2 + l1 |u|_1 + l2 |D u|_1
// split as Du - z = 0 with n scalar blocks for u and one block for z.
// ---------------------------------------------------------------------------

struct FusedSvmInstance {
  MatrixXd features;  // n x m, one column per sample
  VectorXd labels;    // entries in {-1, +1}
  double lambda1 = 0.1;
  double lambda2 = 0.1;
  double gamma = 1.0;
  double rho = 1.0;
  double alpha1 = 1.0;  // proximal weight of the scalar blocks
  double alpha2 = 1.0;  // proximal weight of the z block
};

double hinge_value(const MatrixXd& features, const VectorXd& labels,
                   const VectorXd& u);
VectorXd hinge_gradient(const MatrixXd& features, const VectorXd& labels,
                        const VectorXd& u);

AppBuild build_fused_svm(const FusedSvmInstance& inst);

//! Simultaneous closed-form update of all scalar blocks.
VectorXd fused_svm_u_update(const FusedSvmInstance& inst, const VectorXd& u,
                            const VectorXd& z, const VectorXd& p);
VectorXd fused_svm_z_update(const FusedSvmInstance& inst, const VectorXd& u,
                            const VectorXd& z, const VectorXd& p);

// ---------------------------------------------------------------------------
// l1-regularized logistic regression.
//
// min (1/m) sum_i log(1 + exp(-b_i z_i)) + lambda |u|_1  s.t.  B'u - z = 0,
// with a per-iterate diagonal curvature core on the z block.
// ---------------------------------------------------------------------------

struct LogisticInstance {
  MatrixXd features;  // n x m, one column per sample
  VectorXd labels;    // entries in {-1, +1}
  double lambda = 0.01;
  double epsilon = 0.1;
  double gamma = 1.0;
  double rho = 1.0;
};

//! Raw curvature diagonal of the z block: b_i^2 s(t) s(-t) / m, t = b_i z_i.
//! The bound core clamps it to [1e-8, 1].
VectorXd logistic_curvature(const LogisticInstance& inst, const VectorXd& z);

AppBuild build_logistic(const LogisticInstance& inst);

//! One closed-form sweep: returns (u_next, z_next).
std::pair<VectorXd, VectorXd> logistic_update(const LogisticInstance& inst,
                                              const VectorXd& u,
                                              const VectorXd& z,
                                              const VectorXd& p);

// ---------------------------------------------------------------------------
// Box-constrained SVM dual.
//
// min (1/2) u'Qu + lin'u  s.t.  y'u = 0,  0 <= u <= c.
// ---------------------------------------------------------------------------

struct DsvmInstance {
  MatrixXd q;
  VectorXd lin;
  VectorXd y;  // entries in {-1, +1}
  double box_c = 1.0;
  double epsilon = 0.1;
  double gamma = 1.0;
  double rho = 1.0;
};

AppBuild build_dsvm(const DsvmInstance& inst);

//! Closed-form projected step plus the multiplier update: returns
//! (u_next, p_next) with p_next = p + rho y'u_next.
std::pair<VectorXd, VectorXd> dsvm_update(const DsvmInstance& inst,
                                          const VectorXd& u, const VectorXd& p);

// ---------------------------------------------------------------------------
// Generic block quadratic program (used by the generator and the tests).
// ---------------------------------------------------------------------------

//! min (1/2) u'Qu + c'u  s.t.  A u = b, blocks partitioned by block_sizes
//! with the given sets. Attaches the exact quadratic description.
BlockProblem build_block_qp(const MatrixXd& q, const VectorXd& c,
                            const MatrixXd& a, const VectorXd& b,
                            const std::vector<int>& block_sizes,
                            const std::vector<ConstraintSet>& sets);

}  // namespace vapp

#endif  // VAPP_APPLICATIONS_HPP_
