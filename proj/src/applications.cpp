// vapp - block-decomposition augmented Lagrangian solver
// Copyright 2026 vapp contributors
// Licensed under the Apache License, Version 2.0

#include "vapp/applications.hpp"

#include <cmath>
#include <memory>
#include <utility>

#include "vapp/errors.hpp"
#include "vapp/prox.hpp"

namespace vapp {
namespace {

constexpr double kLogisticFloor = 1e-8;
constexpr double kLogisticCeil = 1.0;

void check_labels(const VectorXd& labels) {
  for (int i = 0; i < labels.size(); ++i) {
    require(labels[i] == 1.0 || labels[i] == -1.0, ErrorCode::Validation,
            "labels must be +1 or -1");
  }
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double softplus(double x) {
  if (x > 0.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

// D' column products for the pairwise difference operator, without forming D.
// Column j of D has +1 in row j (if j < n-1) and -1 in row j-1 (if j >= 1).
double diff_col_dot(const VectorXd& v, int j, int n) {
  double s = 0.0;
  if (j < n - 1) s += v[j];
  if (j >= 1) s -= v[j - 1];
  return s;
}

double diff_col_norm_sq(int j, int n) {
  return (j < n - 1 ? 1.0 : 0.0) + (j >= 1 ? 1.0 : 0.0);
}

}  // namespace

// ---------------------------------------------------------------------------
// Fused-penalty squared-hinge SVM
// ---------------------------------------------------------------------------

double hinge_value(const MatrixXd& features, const VectorXd& labels,
                   const VectorXd& u) {
  require(features.rows() == u.size(), ErrorCode::Dimension,
          "hinge: feature rows must match u");
  require(features.cols() == labels.size(), ErrorCode::Dimension,
          "hinge: feature columns must match labels");
  const int m = static_cast<int>(labels.size());
  const VectorXd scores = features.transpose() * u;
  double total = 0.0;
  for (int i = 0; i < m; ++i) {
    const double margin = std::max(0.0, 1.0 - labels[i] * scores[i]);
    total += margin * margin;
  }
  return total / static_cast<double>(m);
}

VectorXd hinge_gradient(const MatrixXd& features, const VectorXd& labels,
                        const VectorXd& u) {
  require(features.rows() == u.size(), ErrorCode::Dimension,
          "hinge: feature rows must match u");
  require(features.cols() == labels.size(), ErrorCode::Dimension,
          "hinge: feature columns must match labels");
  const int m = static_cast<int>(labels.size());
  const VectorXd scores = features.transpose() * u;
  VectorXd coeff(m);
  for (int i = 0; i < m; ++i) {
    coeff[i] = -2.0 * labels[i] * std::max(0.0, 1.0 - labels[i] * scores[i]);
  }
  return (features * coeff) / static_cast<double>(m);
}

AppBuild build_fused_svm(const FusedSvmInstance& inst) {
  const int n = static_cast<int>(inst.features.rows());
  const int m = static_cast<int>(inst.features.cols());
  require(n >= 2, ErrorCode::InvalidArgument,
          "fused svm needs at least two features");
  require(m >= 1, ErrorCode::InvalidArgument, "fused svm needs samples");
  require(inst.labels.size() == m, ErrorCode::Dimension,
          "labels must match the sample count");
  check_labels(inst.labels);
  require(inst.lambda1 >= 0.0 && inst.lambda2 >= 0.0,
          ErrorCode::InvalidArgument, "penalties must be nonnegative");
  require(inst.gamma > 0.0 && inst.rho > 0.0, ErrorCode::InvalidArgument,
          "gamma and rho must be positive");
  require(inst.alpha1 >= 0.0 && inst.alpha2 >= 0.0, ErrorCode::InvalidArgument,
          "proximal weights must be nonnegative");

  const MatrixXd diff = build_difference_matrix(n).to_dense();

  std::vector<BlockSpec> blocks;
  blocks.reserve(n + 1);
  for (int j = 0; j < n; ++j) {
    BlockSpec spec;
    spec.a = CouplingMatrix::from_dense(diff.col(j));
    spec.set = ConstraintSet::all_space();
    spec.j = NonsmoothTerm::l1(inst.lambda1);
    blocks.push_back(std::move(spec));
  }
  BlockSpec zspec;
  zspec.a = CouplingMatrix::scaled_identity(n - 1, -1.0);
  zspec.set = ConstraintSet::all_space();
  zspec.j = NonsmoothTerm::l1(inst.lambda2);
  blocks.push_back(std::move(zspec));

  SmoothCoupler coupler;
  const MatrixXd features = inst.features;
  const VectorXd labels = inst.labels;
  coupler.value = [features, labels, n](const VectorXd& x) {
    return hinge_value(features, labels, x.head(n));
  };
  coupler.gradient = [features, labels, n](const VectorXd& x) {
    VectorXd g = VectorXd::Zero(x.size());
    g.head(n) = hinge_gradient(features, labels, x.head(n));
    return g;
  };
  coupler.lipschitz_grad =
      2.0 / static_cast<double>(m) * spectral_norm_sq(features);
  coupler.twice_differentiable = false;

  VectorXd theta(1);
  theta[0] = inst.gamma;
  VectorXd alpha(n + 1);
  alpha.head(n).setConstant(inst.alpha1);
  alpha[n] = inst.alpha2;

  AppBuild out{BlockProblem(std::move(blocks), std::move(coupler),
                            VectorXd::Zero(n - 1)),
               CoreFunctionSpec::jacobian_quadratic(theta, alpha, {}),
               SolverParams{}};
  out.params.epsilon = 1.0;
  out.params.gamma = inst.gamma;
  out.params.rho = inst.rho;
  return out;
}

VectorXd fused_svm_u_update(const FusedSvmInstance& inst, const VectorXd& u,
                            const VectorXd& z, const VectorXd& p) {
  const int n = static_cast<int>(inst.features.rows());
  require(u.size() == n, ErrorCode::Dimension, "u has the wrong length");
  require(z.size() == n - 1 && p.size() == n - 1, ErrorCode::Dimension,
          "z and p must have length n-1");
  VectorXd w(n - 1);
  for (int i = 0; i < n - 1; ++i) w[i] = u[i] - u[i + 1] - z[i];
  const VectorXd hg = hinge_gradient(inst.features, inst.labels, u);
  VectorXd out(n);
  for (int j = 0; j < n; ++j) {
    const double dsq = diff_col_norm_sq(j, n);
    const double mu = inst.gamma * dsq + inst.alpha1;
    const double r = (inst.alpha1 * u[j] -
                      inst.gamma * (diff_col_dot(w, j, n) - dsq * u[j]) -
                      hg[j] - diff_col_dot(p, j, n)) /
                     mu;
    out[j] = shrink(r, inst.lambda1 / mu);
  }
  return out;
}

VectorXd fused_svm_z_update(const FusedSvmInstance& inst, const VectorXd& u,
                            const VectorXd& z, const VectorXd& p) {
  const int n = static_cast<int>(inst.features.rows());
  require(u.size() == n, ErrorCode::Dimension, "u has the wrong length");
  require(z.size() == n - 1 && p.size() == n - 1, ErrorCode::Dimension,
          "z and p must have length n-1");
  VectorXd du(n - 1);
  for (int i = 0; i < n - 1; ++i) du[i] = u[i] - u[i + 1];
  const double denom = inst.gamma + inst.alpha2;
  const VectorXd r = (inst.gamma * du + inst.alpha2 * z + p) / denom;
  return shrink(r, inst.lambda2 / denom);
}

// ---------------------------------------------------------------------------
// l1-regularized logistic regression
// ---------------------------------------------------------------------------

VectorXd logistic_curvature(const LogisticInstance& inst, const VectorXd& z) {
  const int m = static_cast<int>(inst.features.cols());
  require(z.size() == m, ErrorCode::Dimension, "z must have one entry per sample");
  VectorXd d(m);
  for (int i = 0; i < m; ++i) {
    const double t = inst.labels[i] * z[i];
    d[i] = inst.labels[i] * inst.labels[i] * sigmoid(t) * sigmoid(-t) /
           static_cast<double>(m);
  }
  return d;
}

AppBuild build_logistic(const LogisticInstance& inst) {
  const int n = static_cast<int>(inst.features.rows());
  const int m = static_cast<int>(inst.features.cols());
  require(n >= 1 && m >= 1, ErrorCode::InvalidArgument,
          "logistic needs features and samples");
  require(inst.labels.size() == m, ErrorCode::Dimension,
          "labels must match the sample count");
  check_labels(inst.labels);
  require(inst.lambda >= 0.0, ErrorCode::InvalidArgument,
          "penalty must be nonnegative");
  require(inst.epsilon > 0.0 && inst.gamma > 0.0 && inst.rho > 0.0,
          ErrorCode::InvalidArgument, "steps must be positive");

  std::vector<BlockSpec> blocks(2);
  blocks[0].a = CouplingMatrix::from_dense(inst.features.transpose());
  blocks[0].set = ConstraintSet::all_space();
  blocks[0].j = NonsmoothTerm::l1(inst.lambda);
  blocks[1].a = CouplingMatrix::scaled_identity(m, -1.0);
  blocks[1].set = ConstraintSet::all_space();
  blocks[1].j = NonsmoothTerm::zero();

  const VectorXd labels = inst.labels;
  SmoothCoupler coupler;
  coupler.value = [labels, n, m](const VectorXd& x) {
    double total = 0.0;
    for (int i = 0; i < m; ++i) total += softplus(-labels[i] * x[n + i]);
    return total / static_cast<double>(m);
  };
  coupler.gradient = [labels, n, m](const VectorXd& x) {
    VectorXd g = VectorXd::Zero(x.size());
    for (int i = 0; i < m; ++i) {
      const double t = labels[i] * x[n + i];
      g[n + i] = -labels[i] * sigmoid(-t) / static_cast<double>(m);
    }
    return g;
  };
  coupler.lipschitz_grad = 0.25 / static_cast<double>(m);
  coupler.twice_differentiable = true;

  LogisticInstance copy = inst;
  auto diag_at = [copy, n, m](const VectorXd& anchor) {
    VectorXd d(n + m);
    d.head(n).setOnes();
    d.tail(m) = logistic_curvature(copy, anchor.tail(m));
    return d;
  };

  AppBuild out{
      BlockProblem(std::move(blocks), std::move(coupler), VectorXd::Zero(m)),
      CoreFunctionSpec::newton_diagonal(diag_at, kLogisticFloor, kLogisticCeil),
      SolverParams{}};
  out.params.epsilon = inst.epsilon;
  out.params.gamma = inst.gamma;
  out.params.rho = inst.rho;
  return out;
}

std::pair<VectorXd, VectorXd> logistic_update(const LogisticInstance& inst,
                                              const VectorXd& u,
                                              const VectorXd& z,
                                              const VectorXd& p) {
  const int n = static_cast<int>(inst.features.rows());
  const int m = static_cast<int>(inst.features.cols());
  require(u.size() == n, ErrorCode::Dimension, "u has the wrong length");
  require(z.size() == m && p.size() == m, ErrorCode::Dimension,
          "z and p must have one entry per sample");
  const VectorXd s = p + inst.gamma * (inst.features.transpose() * u - z);
  const VectorXd u_next = shrink(VectorXd(u - inst.epsilon * (inst.features * s)),
                                 inst.epsilon * inst.lambda);
  const VectorXd curvature = logistic_curvature(inst, z);
  VectorXd z_next(m);
  for (int i = 0; i < m; ++i) {
    const double hat = std::min(kLogisticCeil, std::max(kLogisticFloor, curvature[i]));
    const double t = inst.labels[i] * z[i];
    const double grad = -inst.labels[i] * sigmoid(-t) / static_cast<double>(m);
    z_next[i] = z[i] - inst.epsilon / hat * (grad - s[i]);
  }
  return {u_next, z_next};
}

// ---------------------------------------------------------------------------
// Box-constrained SVM dual
// ---------------------------------------------------------------------------

AppBuild build_dsvm(const DsvmInstance& inst) {
  const int n = static_cast<int>(inst.y.size());
  require(n >= 1, ErrorCode::InvalidArgument, "dsvm needs at least one sample");
  require(inst.q.rows() == n && inst.q.cols() == n, ErrorCode::Dimension,
          "Q must be n x n");
  require(inst.lin.size() == n, ErrorCode::Dimension, "lin must have length n");
  check_labels(inst.y);
  require(inst.box_c > 0.0, ErrorCode::InvalidArgument,
          "box bound must be positive");
  require(inst.epsilon > 0.0 && inst.gamma > 0.0 && inst.rho > 0.0,
          ErrorCode::InvalidArgument, "steps must be positive");

  std::vector<BlockSpec> blocks(1);
  blocks[0].a = CouplingMatrix::from_dense(inst.y.transpose());
  blocks[0].set =
      ConstraintSet::box(VectorXd::Zero(n), VectorXd::Constant(n, inst.box_c));
  blocks[0].j = NonsmoothTerm::zero();

  BlockProblem problem(std::move(blocks),
                       SmoothCoupler::quadratic(inst.q, inst.lin),
                       VectorXd::Zero(1));
  problem.qp_data = std::make_shared<QpData>(
      QpData{0.5 * (inst.q + inst.q.transpose()), inst.lin});

  AppBuild out{std::move(problem), CoreFunctionSpec::identity_quadratic(1.0),
               SolverParams{}};
  out.params.epsilon = inst.epsilon;
  out.params.gamma = inst.gamma;
  out.params.rho = inst.rho;
  return out;
}

std::pair<VectorXd, VectorXd> dsvm_update(const DsvmInstance& inst,
                                          const VectorXd& u, const VectorXd& p) {
  const int n = static_cast<int>(inst.y.size());
  require(u.size() == n, ErrorCode::Dimension, "u has the wrong length");
  require(p.size() == 1, ErrorCode::Dimension, "p must be a single multiplier");
  const MatrixXd qs = 0.5 * (inst.q + inst.q.transpose());
  const double mult = p[0] + inst.gamma * inst.y.dot(u);
  const VectorXd step = u - inst.epsilon * (qs * u + inst.lin + mult * inst.y);
  const VectorXd u_next = step.cwiseMax(0.0).cwiseMin(inst.box_c);
  const VectorXd p_next =
      VectorXd::Constant(1, p[0] + inst.rho * inst.y.dot(u_next));
  return {u_next, p_next};
}

// ---------------------------------------------------------------------------
// Generic block quadratic program
// ---------------------------------------------------------------------------

BlockProblem build_block_qp(const MatrixXd& q, const VectorXd& c,
                            const MatrixXd& a, const VectorXd& b,
                            const std::vector<int>& block_sizes,
                            const std::vector<ConstraintSet>& sets) {
  const int n = static_cast<int>(q.rows());
  require(q.cols() == n, ErrorCode::Dimension, "Q must be square");
  require(c.size() == n, ErrorCode::Dimension, "c must match Q");
  require(a.cols() == n, ErrorCode::Dimension, "A must have n columns");
  require(a.rows() >= 1, ErrorCode::InvalidArgument,
          "A must have at least one row");
  require(b.size() == a.rows(), ErrorCode::Dimension, "b must match A");
  require(!block_sizes.empty(), ErrorCode::InvalidArgument,
          "need at least one block");
  require(sets.size() == block_sizes.size(), ErrorCode::Dimension,
          "one set per block required");
  int total = 0;
  for (int s : block_sizes) {
    require(s >= 1, ErrorCode::InvalidArgument, "block sizes must be positive");
    total += s;
  }
  require(total == n, ErrorCode::Dimension, "block sizes must sum to n");

  std::vector<BlockSpec> blocks(block_sizes.size());
  int offset = 0;
  for (std::size_t i = 0; i < block_sizes.size(); ++i) {
    blocks[i].a = CouplingMatrix::from_dense(a.middleCols(offset, block_sizes[i]));
    blocks[i].set = sets[i];
    blocks[i].j = NonsmoothTerm::zero();
    offset += block_sizes[i];
  }

  BlockProblem problem(std::move(blocks), SmoothCoupler::quadratic(q, c), b);
  problem.qp_data =
      std::make_shared<QpData>(QpData{0.5 * (q + q.transpose()), c});
  return problem;
}

}  // namespace vapp
