// vapp - block-decomposition augmented Lagrangian solver
// Copyright 2026 vapp contributors
// Licensed under the Apache License, Version 2.0

#include "vapp/core_function.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>

#include "vapp/errors.hpp"

namespace vapp {

namespace {

double broadcast(const VectorXd& v, int i) {
  return v.size() == 1 ? v[0] : v[i];
}

bool is_exactly_diagonal(const MatrixXd& m) {
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) {
      if (i != j && m(i, j) != 0.0) return false;
    }
  }
  return true;
}

}  // namespace

CoreFunctionSpec CoreFunctionSpec::identity_quadratic(double scale) {
  VectorXd s(1);
  s[0] = scale;
  return identity_quadratic(s);
}

CoreFunctionSpec CoreFunctionSpec::identity_quadratic(VectorXd block_scales) {
  require(block_scales.size() >= 1, ErrorCode::InvalidArgument,
          "identity core needs at least one scale");
  for (int i = 0; i < block_scales.size(); ++i) {
    require(block_scales[i] > 0.0, ErrorCode::InvalidArgument,
            "identity core scales must be positive");
  }
  CoreFunctionSpec spec;
  spec.variant_ = Variant::IdentityQuadratic;
  spec.block_scales_ = std::move(block_scales);
  return spec;
}

CoreFunctionSpec CoreFunctionSpec::newton_diagonal(
    std::function<VectorXd(const VectorXd&)> diag_at, double floor,
    double ceil) {
  require(static_cast<bool>(diag_at), ErrorCode::InvalidArgument,
          "newton core needs a diagonal oracle");
  require(floor > 0.0 && ceil >= floor, ErrorCode::InvalidArgument,
          "newton core needs 0 < floor <= ceil");
  CoreFunctionSpec spec;
  spec.variant_ = Variant::NewtonDiagonal;
  spec.diag_at_ = std::move(diag_at);
  spec.diag_floor_ = floor;
  spec.diag_ceil_ = ceil;
  return spec;
}

CoreFunctionSpec CoreFunctionSpec::jacobian_quadratic(
    VectorXd theta, VectorXd alpha, std::vector<CouplingMatrix> p) {
  require(theta.size() >= 1 && alpha.size() >= 1, ErrorCode::InvalidArgument,
          "quadratic core needs theta and alpha");
  for (int i = 0; i < theta.size(); ++i) {
    require(theta[i] >= 0.0, ErrorCode::InvalidArgument,
            "theta must be nonnegative");
  }
  for (int i = 0; i < alpha.size(); ++i) {
    require(alpha[i] >= 0.0, ErrorCode::InvalidArgument,
            "alpha must be nonnegative");
  }
  CoreFunctionSpec spec;
  spec.variant_ = Variant::JacobianQuadratic;
  spec.theta_ = std::move(theta);
  spec.alpha_ = std::move(alpha);
  spec.p_ = std::move(p);
  return spec;
}

BoundCore bind_core(const CoreFunctionSpec& spec, const BlockProblem& problem) {
  const int nb = problem.num_blocks();
  BoundCore core;
  core.variant_ = spec.variant();
  core.n_ = problem.n();
  core.offsets_.resize(nb);
  core.sizes_.resize(nb);
  for (int i = 0; i < nb; ++i) {
    core.offsets_[i] = problem.block_offset(i);
    core.sizes_[i] = problem.block_size(i);
  }

  switch (spec.variant()) {
    case CoreFunctionSpec::Variant::IdentityQuadratic: {
      const VectorXd& s = spec.block_scales();
      require(s.size() == 1 || s.size() == nb, ErrorCode::Dimension,
              "identity core: one scale per block (or a single broadcast)");
      core.scales_.resize(nb);
      core.weights_.resize(nb);
      for (int i = 0; i < nb; ++i) {
        const double si = broadcast(s, i);
        core.scales_[i] = si;
        core.weights_[i].diagonal = true;
        core.weights_[i].diag = VectorXd::Constant(core.sizes_[i], si);
      }
      core.beta_ = core.scales_.minCoeff();
      core.bee_ = core.scales_.maxCoeff();
      break;
    }
    case CoreFunctionSpec::Variant::NewtonDiagonal: {
      core.diag_at_ = spec.diag_at();
      core.diag_floor_ = spec.diag_floor();
      core.diag_ceil_ = spec.diag_ceil();
      core.beta_ = core.diag_floor_;
      core.bee_ = core.diag_ceil_;
      break;
    }
    case CoreFunctionSpec::Variant::JacobianQuadratic: {
      const VectorXd& theta = spec.theta();
      const VectorXd& alpha = spec.alpha();
      require(theta.size() == 1 || theta.size() == nb, ErrorCode::Dimension,
              "quadratic core: one theta per block (or a single broadcast)");
      require(alpha.size() == 1 || alpha.size() == nb, ErrorCode::Dimension,
              "quadratic core: one alpha per block (or a single broadcast)");
      require(spec.p().empty() || static_cast<int>(spec.p().size()) == nb,
              ErrorCode::Dimension, "quadratic core: one P per block, or none");
      core.theta_.resize(nb);
      core.alpha_.resize(nb);
      core.a_.resize(nb);
      core.p_gram_.resize(nb);
      core.weights_.resize(nb);
      core.b_ = problem.b();

      double min_theta_term = std::numeric_limits<double>::infinity();
      double min_alpha_term = std::numeric_limits<double>::infinity();
      double max_theta_term = 0.0;
      double max_alpha_term = 0.0;
      for (int i = 0; i < nb; ++i) {
        core.theta_[i] = broadcast(theta, i);
        core.alpha_[i] = broadcast(alpha, i);
        core.a_[i] = problem.block(i).a;
        const int ni = core.sizes_[i];
        MatrixXd a_gram = core.a_[i].gram();
        MatrixXd p_gram;
        if (!spec.p().empty() && spec.p()[i].cols() > 0) {
          require(spec.p()[i].cols() == ni, ErrorCode::Dimension,
                  "quadratic core: P width must match its block");
          p_gram = spec.p()[i].gram();
        } else {
          p_gram = MatrixXd::Identity(ni, ni);
        }
        core.p_gram_[i] = p_gram;

        MatrixXd w = core.theta_[i] * a_gram + core.alpha_[i] * p_gram;
        if (is_exactly_diagonal(w)) {
          core.weights_[i].diagonal = true;
          core.weights_[i].diag = w.diagonal();
        } else {
          core.weights_[i].diagonal = false;
          core.weights_[i].dense = std::move(w);
        }

        Eigen::SelfAdjointEigenSolver<MatrixXd> ea(a_gram);
        Eigen::SelfAdjointEigenSolver<MatrixXd> ep(p_gram);
        require(ea.info() == Eigen::Success && ep.info() == Eigen::Success,
                ErrorCode::Numerical, "quadratic core: eigensolve failed");
        const double a_min = ea.eigenvalues().minCoeff();
        const double a_max = ea.eigenvalues().maxCoeff();
        const double p_min = ep.eigenvalues().minCoeff();
        const double p_max = ep.eigenvalues().maxCoeff();
        // A block with positive weights must actually be strongly convex
        // (rank surprises are bugs); explicitly zero weights are allowed so
        // the degenerate core remains constructible as an analysis object,
        // and every downstream solve path rejects beta = 0.
        const double block_curvature =
            core.theta_[i] * std::max(a_min, 0.0) +
            core.alpha_[i] * std::max(p_min, 0.0);
        if (core.theta_[i] > 0.0 || core.alpha_[i] > 0.0) {
          require(block_curvature >
                      1e-12 * std::max(1.0, core.theta_[i] * a_max +
                                                core.alpha_[i] * p_max),
                  ErrorCode::Validation,
                  "quadratic core: block " + std::to_string(i) +
                      " has no strongly convex term (need theta>0 with full "
                      "column rank A, or alpha>0 with full column rank P)");
        }
        min_theta_term = std::min(min_theta_term, core.theta_[i] * std::max(a_min, 0.0));
        max_theta_term = std::max(max_theta_term, core.theta_[i] * a_max);
        min_alpha_term = std::min(min_alpha_term, core.alpha_[i] * std::max(p_min, 0.0));
        max_alpha_term = std::max(max_alpha_term, core.alpha_[i] * p_max);
      }
      core.beta_ = min_theta_term + min_alpha_term;
      core.bee_ = max_theta_term + max_alpha_term;
      break;
    }
  }
  return core;
}

VectorXd BoundCore::clamped_diag(const VectorXd& anchor) const {
  require(variant_ == CoreFunctionSpec::Variant::NewtonDiagonal,
          ErrorCode::Internal, "clamped_diag: not a newton core");
  require(anchor.size() == n_, ErrorCode::Dimension,
          "core anchor has the wrong length");
  VectorXd d = diag_at_(anchor);
  require(d.size() == n_, ErrorCode::Dimension,
          "newton diagonal oracle returned the wrong length");
  for (int i = 0; i < d.size(); ++i) {
    d[i] = std::min(diag_ceil_, std::max(diag_floor_, d[i]));
  }
  return d;
}

double BoundCore::beta_at(const VectorXd& anchor) const {
  if (variant_ == CoreFunctionSpec::Variant::NewtonDiagonal) {
    return clamped_diag(anchor).minCoeff();
  }
  return beta_;
}

double BoundCore::bee_at(const VectorXd& anchor) const {
  if (variant_ == CoreFunctionSpec::Variant::NewtonDiagonal) {
    return clamped_diag(anchor).maxCoeff();
  }
  return bee_;
}

const std::vector<BlockWeight>& BoundCore::cached_weights() const {
  require(constant_weights(), ErrorCode::Internal,
          "cached_weights: variant rebuilds weights per anchor");
  return weights_;
}

std::vector<BlockWeight> BoundCore::weights_at(const VectorXd& anchor) const {
  if (constant_weights()) return weights_;
  const VectorXd d = clamped_diag(anchor);
  std::vector<BlockWeight> out(sizes_.size());
  for (std::size_t i = 0; i < sizes_.size(); ++i) {
    out[i].diagonal = true;
    out[i].diag = d.segment(offsets_[i], sizes_[i]);
  }
  return out;
}

double BoundCore::value(const VectorXd& u, const VectorXd& anchor) const {
  require(u.size() == n_, ErrorCode::Dimension, "core value: wrong length");
  switch (variant_) {
    case CoreFunctionSpec::Variant::IdentityQuadratic: {
      double v = 0.0;
      for (std::size_t i = 0; i < sizes_.size(); ++i) {
        v += 0.5 * scales_[i] * u.segment(offsets_[i], sizes_[i]).squaredNorm();
      }
      return v;
    }
    case CoreFunctionSpec::Variant::NewtonDiagonal: {
      const VectorXd d = clamped_diag(anchor);
      return 0.5 * u.dot(d.cwiseProduct(u));
    }
    case CoreFunctionSpec::Variant::JacobianQuadratic: {
      require(anchor.size() == n_, ErrorCode::Dimension,
              "core anchor has the wrong length");
      // c_i = A anchor - b - A_i anchor_i
      VectorXd a_anchor = -b_;
      for (std::size_t i = 0; i < sizes_.size(); ++i) {
        a_[i].apply_add(anchor.segment(offsets_[i], sizes_[i]), 1.0, a_anchor);
      }
      double v = 0.0;
      for (std::size_t i = 0; i < sizes_.size(); ++i) {
        const auto ui = u.segment(offsets_[i], sizes_[i]);
        const auto anchor_i = anchor.segment(offsets_[i], sizes_[i]);
        VectorXd c_i = a_anchor - a_[i].apply(anchor_i);
        VectorXd au = a_[i].apply(ui);
        v += 0.5 * theta_[i] * (au + c_i).squaredNorm();
        v += 0.5 * alpha_[i] * ui.dot(p_gram_[i] * ui);
      }
      return v;
    }
  }
  return 0.0;
}

VectorXd BoundCore::gradient(const VectorXd& u, const VectorXd& anchor) const {
  require(u.size() == n_, ErrorCode::Dimension, "core gradient: wrong length");
  switch (variant_) {
    case CoreFunctionSpec::Variant::IdentityQuadratic: {
      VectorXd g(n_);
      for (std::size_t i = 0; i < sizes_.size(); ++i) {
        g.segment(offsets_[i], sizes_[i]) =
            scales_[i] * u.segment(offsets_[i], sizes_[i]);
      }
      return g;
    }
    case CoreFunctionSpec::Variant::NewtonDiagonal: {
      return clamped_diag(anchor).cwiseProduct(u);
    }
    case CoreFunctionSpec::Variant::JacobianQuadratic: {
      require(anchor.size() == n_, ErrorCode::Dimension,
              "core anchor has the wrong length");
      VectorXd a_anchor = -b_;
      for (std::size_t i = 0; i < sizes_.size(); ++i) {
        a_[i].apply_add(anchor.segment(offsets_[i], sizes_[i]), 1.0, a_anchor);
      }
      VectorXd g(n_);
      for (std::size_t i = 0; i < sizes_.size(); ++i) {
        const auto ui = u.segment(offsets_[i], sizes_[i]);
        const auto anchor_i = anchor.segment(offsets_[i], sizes_[i]);
        VectorXd c_i = a_anchor - a_[i].apply(anchor_i);
        VectorXd gi = theta_[i] * a_[i].apply_transpose(a_[i].apply(ui) + c_i);
        gi.noalias() += alpha_[i] * (p_gram_[i] * ui);
        g.segment(offsets_[i], sizes_[i]) = gi;
      }
      return g;
    }
  }
  return VectorXd::Zero(n_);
}

QuadraticCoreMatrices build_quadratic_core_matrices(const BlockProblem& problem,
                                                    const BoundCore& core,
                                                    double gamma, double eps,
                                                    double b_g) {
  require(core.constant_weights(), ErrorCode::Unsupported,
          "core comparison matrices need an anchor-independent core");
  require(eps > 0.0 && gamma >= 0.0 && b_g >= 0.0, ErrorCode::InvalidArgument,
          "core comparison matrices: bad eps/gamma/b_g");
  const int n = problem.n();
  require(n <= 5000, ErrorCode::SizeLimit,
          "core comparison matrices are dense; refusing n > 5000");

  QuadraticCoreMatrices out;
  out.h = MatrixXd::Zero(n, n);
  const std::vector<BlockWeight>& w = core.cached_weights();
  for (int i = 0; i < problem.num_blocks(); ++i) {
    const int off = problem.block_offset(i);
    const int sz = problem.block_size(i);
    if (w[i].diagonal) {
      out.h.block(off, off, sz, sz) = w[i].diag.asDiagonal();
    } else {
      out.h.block(off, off, sz, sz) = w[i].dense;
    }
  }
  out.h /= eps;
  const MatrixXd a = problem.full_a().to_dense();
  out.h_over = out.h - gamma * (a.transpose() * a);
  out.h_under = out.h_over - b_g * MatrixXd::Identity(n, n);
  return out;
}

PsdCheck check_underline_psd(const MatrixXd& h_under) {
  require(h_under.rows() == h_under.cols(), ErrorCode::Dimension,
          "psd check needs a square matrix");
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 *
                                             (h_under + h_under.transpose()));
  require(es.info() == Eigen::Success, ErrorCode::Numerical,
          "psd check: eigensolve failed");
  PsdCheck out;
  out.lambda_min = es.eigenvalues().minCoeff();
  out.psd = out.lambda_min >= -1e-10;
  return out;
}

double bregman_distance(const BoundCore& core, const VectorXd& u,
                        const VectorXd& v, const VectorXd& anchor) {
  require(u.size() == v.size(), ErrorCode::Dimension,
          "bregman distance: length mismatch");
  const std::vector<BlockWeight> w = core.weights_at(anchor);
  double d = 0.0;
  int off = 0;
  for (const BlockWeight& wi : w) {
    const int sz = wi.size();
    const VectorXd diff = u.segment(off, sz) - v.segment(off, sz);
    d += 0.5 * diff.dot(wi.apply(diff));
    off += sz;
  }
  require(off == u.size(), ErrorCode::Dimension,
          "bregman distance: weights do not cover the vector");
  return d;
}

}  // namespace vapp
