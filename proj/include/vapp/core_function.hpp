// vapp - block-decomposition augmented Lagrangian solver
// Copyright 2026 vapp contributors
// Licensed under the Apache License, Version 2.0

#ifndef VAPP_CORE_FUNCTION_HPP_
#define VAPP_CORE_FUNCTION_HPP_

#include <functional>
#include <string>
#include <vector>

#include "vapp/problem.hpp"

namespace vapp {

//! Declarative description of the per-iteration core function. Three
//! families are built in:
//!  - IdentityQuadratic: K(u) = sum_i (s_i/2) ||u_i||^2 (scaled norm core).
//!  - NewtonDiagonal:    K(u) = (1/2) u' M(anchor) u with a diagonal M
//!    recomputed at every iterate and clamped to [floor, ceil].
//!  - JacobianQuadratic: K(u) = sum_i (theta_i/2) ||A_i u_i + c_i(anchor)||^2
//!                              + (alpha_i/2) ||P_i u_i||^2.
class CoreFunctionSpec {
 public:
  enum class Variant { IdentityQuadratic, NewtonDiagonal, JacobianQuadratic };

  static CoreFunctionSpec identity_quadratic(double scale);
  static CoreFunctionSpec identity_quadratic(VectorXd block_scales);
  static CoreFunctionSpec newton_diagonal(
      std::function<VectorXd(const VectorXd&)> diag_at, double floor,
      double ceil);
  //! theta/alpha must have one entry per block or a single broadcast entry.
  //! An empty matrix in `p` stands for the identity on that block.
  static CoreFunctionSpec jacobian_quadratic(VectorXd theta, VectorXd alpha,
                                             std::vector<CouplingMatrix> p);

  Variant variant() const { return variant_; }
  const VectorXd& block_scales() const { return block_scales_; }
  const std::function<VectorXd(const VectorXd&)>& diag_at() const {
    return diag_at_;
  }
  double diag_floor() const { return diag_floor_; }
  double diag_ceil() const { return diag_ceil_; }
  const VectorXd& theta() const { return theta_; }
  const VectorXd& alpha() const { return alpha_; }
  const std::vector<CouplingMatrix>& p() const { return p_; }

 private:
  Variant variant_ = Variant::IdentityQuadratic;
  VectorXd block_scales_;
  std::function<VectorXd(const VectorXd&)> diag_at_;
  double diag_floor_ = 0.0;
  double diag_ceil_ = 0.0;
  VectorXd theta_, alpha_;
  std::vector<CouplingMatrix> p_;
};

//! Core spec bound to a concrete problem: per-block quadratic weights,
//! curvature bounds, and the evaluation oracles. Self-contained (owns copies
//! of whatever block data it needs).
class BoundCore {
 public:
  BoundCore() = default;

  CoreFunctionSpec::Variant variant() const { return variant_; }
  int num_blocks() const { return static_cast<int>(sizes_.size()); }

  //! Uniform strong-convexity / smoothness bounds (beta, B).
  double beta() const { return beta_; }
  double bee() const { return bee_; }
  //! Curvature bounds of the core built at this anchor.
  double beta_at(const VectorXd& anchor) const;
  double bee_at(const VectorXd& anchor) const;

  bool constant_weights() const {
    return variant_ != CoreFunctionSpec::Variant::NewtonDiagonal;
  }
  //! Per-block weights for anchor-independent variants.
  const std::vector<BlockWeight>& cached_weights() const;
  //! Per-block weights built at the anchor (any variant).
  std::vector<BlockWeight> weights_at(const VectorXd& anchor) const;

  //! K(u) with the core built at `anchor`.
  double value(const VectorXd& u, const VectorXd& anchor) const;
  //! grad K(u) with the core built at `anchor`.
  VectorXd gradient(const VectorXd& u, const VectorXd& anchor) const;

 private:
  friend BoundCore bind_core(const CoreFunctionSpec&, const BlockProblem&);

  VectorXd clamped_diag(const VectorXd& anchor) const;

  CoreFunctionSpec::Variant variant_ = CoreFunctionSpec::Variant::IdentityQuadratic;
  std::vector<int> offsets_, sizes_;
  int n_ = 0;
  double beta_ = 0.0, bee_ = 0.0;
  std::vector<BlockWeight> weights_;  // identity / jacobian
  VectorXd scales_;                   // identity
  std::function<VectorXd(const VectorXd&)> diag_at_;  // newton
  double diag_floor_ = 0.0, diag_ceil_ = 0.0;
  // jacobian evaluation data
  VectorXd theta_, alpha_;
  std::vector<CouplingMatrix> a_;
  std::vector<MatrixXd> p_gram_;
  VectorXd b_;
};

//! Validates the description against the problem (width and rank checks) and
//! precomputes weights and curvature bounds.
BoundCore bind_core(const CoreFunctionSpec& spec, const BlockProblem& problem);

//! Comparison matrices of a run with an anchor-independent quadratic core:
//!   h       = (1/eps) blockdiag(W_i)
//!   h_over  = h - gamma A'A
//!   h_under = h_over - b_g I
struct QuadraticCoreMatrices {
  MatrixXd h;
  MatrixXd h_over;
  MatrixXd h_under;
};

QuadraticCoreMatrices build_quadratic_core_matrices(const BlockProblem& problem,
                                                    const BoundCore& core,
                                                    double gamma, double eps,
                                                    double b_g);

struct PsdCheck {
  bool psd = false;
  double lambda_min = 0.0;
};

//! Symmetric eigensolve; psd iff lambda_min >= -1e-10.
PsdCheck check_underline_psd(const MatrixXd& h_under);

//! Distance generated by the core built at `anchor`:
//!   K(u) - K(v) - <grad K(v), u - v>.
//! Computed through the quadratic shortcut (1/2)||u-v||^2 over the block
//! weights, which is exact for every built-in variant.
double bregman_distance(const BoundCore& core, const VectorXd& u,
                        const VectorXd& v, const VectorXd& anchor);

}  // namespace vapp

#endif  // VAPP_CORE_FUNCTION_HPP_
