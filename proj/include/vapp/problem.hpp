// vapp - block-decomposition augmented Lagrangian solver
// Copyright 2026 vapp contributors
// Licensed under the Apache License, Version 2.0

#ifndef VAPP_PROBLEM_HPP_
#define VAPP_PROBLEM_HPP_

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "vapp/linalg.hpp"

namespace vapp {

//! Feasible set of one block: the whole space, a finite box, or the
//! nonnegative orthant.
class ConstraintSet {
 public:
  enum class Kind { AllSpace, Box, Orthant };

  static ConstraintSet all_space();
  static ConstraintSet box(VectorXd lo, VectorXd hi);
  static ConstraintSet orthant();

  Kind kind() const { return kind_; }
  const VectorXd& lo() const { return lo_; }
  const VectorXd& hi() const { return hi_; }

  VectorXd project(const VectorXd& v) const;
  bool contains(const VectorXd& v, double tol = 1e-12) const;

 private:
  Kind kind_ = Kind::AllSpace;
  VectorXd lo_, hi_;
};

//! Separable nonsmooth term of one block: zero, a weighted l1 norm, or a
//! caller-supplied value oracle paired with a custom block solver.
struct NonsmoothTerm {
  enum class Kind { Zero, L1, Custom };

  Kind kind = Kind::Zero;
  double l1_weight = 0.0;
  std::function<double(const VectorXd&)> custom_value;

  static NonsmoothTerm zero() { return {}; }
  static NonsmoothTerm l1(double weight);

  double value(const VectorXd& u) const;
};

//! Quadratic weight of a block subproblem, either diagonal or dense.
struct BlockWeight {
  bool diagonal = true;
  VectorXd diag;
  MatrixXd dense;

  int size() const {
    return diagonal ? static_cast<int>(diag.size())
                    : static_cast<int>(dense.rows());
  }
  VectorXd apply(const VectorXd& x) const {
    return diagonal ? VectorXd(diag.cwiseProduct(x)) : VectorXd(dense * x);
  }
};

//! Custom solver hook: minimizes J(x) + <lin, x> + (1/2) x'Wx over the set.
using BlockSolver = std::function<VectorXd(
    const VectorXd& lin, const BlockWeight& w, const ConstraintSet& set)>;

struct BlockSpec {
  CouplingMatrix a;   // m x n_i coupling operator of this block
  ConstraintSet set;
  NonsmoothTerm j;
  BlockSolver custom_solver;  // optional
};

//! Smooth coupling objective shared by all blocks. The gradient Lipschitz
//! constant is declared by the builder; estimate_lipschitz_grad exists as an
//! explicit debugging aid and is never consulted implicitly.
struct SmoothCoupler {
  std::function<double(const VectorXd&)> value;
  std::function<VectorXd(const VectorXd&)> gradient;
  double lipschitz_grad = 0.0;
  bool twice_differentiable = false;

  static SmoothCoupler zero(int n);
  //! G(u) = (1/2) u'Qu + q'u with the declared curvature bound.
  static SmoothCoupler quadratic(const MatrixXd& q_mat, const VectorXd& q_lin);
};

//! Exact quadratic description (G only; sets and couplings live on the
//! problem). Attached by builders whose smooth part is a quadratic so the
//! reference solver can recover an exact saddle point.
struct QpData {
  MatrixXd q;
  VectorXd c;
};

//! Reference saddle point used by the merit and gap diagnostics.
struct SaddleReference {
  VectorXd u_star;
  VectorXd p_star;
  double objective_star = 0.0;
  bool degenerate = false;
};

//! Linearly coupled block problem:
//!   min G(u) + sum_i J_i(u_i)  s.t.  sum_i A_i u_i = b,  u_i in U_i.
class BlockProblem {
 public:
  BlockProblem(std::vector<BlockSpec> blocks, SmoothCoupler coupler,
               VectorXd b);

  int num_blocks() const { return static_cast<int>(blocks_.size()); }
  int n() const { return n_; }
  int m() const { return m_; }
  int block_offset(int i) const { return offsets_[i]; }
  int block_size(int i) const { return sizes_[i]; }
  const BlockSpec& block(int i) const { return blocks_[i]; }
  const SmoothCoupler& coupler() const { return coupler_; }
  const VectorXd& b() const { return b_; }
  const CouplingMatrix& full_a() const { return full_a_; }

  Eigen::VectorBlock<const VectorXd> block_of(const VectorXd& u, int i) const;

  //! A u = sum_i A_i u_i
  VectorXd apply_a(const VectorXd& u) const;
  //! A u - b
  VectorXd primal_residual(const VectorXd& u) const;
  //! G(u) + sum_i J_i(u_i)
  double eval_objective(const VectorXd& u) const;
  //! Projects each block onto its set (default start point).
  VectorXd project(const VectorXd& u) const;
  bool feasible_sets(const VectorXd& u, double tol = 1e-12) const;

  std::shared_ptr<const QpData> qp_data;  // optional

 private:
  std::vector<BlockSpec> blocks_;
  SmoothCoupler coupler_;
  VectorXd b_;
  int n_ = 0;
  int m_ = 0;
  std::vector<int> offsets_;
  std::vector<int> sizes_;
  CouplingMatrix full_a_;
};

//! Pairwise difference operator: (n-1) x n with rows e_i - e_{i+1}.
CouplingMatrix build_difference_matrix(int n);

//! Debug estimate of the gradient Lipschitz constant of a coupler around
//! sample points: max of ||grad(x)-grad(y)|| / ||x-y|| over seeded pairs.
double estimate_lipschitz_grad(const SmoothCoupler& coupler, int n,
                               std::uint64_t seed, int trials = 64);

}  // namespace vapp

#endif  // VAPP_PROBLEM_HPP_
