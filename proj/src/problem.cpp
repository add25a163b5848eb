// vapp - block-decomposition augmented Lagrangian solver
// Copyright 2026 vapp contributors
// Licensed under the Apache License, Version 2.0

#include "vapp/problem.hpp"

#include <cmath>

#include "vapp/errors.hpp"

namespace vapp {

ConstraintSet ConstraintSet::all_space() { return ConstraintSet(); }

ConstraintSet ConstraintSet::box(VectorXd lo, VectorXd hi) {
  require(lo.size() == hi.size(), ErrorCode::Dimension,
          "box bounds must have equal length");
  for (int i = 0; i < lo.size(); ++i) {
    require(lo[i] <= hi[i], ErrorCode::InvalidArgument,
            "box lower bound exceeds upper bound");
  }
  ConstraintSet s;
  s.kind_ = Kind::Box;
  s.lo_ = std::move(lo);
  s.hi_ = std::move(hi);
  return s;
}

ConstraintSet ConstraintSet::orthant() {
  ConstraintSet s;
  s.kind_ = Kind::Orthant;
  return s;
}

VectorXd ConstraintSet::project(const VectorXd& v) const {
  switch (kind_) {
    case Kind::AllSpace:
      return v;
    case Kind::Orthant:
      return v.cwiseMax(0.0);
    case Kind::Box:
      require(v.size() == lo_.size(), ErrorCode::Dimension,
              "projection: vector does not match box bounds");
      return v.cwiseMax(lo_).cwiseMin(hi_);
  }
  return v;
}

bool ConstraintSet::contains(const VectorXd& v, double tol) const {
  switch (kind_) {
    case Kind::AllSpace:
      return true;
    case Kind::Orthant:
      return (v.array() >= -tol).all();
    case Kind::Box:
      if (v.size() != lo_.size()) return false;
      return ((v - lo_).array() >= -tol).all() &&
             ((hi_ - v).array() >= -tol).all();
  }
  return false;
}

NonsmoothTerm NonsmoothTerm::l1(double weight) {
  require(weight >= 0.0, ErrorCode::InvalidArgument,
          "l1 weight must be nonnegative");
  NonsmoothTerm t;
  t.kind = Kind::L1;
  t.l1_weight = weight;
  return t;
}

double NonsmoothTerm::value(const VectorXd& u) const {
  switch (kind) {
    case Kind::Zero:
      return 0.0;
    case Kind::L1:
      return l1_weight * u.lpNorm<1>();
    case Kind::Custom:
      require(static_cast<bool>(custom_value), ErrorCode::InvalidArgument,
              "custom nonsmooth term lacks a value oracle");
      return custom_value(u);
  }
  return 0.0;
}

SmoothCoupler SmoothCoupler::zero(int n) {
  SmoothCoupler g;
  g.value = [](const VectorXd&) { return 0.0; };
  g.gradient = [n](const VectorXd&) { return VectorXd::Zero(n); };
  g.lipschitz_grad = 0.0;
  g.twice_differentiable = true;
  return g;
}

SmoothCoupler SmoothCoupler::quadratic(const MatrixXd& q_mat,
                                       const VectorXd& q_lin) {
  require(q_mat.rows() == q_mat.cols() && q_mat.rows() == q_lin.size(),
          ErrorCode::Dimension, "quadratic coupler: shape mismatch");
  SmoothCoupler g;
  MatrixXd q = 0.5 * (q_mat + q_mat.transpose());
  VectorXd c = q_lin;
  g.value = [q, c](const VectorXd& u) {
    return 0.5 * u.dot(q * u) + c.dot(u);
  };
  g.gradient = [q, c](const VectorXd& u) { return VectorXd(q * u + c); };
  g.lipschitz_grad = std::sqrt(spectral_norm_sq(q));
  g.twice_differentiable = true;
  return g;
}

BlockProblem::BlockProblem(std::vector<BlockSpec> blocks, SmoothCoupler coupler,
                           VectorXd b)
    : blocks_(std::move(blocks)), coupler_(std::move(coupler)), b_(std::move(b)) {
  require(!blocks_.empty(), ErrorCode::InvalidArgument,
          "problem needs at least one block");
  m_ = static_cast<int>(b_.size());
  offsets_.reserve(blocks_.size());
  sizes_.reserve(blocks_.size());
  for (const BlockSpec& blk : blocks_) {
    require(blk.a.rows() == m_, ErrorCode::Dimension,
            "every block coupling must have as many rows as b");
    offsets_.push_back(n_);
    sizes_.push_back(blk.a.cols());
    n_ += blk.a.cols();
    if (blk.set.kind() == ConstraintSet::Kind::Box) {
      require(blk.set.lo().size() == blk.a.cols(), ErrorCode::Dimension,
              "box bounds must match block width");
    }
  }
  require(n_ > 0, ErrorCode::InvalidArgument, "problem has no variables");
  require(static_cast<bool>(coupler_.value) && static_cast<bool>(coupler_.gradient),
          ErrorCode::InvalidArgument, "coupler needs value and gradient");
  require(coupler_.lipschitz_grad >= 0.0, ErrorCode::InvalidArgument,
          "gradient Lipschitz bound must be nonnegative");

  MatrixXd full = MatrixXd::Zero(m_, n_);
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    full.middleCols(offsets_[i], sizes_[i]) = blocks_[i].a.to_dense();
  }
  full_a_ = CouplingMatrix::from_dense(full);
}

Eigen::VectorBlock<const VectorXd> BlockProblem::block_of(const VectorXd& u,
                                                          int i) const {
  require(u.size() == n_, ErrorCode::Dimension, "block_of: wrong vector size");
  return u.segment(offsets_[i], sizes_[i]);
}

VectorXd BlockProblem::apply_a(const VectorXd& u) const {
  require(u.size() == n_, ErrorCode::Dimension, "apply_a: wrong vector size");
  VectorXd out = VectorXd::Zero(m_);
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    blocks_[i].a.apply_add(u.segment(offsets_[i], sizes_[i]), 1.0, out);
  }
  return out;
}

VectorXd BlockProblem::primal_residual(const VectorXd& u) const {
  return apply_a(u) - b_;
}

double BlockProblem::eval_objective(const VectorXd& u) const {
  require(u.size() == n_, ErrorCode::Dimension,
          "eval_objective: wrong vector size");
  double obj = coupler_.value(u);
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    obj += blocks_[i].j.value(u.segment(offsets_[i], sizes_[i]));
  }
  return obj;
}

VectorXd BlockProblem::project(const VectorXd& u) const {
  require(u.size() == n_, ErrorCode::Dimension, "project: wrong vector size");
  VectorXd out(n_);
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    out.segment(offsets_[i], sizes_[i]) =
        blocks_[i].set.project(u.segment(offsets_[i], sizes_[i]));
  }
  return out;
}

bool BlockProblem::feasible_sets(const VectorXd& u, double tol) const {
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    if (!blocks_[i].set.contains(u.segment(offsets_[i], sizes_[i]), tol)) {
      return false;
    }
  }
  return true;
}

CouplingMatrix build_difference_matrix(int n) {
  require(n >= 2, ErrorCode::InvalidArgument,
          "difference matrix needs at least two columns");
  std::vector<Triplet> entries;
  entries.reserve(2 * (n - 1));
  for (int i = 0; i + 1 < n; ++i) {
    entries.push_back({i, i, 1.0});
    entries.push_back({i, i + 1, -1.0});
  }
  if (n - 1 < 100 && n < 100) {
    MatrixXd d = MatrixXd::Zero(n - 1, n);
    for (int i = 0; i + 1 < n; ++i) {
      d(i, i) = 1.0;
      d(i, i + 1) = -1.0;
    }
    return CouplingMatrix::dense(d);
  }
  return CouplingMatrix::sparse(n - 1, n, entries);
}

double estimate_lipschitz_grad(const SmoothCoupler& coupler, int n,
                               std::uint64_t seed, int trials) {
  Rng rng(seed);
  double best = 0.0;
  for (int t = 0; t < trials; ++t) {
    const VectorXd x = rng.normal_vector(n);
    const VectorXd y = x + 1e-3 * rng.normal_vector(n);
    const double dx = (x - y).norm();
    if (dx == 0.0) continue;
    best = std::max(best, (coupler.gradient(x) - coupler.gradient(y)).norm() / dx);
  }
  return best;
}

}  // namespace vapp
