// vapp - block-decomposition augmented Lagrangian solver
// Copyright 2026 vapp contributors
// Licensed under the Apache License, Version 2.0

#ifndef VAPP_LINALG_HPP_
#define VAPP_LINALG_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <vector>

namespace vapp {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct Triplet {
  int row;
  int col;
  double value;
};

//! Immutable real matrix used for the coupling operators. Small matrices are
//! held dense; anything with a side of 100 or more is kept in compressed
//! sparse row form.
class CouplingMatrix {
 public:
  CouplingMatrix() = default;

  //! Picks the storage automatically: dense below 100x100, CSR otherwise.
  static CouplingMatrix from_dense(const MatrixXd& m);
  static CouplingMatrix dense(MatrixXd m);
  static CouplingMatrix sparse(int rows, int cols,
                               const std::vector<Triplet>& entries);
  static CouplingMatrix scaled_identity(int n, double scale);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool is_dense() const { return dense_storage_; }

  //! y = A x
  VectorXd apply(const VectorXd& x) const;
  //! y = A' x
  VectorXd apply_transpose(const VectorXd& x) const;
  //! y += coeff * A x
  void apply_add(const VectorXd& x, double coeff, VectorXd& y) const;
  //! y += coeff * A' x
  void apply_transpose_add(const VectorXd& x, double coeff, VectorXd& y) const;

  MatrixXd to_dense() const;
  //! A' A as a dense matrix (block matrices are desk scale).
  MatrixXd gram() const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  bool dense_storage_ = true;
  MatrixXd dense_;
  // CSR arrays.
  std::vector<int> row_ptr_;
  std::vector<int> col_idx_;
  std::vector<double> values_;
};

//! Largest eigenvalue of A'A by power iteration from the normalized all-ones
//! vector. Relative tolerance 1e-8 on the Rayleigh quotient, at most 1000
//! iterations; restarts from a fixed pseudo-random direction if the iterate
//! collapses. Returns 0 for a zero matrix.
double spectral_norm_sq(const CouplingMatrix& a);
double spectral_norm_sq(const MatrixXd& a);

//! Deterministic random source used by the instance generators and tests.
//! Distributions are hand-rolled on top of std::mt19937_64 so that streams
//! do not depend on the standard library's distribution internals.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  //! Uniform on [0, 1).
  double uniform();
  double uniform(double lo, double hi);
  //! Standard normal via Box-Muller.
  double normal();
  //! Uniform integer on [lo, hi].
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

  VectorXd normal_vector(int n);
  MatrixXd normal_matrix(int rows, int cols);

 private:
  std::mt19937_64 eng_;
};

}  // namespace vapp

#endif  // VAPP_LINALG_HPP_
