// vapp - block-decomposition augmented Lagrangian solver
// Copyright 2026 vapp contributors
// Licensed under the Apache License, Version 2.0

#include "vapp/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "vapp/errors.hpp"

namespace vapp {

namespace {
constexpr int kDenseLimit = 100;
}

CouplingMatrix CouplingMatrix::from_dense(const MatrixXd& m) {
  if (m.rows() < kDenseLimit && m.cols() < kDenseLimit) {
    return dense(m);
  }
  std::vector<Triplet> entries;
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) {
      if (m(i, j) != 0.0) entries.push_back({i, j, m(i, j)});
    }
  }
  return sparse(static_cast<int>(m.rows()), static_cast<int>(m.cols()),
                entries);
}

CouplingMatrix CouplingMatrix::dense(MatrixXd m) {
  CouplingMatrix out;
  out.rows_ = static_cast<int>(m.rows());
  out.cols_ = static_cast<int>(m.cols());
  out.dense_storage_ = true;
  out.dense_ = std::move(m);
  return out;
}

CouplingMatrix CouplingMatrix::sparse(int rows, int cols,
                                      const std::vector<Triplet>& entries) {
  require(rows >= 0 && cols >= 0, ErrorCode::InvalidArgument,
          "matrix dimensions must be nonnegative");
  CouplingMatrix out;
  out.rows_ = rows;
  out.cols_ = cols;
  out.dense_storage_ = false;

  std::vector<Triplet> sorted = entries;
  for (const Triplet& t : sorted) {
    require(t.row >= 0 && t.row < rows && t.col >= 0 && t.col < cols,
            ErrorCode::Dimension, "triplet index out of range");
  }
  std::sort(sorted.begin(), sorted.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });

  out.row_ptr_.assign(rows + 1, 0);
  out.col_idx_.reserve(sorted.size());
  out.values_.reserve(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const Triplet& t = sorted[i];
    if (!out.col_idx_.empty() && i > 0 && sorted[i - 1].row == t.row &&
        sorted[i - 1].col == t.col) {
      out.values_.back() += t.value;  // duplicates accumulate
      continue;
    }
    out.row_ptr_[t.row + 1]++;
    out.col_idx_.push_back(t.col);
    out.values_.push_back(t.value);
  }
  for (int r = 0; r < rows; ++r) out.row_ptr_[r + 1] += out.row_ptr_[r];
  return out;
}

CouplingMatrix CouplingMatrix::scaled_identity(int n, double scale) {
  if (n < kDenseLimit) {
    return dense(scale * MatrixXd::Identity(n, n));
  }
  std::vector<Triplet> entries;
  entries.reserve(n);
  for (int i = 0; i < n; ++i) entries.push_back({i, i, scale});
  return sparse(n, n, entries);
}

VectorXd CouplingMatrix::apply(const VectorXd& x) const {
  VectorXd y = VectorXd::Zero(rows_);
  apply_add(x, 1.0, y);
  return y;
}

VectorXd CouplingMatrix::apply_transpose(const VectorXd& x) const {
  VectorXd y = VectorXd::Zero(cols_);
  apply_transpose_add(x, 1.0, y);
  return y;
}

void CouplingMatrix::apply_add(const VectorXd& x, double coeff,
                               VectorXd& y) const {
  require(x.size() == cols_ && y.size() == rows_, ErrorCode::Dimension,
          "apply: vector size mismatch");
  if (dense_storage_) {
    y.noalias() += coeff * (dense_ * x);
    return;
  }
  for (int r = 0; r < rows_; ++r) {
    double acc = 0.0;
    for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      acc += values_[k] * x[col_idx_[k]];
    }
    y[r] += coeff * acc;
  }
}

void CouplingMatrix::apply_transpose_add(const VectorXd& x, double coeff,
                                         VectorXd& y) const {
  require(x.size() == rows_ && y.size() == cols_, ErrorCode::Dimension,
          "apply_transpose: vector size mismatch");
  if (dense_storage_) {
    y.noalias() += coeff * (dense_.transpose() * x);
    return;
  }
  for (int r = 0; r < rows_; ++r) {
    const double xr = coeff * x[r];
    if (xr == 0.0) continue;
    for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      y[col_idx_[k]] += values_[k] * xr;
    }
  }
}

MatrixXd CouplingMatrix::to_dense() const {
  if (dense_storage_) return dense_;
  MatrixXd out = MatrixXd::Zero(rows_, cols_);
  for (int r = 0; r < rows_; ++r) {
    for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      out(r, col_idx_[k]) = values_[k];
    }
  }
  return out;
}

MatrixXd CouplingMatrix::gram() const {
  const MatrixXd d = to_dense();
  return d.transpose() * d;
}

double spectral_norm_sq(const CouplingMatrix& a) {
  const int n = a.cols();
  if (n == 0 || a.rows() == 0) return 0.0;

  VectorXd v = VectorXd::Ones(n) / std::sqrt(static_cast<double>(n));
  double lambda = 0.0;
  bool restarted = false;
  for (int iter = 0; iter < 1000; ++iter) {
    VectorXd w = a.apply_transpose(a.apply(v));
    const double norm = w.norm();
    if (norm <= 1e-300) {
      if (restarted) return 0.0;
      // All-ones landed in the null space; restart from a fixed direction.
      restarted = true;
      Rng rng(0x9e3779b97f4a7c15ull);
      v = rng.normal_vector(n);
      v /= v.norm();
      lambda = 0.0;
      continue;
    }
    const double next = v.dot(w);
    w /= norm;
    if (iter > 0 && std::abs(next - lambda) <= 1e-8 * std::max(1.0, std::abs(next))) {
      return next;
    }
    lambda = next;
    v = w;
  }
  return lambda;
}

double spectral_norm_sq(const MatrixXd& a) {
  return spectral_norm_sq(CouplingMatrix::dense(a));
}

double Rng::uniform() {
  // 53-bit mantissa draw.
  return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Rng::normal() {
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

std::int64_t Rng::uniform_int(std::int64_t lo, std::int64_t hi) {
  require(hi >= lo, ErrorCode::InvalidArgument, "uniform_int: empty range");
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  return lo + static_cast<std::int64_t>(eng_() % span);
}

VectorXd Rng::normal_vector(int n) {
  VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = normal();
  return v;
}

MatrixXd Rng::normal_matrix(int rows, int cols) {
  MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) m(i, j) = normal();
  }
  return m;
}

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid-argument";
    case ErrorCode::Dimension: return "dimension-mismatch";
    case ErrorCode::Unsupported: return "unsupported";
    case ErrorCode::Singular: return "singular";
    case ErrorCode::Validation: return "validation";
    case ErrorCode::Parse: return "parse";
    case ErrorCode::Io: return "io";
    case ErrorCode::Numerical: return "numerical";
    case ErrorCode::NoConvergence: return "no-convergence";
    case ErrorCode::SizeLimit: return "size-limit";
    case ErrorCode::Unavailable: return "unavailable";
    case ErrorCode::Internal: return "internal";
  }
  return "unknown";
}

}  // namespace vapp
