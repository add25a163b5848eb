// vapp - block-decomposition augmented Lagrangian solver
// Copyright 2026 vapp contributors
// Licensed under the Apache License, Version 2.0

#include "vapp/diagnostics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "vapp/errors.hpp"

namespace vapp {

double merit_lambda(const BlockProblem& problem, const BoundCore& core,
                    const SolverParams& params, double m_k, const VectorXd& u,
                    const VectorXd& p, const SaddleReference& ref) {
  require(m_k > 0.0, ErrorCode::InvalidArgument, "merit weight must be positive");
  require(params.epsilon > 0.0 && params.rho > 0.0 && params.gamma > 0.0,
          ErrorCode::InvalidArgument, "merit needs positive eps, rho, gamma");
  require(ref.u_star.size() == u.size() && ref.p_star.size() == p.size(),
          ErrorCode::Dimension, "merit: reference has the wrong shape");
  const double dist = bregman_distance(core, ref.u_star, u, u);
  const double dual = (params.epsilon / (2.0 * params.rho)) *
                      (p - ref.p_star).squaredNorm();
  const double res = (params.gamma * params.epsilon / 2.0) *
                     problem.primal_residual(u).squaredNorm();
  return m_k * (dist + dual - res);
}

ErgodicPoint ergodic_average(const BlockProblem& problem, double gamma,
                             const std::vector<VectorXd>& u_history,
                             const std::vector<VectorXd>& p_history,
                             const std::vector<double>& weights, long t) {
  require(t >= 0, ErrorCode::InvalidArgument, "ergodic average: t < 0");
  require(static_cast<long>(u_history.size()) >= t + 2,
          ErrorCode::InvalidArgument,
          "ergodic average: need u^0..u^{t+1} in the history");
  require(static_cast<long>(p_history.size()) >= t + 1,
          ErrorCode::InvalidArgument,
          "ergodic average: need p^0..p^t in the history");
  require(static_cast<long>(weights.size()) >= t + 1,
          ErrorCode::InvalidArgument, "ergodic average: need m^0..m^t");

  ErgodicPoint out;
  out.t = t;
  out.u_bar = VectorXd::Zero(problem.n());
  out.p_bar = VectorXd::Zero(problem.m());
  for (long k = 0; k <= t; ++k) {
    const double w = weights[k];
    require(w > 0.0, ErrorCode::InvalidArgument,
            "ergodic average: weights must be positive");
    out.sigma += w;
    out.u_bar += w * u_history[k + 1];
    out.p_bar +=
        w * (p_history[k] + gamma * problem.primal_residual(u_history[k + 1]));
  }
  out.u_bar /= out.sigma;
  out.p_bar /= out.sigma;
  return out;
}

double vi_gap(const BlockProblem& problem, const VectorXd& u_bar,
              const VectorXd& p_bar, const VectorXd& u, const VectorXd& p) {
  const VectorXd r_bar = problem.primal_residual(u_bar);
  const VectorXd r = problem.primal_residual(u);
  const double h_diff =
      problem.eval_objective(u_bar) - problem.eval_objective(u);
  return h_diff + p.dot(r_bar - r) + (-r).dot(p_bar - p);
}

BoundCheck nonergodic_bound_check(const std::vector<double>& du,
                                  const std::vector<double>& dp,
                                  double lambda0, double nu) {
  require(du.size() == dp.size(), ErrorCode::Dimension,
          "bound check: step arrays differ in length");
  require(nu > 0.0, ErrorCode::InvalidArgument, "bound check: nu must be positive");
  require(lambda0 >= 0.0, ErrorCode::InvalidArgument,
          "bound check: lambda0 must be nonnegative");
  BoundCheck out;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < du.size(); ++t) {
    best = std::min(best, du[t] * du[t] + dp[t] * dp[t]);
    const double rhs = lambda0 / (static_cast<double>(t + 1) * nu);
    if (rhs > 0.0) out.max_ratio = std::max(out.max_ratio, best / rhs);
    if (best > rhs * (1.0 + 1e-10) + 1e-300) {
      out.holds = false;
      if (out.first_violation < 0) out.first_violation = static_cast<long>(t);
    }
  }
  return out;
}

double explicit_nu(double beta, double b_g, double lambda_max_ata,
                   const SolverParams& params) {
  const double nu1 =
      0.5 * params.delta *
      (beta - params.epsilon * (b_g + params.gamma * lambda_max_ata));
  const double nu2 = params.delta * params.epsilon *
                     ((1.0 + params.delta) * params.gamma - params.rho) /
                     (2.0 * params.rho * params.rho);
  return std::min(nu1, nu2);
}

MonotonicityCheck lemma5_monotonicity_check(const BlockProblem& problem,
                                            const BoundCore& core,
                                            const SolverParams& params,
                                            const std::vector<double>& du_hbar_sq,
                                            const std::vector<double>& dp) {
  MonotonicityCheck out;
  require(du_hbar_sq.size() == dp.size(), ErrorCode::Dimension,
          "monotonicity check: step arrays differ in length");
  if (!core.constant_weights()) {
    out.reason = "core varies with the anchor";
    return out;
  }
  if (!problem.coupler().twice_differentiable) {
    out.reason = "smooth coupler is not declared twice differentiable";
    return out;
  }
  if (params.rho <= 0.0 || params.gamma <= 0.0 || params.delta <= 0.0 ||
      params.delta > 1.0 ||
      params.rho > (1.0 + params.delta) * params.gamma) {
    out.reason = "needs 0 < rho <= (1+delta) gamma with delta in (0, 1]";
    return out;
  }
  if (problem.n() > 5000) {
    out.reason = "problem too large for the dense comparison matrices";
    return out;
  }
  const QuadraticCoreMatrices mats = build_quadratic_core_matrices(
      problem, core, params.gamma, params.epsilon,
      problem.coupler().lipschitz_grad);
  const PsdCheck psd = check_underline_psd(mats.h_under);
  if (!psd.psd) {
    out.reason = "h_under has negative curvature (lambda_min = " +
                 std::to_string(psd.lambda_min) + ")";
    return out;
  }

  out.applicable = true;
  out.monotone = true;
  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < du_hbar_sq.size(); ++k) {
    const double a_k = du_hbar_sq[k] + dp[k] * dp[k] / params.rho;
    if (a_k > prev + 1e-10) {
      out.monotone = false;
      out.max_increase = std::max(out.max_increase, a_k - prev);
      if (out.first_violation < 0) out.first_violation = static_cast<long>(k);
    }
    prev = a_k;
  }
  return out;
}

RateFit rate_fit(const std::vector<double>& series, int window) {
  const long len = static_cast<long>(series.size());
  require(len >= 20, ErrorCode::InvalidArgument,
          "rate fit: need at least 20 points");
  require(window >= 2, ErrorCode::InvalidArgument,
          "rate fit: window must be at least 2");
  const long w = std::min<long>(window, len);

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (long i = len - w; i < len; ++i) {
    const double x = std::log(static_cast<double>(i + 1));
    const double y = std::log(std::max(series[i], 1e-300));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = w * sxx - sx * sx;
  RateFit out;
  out.slope = denom != 0.0 ? (w * sxy - sx * sy) / denom : 0.0;
  out.intercept = (sy - out.slope * sx) / w;

  const long t = len;
  const long t_lo = std::max<long>(1, t / 10);
  const double v_t = static_cast<double>(t) * series[t - 1];
  const double v_lo = static_cast<double>(t_lo) * series[t_lo - 1];
  out.small_o =
      v_lo > 0.0 ? v_t <= 0.1 * v_lo * (1.0 + 1e-9) : v_t <= 0.0;
  return out;
}

namespace {

struct CoordBounds {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
};

}  // namespace

SaddleReference reference_saddle(const BlockProblem& problem) {
  require(static_cast<bool>(problem.qp_data), ErrorCode::Unavailable,
          "reference solver needs the exact quadratic description");
  const int n = problem.n();
  const int m = problem.m();
  require(n <= 12, ErrorCode::SizeLimit,
          "reference solver enumerates active sets; refusing n > 12");
  for (int i = 0; i < problem.num_blocks(); ++i) {
    require(problem.block(i).j.kind == NonsmoothTerm::Kind::Zero,
            ErrorCode::Unavailable,
            "reference solver handles zero nonsmooth terms only");
  }

  const MatrixXd& q = problem.qp_data->q;
  const VectorXd& c = problem.qp_data->c;
  require(q.rows() == n && q.cols() == n && c.size() == n, ErrorCode::Dimension,
          "reference solver: quadratic description has the wrong shape");
  const MatrixXd a = problem.full_a().to_dense();
  const VectorXd& b = problem.b();

  // Per-coordinate bound description.
  std::vector<CoordBounds> bounds(n);
  for (int i = 0; i < problem.num_blocks(); ++i) {
    const int off = problem.block_offset(i);
    const int sz = problem.block_size(i);
    const ConstraintSet& set = problem.block(i).set;
    for (int j = 0; j < sz; ++j) {
      if (set.kind() == ConstraintSet::Kind::Orthant) {
        bounds[off + j].lo = 0.0;
      } else if (set.kind() == ConstraintSet::Kind::Box) {
        bounds[off + j].lo = set.lo()[j];
        bounds[off + j].hi = set.hi()[j];
      }
    }
  }

  // Candidate statuses per coordinate: 0 free, 1 at lower, 2 at upper.
  std::vector<std::vector<int>> options(n);
  for (int j = 0; j < n; ++j) {
    options[j].push_back(0);
    if (std::isfinite(bounds[j].lo)) options[j].push_back(1);
    if (std::isfinite(bounds[j].hi)) options[j].push_back(2);
  }

  const double p_tol = 1e-9 * std::max(1.0, b.lpNorm<Eigen::Infinity>());

  SaddleReference best;
  bool found = false;
  bool degenerate = false;

  std::vector<int> choice(n, 0);  // index into options[j]
  for (;;) {
    // Assemble this candidate.
    std::vector<int> free_idx;
    VectorXd x = VectorXd::Zero(n);
    for (int j = 0; j < n; ++j) {
      const int st = options[j][choice[j]];
      if (st == 0) {
        free_idx.push_back(j);
      } else {
        x[j] = st == 1 ? bounds[j].lo : bounds[j].hi;
      }
    }
    const int nf = static_cast<int>(free_idx.size());

    MatrixXd kkt = MatrixXd::Zero(nf + m, nf + m);
    VectorXd rhs(nf + m);
    for (int r = 0; r < nf; ++r) {
      for (int s = 0; s < nf; ++s) kkt(r, s) = q(free_idx[r], free_idx[s]);
      for (int s = 0; s < m; ++s) {
        kkt(r, nf + s) = a(s, free_idx[r]);
        kkt(nf + s, r) = a(s, free_idx[r]);
      }
      double acc = -c[free_idx[r]];
      for (int j = 0; j < n; ++j) {
        if (x[j] != 0.0) acc -= q(free_idx[r], j) * x[j];
      }
      rhs[r] = acc;
    }
    for (int s = 0; s < m; ++s) {
      double acc = b[s];
      for (int j = 0; j < n; ++j) {
        if (x[j] != 0.0) acc -= a(s, j) * x[j];
      }
      rhs[nf + s] = acc;
    }

    Eigen::FullPivLU<MatrixXd> lu(kkt);
    if (lu.isInvertible()) {
      const VectorXd sol = lu.solve(rhs);
      for (int r = 0; r < nf; ++r) x[free_idx[r]] = sol[r];
      const VectorXd p = sol.tail(m);
      const VectorXd g = q * x + c + a.transpose() * p;
      const double g_tol =
          1e-8 * std::max(1.0, g.lpNorm<Eigen::Infinity>() +
                                   c.lpNorm<Eigen::Infinity>());

      bool ok = (a * x - b).lpNorm<Eigen::Infinity>() <= p_tol;
      bool weakly_active = false;
      for (int j = 0; j < n && ok; ++j) {
        if (x[j] < bounds[j].lo - p_tol || x[j] > bounds[j].hi + p_tol) {
          ok = false;
          break;
        }
        const int st = options[j][choice[j]];
        if (st == 0) {
          if (std::abs(g[j]) > g_tol) ok = false;
        } else if (st == 1) {
          if (g[j] < -g_tol) ok = false;
          if (std::abs(g[j]) <= g_tol) weakly_active = true;
        } else {
          if (g[j] > g_tol) ok = false;
          if (std::abs(g[j]) <= g_tol) weakly_active = true;
        }
      }

      if (ok) {
        if (!found) {
          found = true;
          best.u_star = x;
          best.p_star = p;
          best.objective_star = 0.5 * x.dot(q * x) + c.dot(x);
          degenerate = weakly_active;
        } else if ((x - best.u_star).lpNorm<Eigen::Infinity>() > 1e-8) {
          degenerate = true;
        } else if (weakly_active) {
          degenerate = true;
        }
      }
    }

    // Next candidate (coordinate 0 is the fastest digit).
    int j = 0;
    while (j < n) {
      if (++choice[j] < static_cast<int>(options[j].size())) break;
      choice[j] = 0;
      ++j;
    }
    if (j == n) break;
    if (found && degenerate) break;  // nothing left to learn
  }

  require(found, ErrorCode::NoConvergence,
          "reference solver: no candidate active set satisfied the "
          "optimality conditions");
  best.degenerate = degenerate;
  return best;
}

}  // namespace vapp
