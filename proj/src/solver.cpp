// vapp - block-decomposition augmented Lagrangian solver
// Copyright 2026 vapp contributors
// Licensed under the Apache License, Version 2.0

#include "vapp/solver.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <limits>
#include <memory>
#include <mutex>
#include <thread>

#include "vapp/diagnostics.hpp"
#include "vapp/errors.hpp"
#include "vapp/prox.hpp"

namespace vapp {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

//! Persistent pool: parallel_for hands out indices through an atomic
//! counter. Each task writes to its own block, so scheduling order cannot
//! change the result.
class WorkerPool {
 public:
  explicit WorkerPool(int workers) {
    const int extra = std::max(0, workers - 1);
    threads_.reserve(extra);
    for (int t = 0; t < extra; ++t) {
      threads_.emplace_back([this] { worker_loop(); });
    }
  }

  ~WorkerPool() {
    {
      std::lock_guard<std::mutex> lk(mu_);
      stop_ = true;
      ++generation_;
    }
    cv_work_.notify_all();
    for (std::thread& th : threads_) th.join();
  }

  void parallel_for(int count, const std::function<void(int)>& fn) {
    if (threads_.empty() || count <= 1) {
      for (int i = 0; i < count; ++i) fn(i);
      return;
    }
    {
      std::lock_guard<std::mutex> lk(mu_);
      fn_ = &fn;
      count_ = count;
      next_.store(0, std::memory_order_relaxed);
      done_ = 0;
      ++generation_;
    }
    cv_work_.notify_all();
    for (;;) {
      const int i = next_.fetch_add(1, std::memory_order_relaxed);
      if (i >= count) break;
      fn(i);
    }
    std::unique_lock<std::mutex> lk(mu_);
    cv_main_.wait(lk, [this] {
      return done_ == static_cast<int>(threads_.size());
    });
    fn_ = nullptr;
  }

 private:
  void worker_loop() {
    std::uint64_t seen = 0;
    for (;;) {
      const std::function<void(int)>* fn = nullptr;
      int count = 0;
      {
        std::unique_lock<std::mutex> lk(mu_);
        cv_work_.wait(lk, [&] { return generation_ != seen; });
        seen = generation_;
        if (stop_) return;
        fn = fn_;
        count = count_;
      }
      if (fn != nullptr) {
        for (;;) {
          const int i = next_.fetch_add(1, std::memory_order_relaxed);
          if (i >= count) break;
          (*fn)(i);
        }
      }
      {
        std::lock_guard<std::mutex> lk(mu_);
        ++done_;
      }
      cv_main_.notify_one();
    }
  }

  std::vector<std::thread> threads_;
  std::mutex mu_;
  std::condition_variable cv_work_, cv_main_;
  const std::function<void(int)>* fn_ = nullptr;
  int count_ = 0;
  std::atomic<int> next_{0};
  int done_ = 0;
  std::uint64_t generation_ = 0;
  bool stop_ = false;
};

void check_hard_params(const SolverParams& params) {
  require(params.epsilon > 0.0, ErrorCode::InvalidArgument,
          "epsilon must be positive");
  require(params.gamma > 0.0, ErrorCode::InvalidArgument,
          "gamma must be positive");
  require(params.rho > 0.0, ErrorCode::InvalidArgument, "rho must be positive");
  require(params.delta > 0.0 && params.delta <= 1.0, ErrorCode::InvalidArgument,
          "delta must lie in (0, 1]");
  require(params.tol_primal >= 0.0 && params.tol_change >= 0.0,
          ErrorCode::InvalidArgument, "tolerances must be nonnegative");
  require(params.max_iter >= 1, ErrorCode::InvalidArgument,
          "max_iter must be at least 1");
  require(params.worker_count >= 1, ErrorCode::InvalidArgument,
          "worker_count must be at least 1");
}

//! Minimizes J_i(x) + <lin, x> + (1/2) x'Qx over the block's set, picking a
//! closed form when the term/weight/set combination admits one.
VectorXd dispatch_block_solve(const BlockSpec& block, int index,
                              const VectorXd& lin, const BlockWeight& q) {
  const bool j_zero = block.j.kind == NonsmoothTerm::Kind::Zero;
  const bool j_l1 = block.j.kind == NonsmoothTerm::Kind::L1;
  const bool all_space = block.set.kind() == ConstraintSet::Kind::AllSpace;

  if (j_zero && (q.diagonal || all_space)) {
    return solve_quadratic_block(lin, q, block.set);
  }
  if (j_l1 && q.diagonal) {
    VectorXd x(lin.size());
    for (int i = 0; i < lin.size(); ++i) {
      require(q.diag[i] > 0.0, ErrorCode::Singular,
              "block " + std::to_string(index) +
                  ": diagonal weight must be positive");
      x[i] = shrink(-lin[i] / q.diag[i], block.j.l1_weight / q.diag[i]);
    }
    return block.set.project(x);
  }
  if (block.custom_solver) {
    return block.custom_solver(lin, q, block.set);
  }
  fail(ErrorCode::Unsupported,
       "block " + std::to_string(index) +
           ": no closed form for this nonsmooth term, weight, and set, and "
           "no custom solver registered");
}

//! Shared by the public subproblem entry and the sweep: grad_hat and
//! dual_shift = p + gamma (A u_hat - b) are evaluated at the anchor once by
//! the caller.
VectorXd update_block(const BlockProblem& problem, int i,
                      const BlockWeight& weight, double eps,
                      const VectorXd& grad_hat, const VectorXd& dual_shift,
                      const VectorXd& u_hat) {
  const int off = problem.block_offset(i);
  const int sz = problem.block_size(i);
  const BlockSpec& block = problem.block(i);

  VectorXd g = grad_hat.segment(off, sz);
  block.a.apply_transpose_add(dual_shift, 1.0, g);

  BlockWeight q;
  q.diagonal = weight.diagonal;
  VectorXd lin;
  if (weight.diagonal) {
    q.diag = weight.diag / eps;
    lin = g - q.diag.cwiseProduct(u_hat.segment(off, sz));
  } else {
    q.dense = weight.dense / eps;
    lin = g - q.dense * u_hat.segment(off, sz);
  }
  return dispatch_block_solve(block, i, lin, q);
}

struct SweepContext {
  const BlockProblem& problem;
  const BoundCore& core;
  const SolverParams& params;
  WorkerPool* pool;
};

//! One primal sweep; returns u^{k+1}.
VectorXd sweep(const SweepContext& ctx, const VectorXd& u, const VectorXd& p) {
  const BlockProblem& prob = ctx.problem;
  const int nb = prob.num_blocks();

  if (ctx.params.schedule == Schedule::Jacobian) {
    const VectorXd grad_hat = prob.coupler().gradient(u);
    const VectorXd dual_shift =
        p + ctx.params.gamma * prob.primal_residual(u);
    const std::vector<BlockWeight> weights = ctx.core.weights_at(u);
    VectorXd u_next(prob.n());
    auto task = [&](int i) {
      u_next.segment(prob.block_offset(i), prob.block_size(i)) = update_block(
          prob, i, weights[i], ctx.params.epsilon, grad_hat, dual_shift, u);
    };
    if (ctx.pool != nullptr) {
      ctx.pool->parallel_for(nb, task);
    } else {
      for (int i = 0; i < nb; ++i) task(i);
    }
    return u_next;
  }

  // Gauss-Seidel: each block sees the blocks before it already updated.
  VectorXd u_hat = u;
  VectorXd r_hat = prob.primal_residual(u_hat);
  for (int i = 0; i < nb; ++i) {
    const VectorXd grad_hat = prob.coupler().gradient(u_hat);
    const VectorXd dual_shift = p + ctx.params.gamma * r_hat;
    const std::vector<BlockWeight> weights = ctx.core.weights_at(u_hat);
    const VectorXd x = update_block(prob, i, weights[i], ctx.params.epsilon,
                                    grad_hat, dual_shift, u_hat);
    const int off = prob.block_offset(i);
    const int sz = prob.block_size(i);
    prob.block(i).a.apply_add(x - u_hat.segment(off, sz), 1.0, r_hat);
    u_hat.segment(off, sz) = x;
  }
  return u_hat;
}

}  // namespace

const char* regime_name(Regime regime) {
  switch (regime) {
    case Regime::Theorem2Style: return "step-bound";
    case Regime::Proposition1Style: return "quadratic-core";
    case Regime::Neither: return "neither";
  }
  return "unknown";
}

const char* schedule_name(Schedule schedule) {
  return schedule == Schedule::Jacobian ? "jacobian" : "gauss-seidel";
}

ParamReport validate_parameters(const BlockProblem& problem,
                                const BoundCore& core,
                                const SolverParams& params) {
  ParamReport rep;
  rep.beta = core.beta();
  rep.bee = core.bee();
  rep.b_g = problem.coupler().lipschitz_grad;
  rep.lambda_max_ata = spectral_norm_sq(problem.full_a());
  rep.rho_ceiling = (1.0 + params.delta) * params.gamma;
  rep.h_under_lambda_min = kNaN;

  const bool base_ok = params.epsilon > 0.0 && params.gamma > 0.0 &&
                       params.rho > 0.0 && params.delta > 0.0 &&
                       params.delta <= 1.0;
  if (!base_ok) {
    rep.messages.push_back(
        "need epsilon > 0, gamma > 0, rho > 0, delta in (0, 1]");
  }

  const double denom = rep.b_g + params.gamma * rep.lambda_max_ata;
  rep.eps_ceiling = denom > 0.0 ? rep.beta / denom
                                : std::numeric_limits<double>::infinity();
  const bool eps_ok = params.epsilon < rep.eps_ceiling;
  const bool rho_strict_ok = params.rho < rep.rho_ceiling;
  rep.theorem2_ok = base_ok && eps_ok && rho_strict_ok;
  if (base_ok && !eps_ok) {
    rep.messages.push_back("epsilon " + std::to_string(params.epsilon) +
                           " is not strictly below its ceiling " +
                           std::to_string(rep.eps_ceiling));
  }
  if (base_ok && !rho_strict_ok) {
    rep.messages.push_back("rho " + std::to_string(params.rho) +
                           " is not strictly below (1+delta)*gamma = " +
                           std::to_string(rep.rho_ceiling));
  }

  rep.prop1_applicable = core.constant_weights() && problem.n() <= 5000;
  if (rep.prop1_applicable) {
    const QuadraticCoreMatrices mats = build_quadratic_core_matrices(
        problem, core, params.gamma, params.epsilon, rep.b_g);
    const PsdCheck psd = check_underline_psd(mats.h_under);
    rep.h_under_lambda_min = psd.lambda_min;
    const bool rho_ok = params.rho <= rep.rho_ceiling;
    rep.prop1_ok = base_ok && psd.psd && rho_ok;
    if (base_ok && !psd.psd) {
      rep.messages.push_back(
          "h_under has negative curvature (lambda_min = " +
          std::to_string(psd.lambda_min) + ")");
    }
    if (base_ok && !rho_ok) {
      rep.messages.push_back("rho " + std::to_string(params.rho) +
                             " exceeds (1+delta)*gamma = " +
                             std::to_string(rep.rho_ceiling));
    }
  } else if (!core.constant_weights()) {
    rep.messages.push_back(
        "quadratic-core regime not applicable: core varies with the anchor");
  } else {
    rep.messages.push_back(
        "quadratic-core regime not checked: problem too large for the dense "
        "comparison matrices");
  }

  rep.regime = rep.theorem2_ok  ? Regime::Theorem2Style
               : rep.prop1_ok   ? Regime::Proposition1Style
                                : Regime::Neither;
  return rep;
}

SolverParams default_parameters(const BlockProblem& problem,
                                const BoundCore& core) {
  require(core.beta() > 0.0, ErrorCode::Validation,
          "default parameters need a positive core curvature bound");
  SolverParams params;
  params.gamma = 1.0;
  params.rho = 1.0;
  params.delta = 1.0;
  const double denom = problem.coupler().lipschitz_grad +
                       params.gamma * spectral_norm_sq(problem.full_a());
  params.epsilon = denom > 0.0 ? 0.9 * core.beta() / denom : 1.0;
  return params;
}

std::vector<double> weight_sequence(double delta, double ratio, long t) {
  require(delta > 0.0 && delta <= 1.0, ErrorCode::InvalidArgument,
          "weight sequence: delta must lie in (0, 1]");
  require(ratio > 0.0 && ratio <= 1.0, ErrorCode::InvalidArgument,
          "weight sequence: ratio must lie in (0, 1]");
  require(t >= 0, ErrorCode::InvalidArgument,
          "weight sequence: t must be nonnegative");
  std::vector<double> m(static_cast<std::size_t>(t) + 1);
  m[0] = 1.0;
  for (long k = 0; k < t; ++k) {
    m[k + 1] = std::max(delta, ratio * m[k]);
  }
  return m;
}

VectorXd solve_block_subproblem(const BlockProblem& problem,
                                const BoundCore& core,
                                const SolverParams& params,
                                const VectorXd& u_hat, const VectorXd& p,
                                int block) {
  require(block >= 0 && block < problem.num_blocks(), ErrorCode::InvalidArgument,
          "block index out of range");
  require(u_hat.size() == problem.n() && p.size() == problem.m(),
          ErrorCode::Dimension, "subproblem: state has the wrong shape");
  require(params.epsilon > 0.0, ErrorCode::InvalidArgument,
          "epsilon must be positive");
  const VectorXd grad_hat = problem.coupler().gradient(u_hat);
  const VectorXd dual_shift = p + params.gamma * problem.primal_residual(u_hat);
  const std::vector<BlockWeight> weights = core.weights_at(u_hat);
  return update_block(problem, block, weights[block], params.epsilon, grad_hat,
                      dual_shift, u_hat);
}

IterateState vapp_iterate(const BlockProblem& problem, const BoundCore& core,
                          const SolverParams& params,
                          const IterateState& state) {
  check_hard_params(params);
  require(state.u.size() == problem.n() && state.p.size() == problem.m(),
          ErrorCode::Dimension, "iterate: state has the wrong shape");
  SweepContext ctx{problem, core, params, nullptr};
  IterateState next;
  next.u = sweep(ctx, state.u, state.p);
  next.p = state.p + params.rho * problem.primal_residual(next.u);
  next.k = state.k + 1;
  require(next.u.allFinite() && next.p.allFinite(), ErrorCode::Numerical,
          "iterate " + std::to_string(next.k) + " produced non-finite values");
  return next;
}

RunResult run(const BlockProblem& problem, const BoundCore& core,
              const SolverParams& params, const RunHooks& hooks) {
  check_hard_params(params);
  const ParamReport report = validate_parameters(problem, core, params);
  if (report.regime == Regime::Neither && !params.allow_unsafe) {
    std::string what = "parameters rejected:";
    for (const std::string& msg : report.messages) what += " " + msg + ";";
    fail(ErrorCode::Validation, what);
  }

  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed_ms = [&t0] {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - t0)
        .count();
  };

  RunResult result;
  VectorXd u = problem.project(VectorXd::Zero(problem.n()));
  VectorXd p = VectorXd::Zero(problem.m());
  VectorXd r = problem.primal_residual(u);

  // Comparison matrix for the weighted step norms of quadratic-core runs.
  bool track_hbar = core.constant_weights() && problem.n() <= 512;
  MatrixXd h_over;
  if (track_hbar) {
    h_over = build_quadratic_core_matrices(problem, core, params.gamma,
                                           params.epsilon,
                                           problem.coupler().lipschitz_grad)
                 .h_over;
  }

  // Diagnostic weights m^k (floor delta, decay beta/B).
  const double m_ratio = core.bee() > 0.0 ? core.beta() / core.bee() : 1.0;
  double m_k = 1.0;

  std::unique_ptr<WorkerPool> pool;
  if (params.schedule == Schedule::Jacobian && params.worker_count > 1 &&
      problem.num_blocks() > 1) {
    pool = std::make_unique<WorkerPool>(params.worker_count);
  }
  SweepContext ctx{problem, core, params, pool.get()};

  auto make_record = [&](long k, double du2, double dp2, double du_hbar,
                         const VectorXd& uu, const VectorXd& pp,
                         const VectorXd& rr) {
    TraceRecord rec;
    rec.k = k;
    rec.objective = problem.eval_objective(uu);
    rec.primal_res = rr.norm();
    rec.du_norm = du2;
    rec.dp_norm = dp2;
    rec.du_hbar_sq = track_hbar ? du_hbar : kNaN;
    rec.lambda_merit =
        hooks.saddle != nullptr
            ? merit_lambda(problem, core, params, m_k, uu, pp, *hooks.saddle)
            : kNaN;
    rec.wall_ms = hooks.measure_time ? elapsed_ms() : kNaN;
    return rec;
  };

  auto push_record = [&](const TraceRecord& rec) {
    result.trace.push_back(rec);
    if (hooks.on_iteration) hooks.on_iteration(rec);
  };

  // The trace holds one record per completed sweep (k = 1, 2, ...). The
  // start state is kept only in the iterate history.
  if (hooks.record_iterates) {
    result.u_history.push_back(u);
    result.p_history.push_back(p);
  }

  result.reason = Termination::IterationCap;
  long k = 0;
  for (; k < params.max_iter; ++k) {
    const VectorXd u_next = sweep(ctx, u, p);
    const VectorXd r_next = problem.primal_residual(u_next);
    const VectorXd p_next = p + params.rho * r_next;
    require(u_next.allFinite() && p_next.allFinite(), ErrorCode::Numerical,
            "iterate " + std::to_string(k + 1) + " produced non-finite values");

    const VectorXd du = u_next - u;
    const double du_inf = du.lpNorm<Eigen::Infinity>();
    const double du_hbar = track_hbar ? du.dot(h_over * du) : 0.0;
    m_k = std::max(params.delta, m_ratio * m_k);
    push_record(make_record(k + 1, du.norm(), (p_next - p).norm(), du_hbar,
                            u_next, p_next, r_next));

    u = u_next;
    p = p_next;
    r = r_next;
    if (hooks.record_iterates) {
      result.u_history.push_back(u);
      result.p_history.push_back(p);
    }

    if (r.lpNorm<Eigen::Infinity>() <= params.tol_primal &&
        du_inf <= params.tol_change) {
      result.reason = Termination::Converged;
      ++k;
      break;
    }
  }

  result.state.u = std::move(u);
  result.state.p = std::move(p);
  result.state.k = k;
  result.wall_ms_total = elapsed_ms();
  return result;
}

}  // namespace vapp
