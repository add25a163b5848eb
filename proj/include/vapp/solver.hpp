// vapp - block-decomposition augmented Lagrangian solver
// Copyright 2026 vapp contributors
// Licensed under the Apache License, Version 2.0

#ifndef VAPP_SOLVER_HPP_
#define VAPP_SOLVER_HPP_

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "vapp/core_function.hpp"
#include "vapp/problem.hpp"

namespace vapp {

enum class Schedule { Jacobian, GaussSeidel };

struct SolverParams {
  double epsilon = 0.0;  // inverse weight of the core term
  double gamma = 1.0;    // augmentation strength
  double rho = 1.0;      // dual step
  double delta = 1.0;    // dual step margin, in (0, 1]
  Schedule schedule = Schedule::Jacobian;
  double tol_primal = 1e-6;  // max-norm of Au - b
  double tol_change = 1e-6;  // max-norm of the primal step
  long max_iter = 100000;
  int worker_count = 1;
  //! Allows running outside both convergence regimes.
  bool allow_unsafe = false;
};

enum class Regime { Theorem2Style, Proposition1Style, Neither };

const char* regime_name(Regime regime);
const char* schedule_name(Schedule schedule);

//! Outcome of the parameter validation. theorem2_ok reflects the strict
//! step-size regime (epsilon below beta / (B_G + gamma lambda_max(A'A)),
//! rho strictly below (1+delta) gamma). prop1_ok reflects the quadratic-core
//! regime (h_under positive semidefinite, rho <= (1+delta) gamma).
struct ParamReport {
  bool theorem2_ok = false;
  bool prop1_applicable = false;
  bool prop1_ok = false;
  Regime regime = Regime::Neither;
  double beta = 0.0;
  double bee = 0.0;
  double b_g = 0.0;
  double lambda_max_ata = 0.0;
  double eps_ceiling = 0.0;       // beta / (B_G + gamma lambda_max)
  double rho_ceiling = 0.0;       // (1 + delta) gamma
  double h_under_lambda_min = 0.0;  // NaN when not applicable
  std::vector<std::string> messages;
};

ParamReport validate_parameters(const BlockProblem& problem,
                                const BoundCore& core,
                                const SolverParams& params);

//! gamma = rho = delta = 1 and epsilon at 90% of its ceiling.
SolverParams default_parameters(const BlockProblem& problem,
                                const BoundCore& core);

struct IterateState {
  VectorXd u;
  VectorXd p;
  long k = 0;
};

struct TraceRecord {
  long k = 0;
  double objective = 0.0;
  double primal_res = 0.0;  // ||Au - b||_2
  double du_norm = 0.0;     // ||u^k - u^{k-1}||_2
  double dp_norm = 0.0;     // ||p^k - p^{k-1}||_2
  double du_hbar_sq = std::numeric_limits<double>::quiet_NaN();
  double lambda_merit = std::numeric_limits<double>::quiet_NaN();
  double wall_ms = std::numeric_limits<double>::quiet_NaN();
};

enum class Termination { Converged, IterationCap };

struct RunHooks {
  std::function<void(const TraceRecord&)> on_iteration;
  //! Keep u^0..u^K and p^0..p^K for the averaged diagnostics.
  bool record_iterates = false;
  //! Enables the merit column of the trace.
  const SaddleReference* saddle = nullptr;
  //! Fill wall_ms in the in-memory trace.
  bool measure_time = true;
};

struct RunResult {
  IterateState state;
  Termination reason = Termination::IterationCap;
  std::vector<TraceRecord> trace;  // row k describes the state after sweep k
  std::vector<VectorXd> u_history;
  std::vector<VectorXd> p_history;
  double wall_ms_total = 0.0;
};

//! m^0 = 1, m^{k+1} = max(delta, ratio * m^k); returns m^0..m^t.
std::vector<double> weight_sequence(double delta, double ratio, long t);

//! One block update through the generic subproblem path: minimizes
//!   J_i(x) + <grad_i G(u_hat) + A_i'(p + gamma (A u_hat - b)), x>
//!   + (1/eps) [ (1/2) x'W_i x - <W_i u_hat_i, x> ]
//! over U_i, where W_i is the core weight built at u_hat.
VectorXd solve_block_subproblem(const BlockProblem& problem,
                                const BoundCore& core,
                                const SolverParams& params,
                                const VectorXd& u_hat, const VectorXd& p,
                                int block);

//! One full sweep plus the dual step. Does not validate the regime.
IterateState vapp_iterate(const BlockProblem& problem, const BoundCore& core,
                          const SolverParams& params, const IterateState& state);

//! Full solve from u^0 = proj(0), p^0 = 0. Validates parameters first;
//! a run outside both regimes requires params.allow_unsafe.
RunResult run(const BlockProblem& problem, const BoundCore& core,
              const SolverParams& params, const RunHooks& hooks = {});

}  // namespace vapp

#endif  // VAPP_SOLVER_HPP_
