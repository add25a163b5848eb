// vapp - block-decomposition augmented Lagrangian solver
// Copyright 2026 vapp contributors
// Licensed under the Apache License, Version 2.0

#ifndef VAPP_IO_HPP_
#define VAPP_IO_HPP_

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "vapp/applications.hpp"
#include "vapp/solver.hpp"

namespace vapp {

// ---------------------------------------------------------------------------
// Datasets
// ---------------------------------------------------------------------------

//! Column-per-sample feature matrix plus one label per sample.
struct Dataset {
  MatrixXd features;  // n_features x n_samples
  VectorXd labels;
};

//! Sparse sample-per-line text format: "label idx:val idx:val ...". Indices
//! are 1-based and must be strictly increasing within a line. Blank lines and
//! lines starting with '#' are skipped. The feature dimension is the largest
//! index seen. Parse errors carry the 1-based line number.
Dataset parse_libsvm(const std::string& text);
Dataset read_libsvm(const std::string& path);
std::string format_libsvm(const Dataset& data);
void write_libsvm(const std::string& path, const Dataset& data);

//! Planted-hyperplane two-class sample. Each feature entry is dropped to
//! zero with probability `sparsity`, otherwise standard normal; the label is
//! the sign of the planted score plus small noise.
Dataset generate_classification(std::uint64_t seed, int n_features,
                                int n_samples, double sparsity);

//! Random equality-constrained quadratic program with a strongly convex
//! objective and a consistent right-hand side (b = A u_feas exactly).
struct QpInstance {
  MatrixXd q;
  VectorXd c;
  MatrixXd a;
  VectorXd b;
  std::vector<int> block_sizes;
  std::vector<ConstraintSet> sets;
};

QpInstance generate_qp(std::uint64_t seed, int n, int m, int num_blocks);

//! Line-oriented text form of a block QP ("vapp-qp 1" magic, then n, m,
//! blocks, q, c, a, b rows in that order, then one optional set line per
//! block). Numbers round-trip exactly.
QpInstance parse_qp_text(const std::string& text);
QpInstance read_qp_file(const std::string& path);
std::string format_qp_text(const QpInstance& inst);
void write_qp_file(const std::string& path, const QpInstance& inst);

//! Kernelized dual instance: with M the label-scaled feature matrix,
//! Q = M'M + 0.1 I (so lambda_min(Q) >= 0.1), linear term -1.
DsvmInstance dsvm_instance_from_data(const Dataset& data, double box_c,
                                     double ridge = 0.1);

// ---------------------------------------------------------------------------
// Run configuration
// ---------------------------------------------------------------------------

//! Flat "key = value" file, one pair per line, '#' comments. Unknown or
//! duplicate keys are parse errors; keys that do not apply to the chosen
//! problem or variant are rejected when the job is built.
struct RunConfig {
  std::string problem;  // qp | fused-svm | logistic | dsvm
  std::string variant;  // empty means the problem's default core
  std::string data;     // dataset path; empty means generate
  std::uint64_t seed = 1;
  int n = 0;  // 0 means the per-problem default size
  int m = 0;
  int features = 8;  // dsvm generator feature count
  double sparsity = 0.0;
  int blocks = 2;  // qp block count
  double epsilon = 0.0;  // 0 means the builder's choice
  double gamma = 1.0;
  double rho = 1.0;
  double delta = 1.0;
  double theta = 0.0;  // qp jacobian-core scale; 0 means gamma
  double alpha = 1.0;  // qp jacobian-core proximal weight
  double alpha1 = 1.0;
  double alpha2 = 1.0;
  double lambda = 0.01;
  double lambda1 = 0.1;
  double lambda2 = 0.1;
  double c = 1.0;
  double tol_primal = 1e-6;
  double tol_change = 1e-6;
  long max_iter = 100000;
  int workers = 1;
  std::string schedule = "jacobian";
  std::string trace_csv;
  std::string summary_json;
  bool timing = false;
  bool allow_unsafe = false;

  std::set<std::string> provided;
  bool has(const std::string& key) const { return provided.count(key) > 0; }

  static RunConfig parse(const std::string& text);
  static RunConfig load(const std::string& path);
  //! Applies one "key=value" pair on top of the parsed file (CLI overrides).
  void apply_override(const std::string& key, const std::string& value);
};

//! A fully assembled run: problem, bound core, parameters, output wiring.
struct Job {
  std::string kind;
  std::string variant;
  std::string trace_csv;
  std::string summary_json;
  bool timing = false;
  BlockProblem problem;
  BoundCore core;
  SolverParams params;
};

Job build_job(const RunConfig& config);

// ---------------------------------------------------------------------------
// Trace and summary serialization
// ---------------------------------------------------------------------------

//! Shortest round-trip decimal form used for every number we write.
std::string format_g17(double v);

//! Header "k,objective,primal_res,du_norm,dp_norm,du_Hbar_sq,lambda_merit,
//! wall_ms". Unavailable diagnostics (NaN) become empty cells, so outputs of
//! untimed runs are byte-identical across repetitions and worker counts.
std::string format_trace_csv(const std::vector<TraceRecord>& trace);
void write_trace_csv(const std::string& path,
                     const std::vector<TraceRecord>& trace);
std::vector<TraceRecord> parse_trace_csv(const std::string& text);
std::vector<TraceRecord> read_trace_csv(const std::string& path);

//! Run summary as a JSON object: final objective and residuals, iteration
//! count, termination reason, the parameter report, and the tail rate fit.
//! Wall-clock fields are included only when the job asked for timing.
std::string summary_json(const Job& job, const ParamReport& report,
                         const RunResult& result);

//! Parameter validation report as a JSON object.
std::string validation_json(const Job& job, const ParamReport& report);

// ---------------------------------------------------------------------------
// Small file helpers
// ---------------------------------------------------------------------------

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace vapp

#endif  // VAPP_IO_HPP_
