// vapp - block-decomposition augmented Lagrangian solver
// Copyright 2026 vapp contributors
// Licensed under the Apache License, Version 2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <string>

#include "vapp/errors.hpp"
#include "vapp/io.hpp"
#include "vapp/solver.hpp"

using namespace vapp;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Internal;  // placeholder meaning "did not throw"
}

std::string message_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

bool contains(const std::string& text, const std::string& needle) {
  return text.find(needle) != std::string::npos;
}

//! Scratch directory for the file round-trip tests.
std::string scratch_path(const std::string& name) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "vapp_io_tests";
  fs::create_directories(dir);
  return (dir / name).string();
}

double lambda_min_sym(const MatrixXd& m) {
  return Eigen::SelfAdjointEigenSolver<MatrixXd>(m).eigenvalues().minCoeff();
}

}  // namespace

// ---------------------------------------------------------------------------
// Sparse sample text format
// ---------------------------------------------------------------------------

TEST_CASE("sample text parsing") {
  const Dataset d = parse_libsvm("+1 1:0.5 3:-2\n");
  CHECK(d.features.rows() == 3);  // width is the largest index seen
  CHECK(d.features.cols() == 1);
  CHECK(d.labels.size() == 1);
  CHECK(d.labels[0] == 1.0);
  CHECK(d.features(0, 0) == 0.5);
  CHECK(d.features(1, 0) == 0.0);
  CHECK(d.features(2, 0) == -2.0);

  // Comments and blank lines are skipped; later samples can widen the matrix.
  const Dataset two = parse_libsvm("# two samples\n+1 1:0.5 3:-2\n\n-1 2:4\n");
  CHECK(two.features.rows() == 3);
  CHECK(two.features.cols() == 2);
  CHECK(two.labels[1] == -1.0);
  CHECK(two.features(1, 1) == 4.0);
  CHECK(two.features(0, 1) == 0.0);
}

TEST_CASE("sample text parse errors") {
  CHECK(code_of([] { parse_libsvm(""); }) == ErrorCode::Parse);
  CHECK(contains(message_of([] { parse_libsvm(""); }), "no samples in input"));
  CHECK(contains(message_of([] { parse_libsvm("# only a comment\n\n"); }),
                 "no samples in input"));

  CHECK(contains(message_of([] { parse_libsvm("1 2:1 1:5\n"); }),
                 "strictly increasing"));
  CHECK(contains(message_of([] { parse_libsvm("1 0:1\n"); }),
                 "indices are 1-based"));
  CHECK(contains(message_of([] { parse_libsvm("1 abc\n"); }),
                 "expected index:value"));

  // Errors carry the 1-based line number of the offending line.
  const std::string msg =
      message_of([] { parse_libsvm("# header\n\n+1 1:2\nbroken\n"); });
  CHECK(contains(msg, "line 4:"));
  CHECK(contains(msg, "bad number"));
}

TEST_CASE("sample text formatting round trip") {
  Dataset d;
  d.features = MatrixXd::Zero(3, 2);
  d.features(0, 0) = 0.5;
  d.features(2, 0) = -2.0;
  d.features(1, 1) = 4.0;
  d.labels = (VectorXd(2) << 1.0, -1.0).finished();

  // Zeros are omitted; indices are 1-based.
  CHECK(format_libsvm(d) == "1 1:0.5 3:-2\n-1 2:4\n");

  const Dataset r = parse_libsvm(format_libsvm(d));
  CHECK(r.features.rows() == 3);
  CHECK(r.features.cols() == 2);
  CHECK((r.features.array() == d.features.array()).all());
  CHECK((r.labels.array() == d.labels.array()).all());

  // The text form is a fixed point even with noisy generated values.
  const Dataset g = generate_classification(42, 5, 7, 0.3);
  const std::string once = format_libsvm(g);
  CHECK(format_libsvm(parse_libsvm(once)) == once);

  // File round trip through the write/read pair.
  const std::string path = scratch_path("round.libsvm");
  write_libsvm(path, d);
  const Dataset from_file = read_libsvm(path);
  CHECK((from_file.features.array() == d.features.array()).all());
  CHECK((from_file.labels.array() == d.labels.array()).all());

  Dataset bad = d;
  bad.labels = VectorXd::Ones(3);
  CHECK(code_of([&] { format_libsvm(bad); }) == ErrorCode::Dimension);
}

TEST_CASE("classification generator") {
  const Dataset a = generate_classification(7, 6, 10, 0.0);
  const Dataset b = generate_classification(7, 6, 10, 0.0);
  CHECK(a.features.rows() == 6);
  CHECK(a.features.cols() == 10);
  CHECK(a.labels.size() == 10);
  // Same seed reproduces the dataset bit for bit.
  CHECK((a.features.array() == b.features.array()).all());
  CHECK((a.labels.array() == b.labels.array()).all());

  const Dataset c = generate_classification(8, 6, 10, 0.0);
  CHECK_FALSE((a.features.array() == c.features.array()).all());

  for (int j = 0; j < a.labels.size(); ++j) {
    CHECK(std::abs(a.labels[j]) == 1.0);
  }

  // Sparsity drops entries to exact zeros.
  const Dataset sparse = generate_classification(7, 8, 40, 0.9);
  const int zeros_sparse = (sparse.features.array() == 0.0).count();
  const int zeros_dense = (a.features.array() == 0.0).count();
  CHECK(zeros_sparse > zeros_dense);
  CHECK(zeros_sparse > 100);  // 320 entries at 90 percent sparsity

  CHECK(code_of([] { generate_classification(1, 4, 4, 1.0); }) ==
        ErrorCode::InvalidArgument);
  CHECK(code_of([] { generate_classification(1, 0, 4, 0.0); }) ==
        ErrorCode::InvalidArgument);
}

// ---------------------------------------------------------------------------
// Block QP instances
// ---------------------------------------------------------------------------

TEST_CASE("qp generator") {
  const QpInstance inst = generate_qp(11, 7, 3, 2);
  CHECK(inst.q.rows() == 7);
  CHECK(inst.q.cols() == 7);
  CHECK(inst.c.size() == 7);
  CHECK(inst.a.rows() == 3);
  CHECK(inst.a.cols() == 7);
  CHECK(inst.b.size() == 3);
  CHECK(inst.block_sizes.size() == 2);
  CHECK(inst.block_sizes[0] + inst.block_sizes[1] == 7);
  for (const ConstraintSet& set : inst.sets) {
    CHECK(set.kind() == ConstraintSet::Kind::AllSpace);
  }

  // The objective matrix is symmetric and strongly positive definite.
  CHECK((inst.q - inst.q.transpose()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(lambda_min_sym(inst.q) >= 0.5 - 1e-9);

  // The right-hand side is consistent: least squares leaves no residual.
  const VectorXd x = inst.a.colPivHouseholderQr().solve(inst.b);
  CHECK((inst.a * x - inst.b).norm() < 1e-8);

  const QpInstance again = generate_qp(11, 7, 3, 2);
  CHECK((inst.q.array() == again.q.array()).all());
  CHECK((inst.b.array() == again.b.array()).all());

  CHECK(code_of([] { generate_qp(1, 4, 2, 5); }) ==
        ErrorCode::InvalidArgument);  // more blocks than variables
  CHECK(code_of([] { generate_qp(1, 0, 2, 1); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("qp text round trip") {
  QpInstance inst;
  inst.q = (MatrixXd(3, 3) << 2.0, 0.5, 0.0, 0.5, 3.0, 1.0 / 3.0, 0.0,
            1.0 / 3.0, 4.0)
               .finished();
  inst.c = (VectorXd(3) << -1.0, 0.25, 1e-3).finished();
  inst.a = (MatrixXd(2, 3) << 1.0, -2.0, 0.125, 0.0, 0.75, -0.5).finished();
  inst.b = (VectorXd(2) << 0.75, -1.0 / 7.0).finished();
  inst.block_sizes = {1, 1, 1};
  inst.sets = {ConstraintSet::all_space(), ConstraintSet::orthant(),
               ConstraintSet::box(VectorXd::Constant(1, -0.5),
                                  VectorXd::Constant(1, 1.5))};

  const std::string text = format_qp_text(inst);
  CHECK(contains(text, "vapp-qp 1\n"));
  const QpInstance r = parse_qp_text(text);
  CHECK((r.q.array() == inst.q.array()).all());
  CHECK((r.c.array() == inst.c.array()).all());
  CHECK((r.a.array() == inst.a.array()).all());
  CHECK((r.b.array() == inst.b.array()).all());
  CHECK(r.block_sizes == inst.block_sizes);
  REQUIRE(r.sets.size() == 3);
  CHECK(r.sets[0].kind() == ConstraintSet::Kind::AllSpace);
  CHECK(r.sets[1].kind() == ConstraintSet::Kind::Orthant);
  CHECK(r.sets[2].kind() == ConstraintSet::Kind::Box);
  CHECK(r.sets[2].lo()[0] == -0.5);
  CHECK(r.sets[2].hi()[0] == 1.5);

  // Formatting the parse result reproduces the text exactly.
  CHECK(format_qp_text(r) == text);

  const std::string path = scratch_path("round.qp");
  write_qp_file(path, inst);
  const QpInstance from_file = read_qp_file(path);
  CHECK((from_file.q.array() == inst.q.array()).all());
  CHECK(from_file.block_sizes == inst.block_sizes);
}

TEST_CASE("qp text comments and parse errors") {
  // Comments and blank lines are allowed anywhere between content lines.
  const QpInstance inst = parse_qp_text(
      "# tiny instance\nvapp-qp 1\n\nn 1\n# one constraint\nm 1\nblocks 1\n"
      "q 2\nc -1\na 1\nb 0.5\nset 0 orthant\n");
  CHECK(inst.q(0, 0) == 2.0);
  CHECK(inst.b[0] == 0.5);
  CHECK(inst.sets[0].kind() == ConstraintSet::Kind::Orthant);

  CHECK(contains(message_of([] { parse_qp_text("vapp-qp 2\nn 1\n"); }),
                 "expected header 'vapp-qp 1'"));
  CHECK(contains(message_of([] { parse_qp_text("vapp-qp 1\nn 1\n"); }),
                 "unexpected end of file"));
  CHECK(contains(
      message_of([] {
        parse_qp_text("vapp-qp 1\nn 1\nm 1\nblocks 2\nq 2\nc 0\na 1\nb 0\n");
      }),
      "block sizes must sum to n"));
  CHECK(contains(
      message_of([] {
        parse_qp_text(
            "vapp-qp 1\nn 1\nm 1\nblocks 1\nq 2\nc 0\na 1\nb 0\nset 0 cone\n");
      }),
      "unknown set kind 'cone'"));
  CHECK(contains(
      message_of([] {
        parse_qp_text(
            "vapp-qp 1\nn 1\nm 1\nblocks 1\nq 2\nc 0\na 1\nb 0\nset 5 all\n");
      }),
      "bad block index"));
  CHECK(contains(message_of([] { parse_qp_text("vapp-qp 1\nn 1.5\n"); }),
                 "positive integer"));
  CHECK(contains(
      message_of([] {
        parse_qp_text("vapp-qp 1\nn 1\nm 1\nblocks 1\nq 1 2\nc 0\na 1\nb 0\n");
      }),
      "expected 1 numbers, got 2"));
  CHECK(code_of([] { parse_qp_text(""); }) == ErrorCode::Parse);
}

TEST_CASE("kernel instance from a dataset") {
  const Dataset d = generate_classification(9, 4, 6, 0.0);
  const DsvmInstance inst = dsvm_instance_from_data(d, 2.5);
  CHECK(inst.q.rows() == 6);
  CHECK(inst.q.cols() == 6);
  CHECK((inst.q - inst.q.transpose()).cwiseAbs().maxCoeff() < 1e-12);
  // The default ridge keeps the kernel matrix strongly positive definite.
  CHECK(lambda_min_sym(inst.q) >= 0.1 - 1e-9);
  CHECK((inst.lin.array() == -1.0).all());
  CHECK((inst.y.array() == d.labels.array()).all());
  CHECK(inst.box_c == 2.5);

  CHECK(code_of([&] { dsvm_instance_from_data(d, 1.0, -0.5); }) ==
        ErrorCode::InvalidArgument);
  CHECK(code_of([] { dsvm_instance_from_data(Dataset{}, 1.0); }) ==
        ErrorCode::InvalidArgument);
}

// ---------------------------------------------------------------------------
// Run configuration parsing
// ---------------------------------------------------------------------------

TEST_CASE("config parsing and defaults") {
  const RunConfig cfg = RunConfig::parse("problem = qp # trailing comment\n");
  CHECK(cfg.problem == "qp");
  CHECK(cfg.variant.empty());
  CHECK(cfg.seed == 1);
  CHECK(cfg.blocks == 2);
  CHECK(cfg.epsilon == 0.0);
  CHECK(cfg.gamma == 1.0);
  CHECK(cfg.rho == 1.0);
  CHECK(cfg.delta == 1.0);
  CHECK(cfg.tol_primal == 1e-6);
  CHECK(cfg.max_iter == 100000);
  CHECK(cfg.workers == 1);
  CHECK(cfg.schedule == "jacobian");
  CHECK_FALSE(cfg.timing);
  CHECK(cfg.has("problem"));
  CHECK_FALSE(cfg.has("gamma"));

  const RunConfig full = RunConfig::parse(
      "# full file\nproblem = dsvm\nseed = 42\nn = 9\nfeatures = 3\n"
      "c = 0.5\ntiming = 1\nallow_unsafe = false\nschedule = gauss-seidel\n");
  CHECK(full.problem == "dsvm");
  CHECK(full.seed == 42);
  CHECK(full.n == 9);
  CHECK(full.features == 3);
  CHECK(full.c == 0.5);
  CHECK(full.timing);
  CHECK_FALSE(full.allow_unsafe);
  CHECK(full.schedule == "gauss-seidel");

  // The legacy alias maps onto the plain QP kind.
  CHECK(RunConfig::parse("problem = generic-qp\n").problem == "qp");
}

TEST_CASE("config parse errors") {
  CHECK(code_of([] { RunConfig::parse("problem = qp\nbogus = 3\n"); }) ==
        ErrorCode::Parse);
  CHECK(contains(
      message_of([] { RunConfig::parse("problem = qp\nbogus = 3\n"); }),
      "line 2: unknown key 'bogus'"));
  CHECK(contains(message_of([] {
                   RunConfig::parse("problem = qp\nproblem = dsvm\n");
                 }),
                 "line 2: duplicate key 'problem'"));
  CHECK(contains(message_of([] { RunConfig::parse("problem = nope\n"); }),
                 "unknown problem 'nope'"));
  CHECK(contains(
      message_of([] { RunConfig::parse("problem = qp\nvariant = nope\n"); }),
      "unknown variant 'nope'"));
  CHECK(contains(
      message_of([] { RunConfig::parse("problem = qp\nschedule = nope\n"); }),
      "unknown schedule 'nope'"));
  CHECK(contains(
      message_of([] { RunConfig::parse("problem = qp\ntiming = maybe\n"); }),
      "expected true or false for 'timing'"));
  CHECK(contains(
      message_of([] { RunConfig::parse("problem = qp\nseed = -3\n"); }),
      "bad seed '-3'"));
  CHECK(contains(message_of([] { RunConfig::parse("gamma = 1\n"); }),
                 "missing required key 'problem'"));
  CHECK(contains(message_of([] { RunConfig::parse("problem qp\n"); }),
                 "expected key = value"));
  CHECK(contains(message_of([] { RunConfig::parse("problem =\n"); }),
                 "empty value for 'problem'"));
  CHECK(contains(message_of([] { RunConfig::parse("= qp\n"); }), "empty key"));
  CHECK(contains(message_of([] {
                   RunConfig::parse("problem = qp\nworkers = 4294967296\n");
                 }),
                 "integer out of range"));
  CHECK(contains(
      message_of([] { RunConfig::parse("problem = qp\ngamma = fast\n"); }),
      "bad number 'fast'"));
}

TEST_CASE("config overrides replace parsed values") {
  RunConfig cfg = RunConfig::parse("problem = qp\ngamma = 1.5\n");
  cfg.apply_override("gamma", "2.5");  // no duplicate-key error for overrides
  CHECK(cfg.gamma == 2.5);
  cfg.apply_override(" gamma ", " 3.5 ");  // keys and values are trimmed
  CHECK(cfg.gamma == 3.5);
  cfg.apply_override("workers", "4");
  CHECK(cfg.workers == 4);
  CHECK(cfg.has("workers"));

  CHECK(code_of([&] { cfg.apply_override("bogus", "1"); }) == ErrorCode::Parse);
  CHECK(contains(message_of([&] { cfg.apply_override("rho", "abc"); }),
                 "bad number"));
}

TEST_CASE("config keys must apply to the chosen problem") {
  // A generator key next to an explicit data path is ambiguous.
  const RunConfig both = RunConfig::parse("problem = qp\ndata = x.qp\nseed = 4\n");
  CHECK(code_of([&] { build_job(both); }) == ErrorCode::Validation);
  CHECK(contains(message_of([&] { build_job(both); }),
                 "use exactly one data source"));

  const RunConfig theta = RunConfig::parse("problem = dsvm\ntheta = 1\n");
  CHECK(code_of([&] { build_job(theta); }) == ErrorCode::Validation);
  CHECK(contains(message_of([&] { build_job(theta); }),
                 "key 'theta' does not apply to problem 'dsvm'"));

  const RunConfig lam = RunConfig::parse("problem = qp\nlambda = 1\n");
  CHECK(code_of([&] { build_job(lam); }) == ErrorCode::Validation);
}

// ---------------------------------------------------------------------------
// Job construction
// ---------------------------------------------------------------------------

TEST_CASE("job defaults per problem kind") {
  // QP: identity core, step size defaulted from the validation ceiling.
  const Job qp = build_job(RunConfig::parse("problem = qp\nseed = 3\n"));
  CHECK(qp.kind == "qp");
  CHECK(qp.variant == "identity-core");
  CHECK(qp.problem.n() == 12);
  CHECK(qp.problem.m() == 4);
  CHECK(qp.problem.num_blocks() == 2);
  const ParamReport rep = validate_parameters(qp.problem, qp.core, qp.params);
  CHECK(qp.params.epsilon == doctest::Approx(0.9 * rep.eps_ceiling));
  CHECK(rep.theorem2_ok);

  // Fused path: parallel variant with unit step by construction.
  const Job fused =
      build_job(RunConfig::parse("problem = fused-svm\nn = 4\nm = 6\n"));
  CHECK(fused.kind == "fused-svm");
  CHECK(fused.variant == "pjvapp");
  CHECK(fused.problem.num_blocks() == 5);  // scalar blocks plus differences
  CHECK(fused.problem.n() == 7);
  CHECK(fused.problem.m() == 3);
  CHECK(fused.params.epsilon == 1.0);

  // Logistic: curvature-matched core by default.
  const Job logit =
      build_job(RunConfig::parse("problem = logistic\nn = 5\nm = 8\n"));
  CHECK(logit.kind == "logistic");
  CHECK(logit.variant == "newton-core");
  CHECK(logit.problem.num_blocks() == 2);
  CHECK(logit.problem.n() == 13);  // weights plus one margin per sample
  CHECK(logit.problem.m() == 8);
  CHECK(logit.params.epsilon > 0.0);

  // Kernel dual: one box block, n counts samples.
  const Job dsvm = build_job(
      RunConfig::parse("problem = dsvm\nn = 10\nfeatures = 4\nc = 2\n"));
  CHECK(dsvm.kind == "dsvm");
  CHECK(dsvm.variant == "identity-core");
  CHECK(dsvm.problem.num_blocks() == 1);
  CHECK(dsvm.problem.n() == 10);
  CHECK(dsvm.problem.m() == 1);
  CHECK(dsvm.params.epsilon > 0.0);
}

TEST_CASE("job wiring carries solver and output settings") {
  const Job job = build_job(RunConfig::parse(
      "problem = qp\nn = 6\nm = 2\nblocks = 3\ngamma = 0.5\nrho = 0.7\n"
      "delta = 0.5\nepsilon = 0.123\ntol_primal = 1e-4\ntol_change = 1e-5\n"
      "max_iter = 77\nworkers = 3\nschedule = gauss-seidel\n"
      "trace_csv = out.csv\nsummary_json = out.json\ntiming = true\n"
      "allow_unsafe = true\n"));
  CHECK(job.params.gamma == 0.5);
  CHECK(job.params.rho == 0.7);
  CHECK(job.params.delta == 0.5);
  CHECK(job.params.epsilon == 0.123);  // explicit value beats the default
  CHECK(job.params.tol_primal == 1e-4);
  CHECK(job.params.tol_change == 1e-5);
  CHECK(job.params.max_iter == 77);
  CHECK(job.params.worker_count == 3);
  CHECK(job.params.schedule == Schedule::GaussSeidel);
  CHECK(job.params.allow_unsafe);
  CHECK(job.trace_csv == "out.csv");
  CHECK(job.summary_json == "out.json");
  CHECK(job.timing);
}

TEST_CASE("variant availability per problem") {
  CHECK(contains(
      message_of([] {
        build_job(RunConfig::parse("problem = dsvm\nvariant = pjvapp\n"));
      }),
      "variant 'pjvapp' is not available for problem 'dsvm'"));
  CHECK(code_of([] {
          build_job(
              RunConfig::parse("problem = fused-svm\nvariant = newton-core\n"));
        }) == ErrorCode::Validation);
  CHECK(code_of([] {
          build_job(
              RunConfig::parse("problem = logistic\nvariant = pjvapp\n"));
        }) == ErrorCode::Validation);
  CHECK(code_of([] {
          build_job(RunConfig::parse("problem = qp\nvariant = newton-core\n"));
        }) == ErrorCode::Validation);
}

TEST_CASE("variant parameter constraints") {
  // The linearized variant pins the proximal weight; passing one is an error.
  CHECK(contains(
      message_of([] {
        build_job(
            RunConfig::parse("problem = qp\nvariant = ljvapp\nalpha = 2\n"));
      }),
      "fixes alpha = 0"));
  CHECK(contains(
      message_of([] {
        build_job(
            RunConfig::parse("problem = qp\nvariant = lpvapp\ntheta = 1\n"));
      }),
      "fixes theta = 0"));
  CHECK(contains(
      message_of([] {
        build_job(
            RunConfig::parse("problem = qp\nvariant = pjvapp\nalpha = 0\n"));
      }),
      "positive theta and alpha"));
  CHECK(code_of([] {
          build_job(RunConfig::parse(
              "problem = fused-svm\nvariant = ljvapp\nalpha1 = 1\n"));
        }) == ErrorCode::Validation);

  // Well-posed variant jobs build and carry the unit step size.
  const Job pj = build_job(
      RunConfig::parse("problem = qp\nvariant = pjvapp\nn = 6\nm = 2\n"));
  CHECK(pj.variant == "pjvapp");
  CHECK(pj.params.epsilon == 1.0);

  // The coupling-only core needs tall per-block couplings to stay invertible.
  const Job lj = build_job(RunConfig::parse(
      "problem = qp\nvariant = ljvapp\nn = 6\nm = 6\nblocks = 3\nseed = 2\n"));
  CHECK(lj.variant == "ljvapp");
  CHECK(lj.params.epsilon == 1.0);

  const Job lp = build_job(
      RunConfig::parse("problem = qp\nvariant = lpvapp\nalpha = 2\n"));
  CHECK(lp.variant == "lpvapp");
  CHECK(lp.params.epsilon == 1.0);

  const Job fused_lj = build_job(
      RunConfig::parse("problem = fused-svm\nvariant = ljvapp\nn = 4\nm = 5\n"));
  CHECK(fused_lj.variant == "ljvapp");
}

// ---------------------------------------------------------------------------
// Trace serialization
// ---------------------------------------------------------------------------

TEST_CASE("trace csv formatting") {
  const std::string header =
      "k,objective,primal_res,du_norm,dp_norm,du_Hbar_sq,lambda_merit,wall_ms";
  CHECK(format_trace_csv({}) == header + "\n");

  TraceRecord a;
  a.k = 1;
  a.objective = 1.0 / 3.0;
  a.primal_res = 2e-7;
  a.du_norm = 0.0;
  a.dp_norm = 0.5;
  // du_hbar_sq, lambda_merit, wall_ms stay unavailable (NaN).
  TraceRecord b;
  b.k = 2;
  b.objective = -4.0;
  b.primal_res = 0.5;
  b.du_norm = 0.25;
  b.dp_norm = 0.125;
  b.du_hbar_sq = 0.0625;
  b.lambda_merit = -0.25;
  b.wall_ms = 1.5;

  const std::string text = format_trace_csv({a, b});
  // Unavailable cells are empty so repeated runs serialize identically.
  CHECK(contains(text, ",0.5,,,\n"));

  const std::vector<TraceRecord> r = parse_trace_csv(text);
  REQUIRE(r.size() == 2);
  CHECK(r[0].k == 1);
  CHECK(r[0].objective == a.objective);
  CHECK(r[0].dp_norm == 0.5);
  CHECK(std::isnan(r[0].du_hbar_sq));
  CHECK(std::isnan(r[0].lambda_merit));
  CHECK(std::isnan(r[0].wall_ms));
  CHECK(r[1].du_hbar_sq == 0.0625);
  CHECK(r[1].wall_ms == 1.5);

  // Text form is a fixed point of parse-then-format.
  CHECK(format_trace_csv(r) == text);

  const std::string path = scratch_path("trace.csv");
  write_trace_csv(path, {a, b});
  const std::vector<TraceRecord> from_file = read_trace_csv(path);
  REQUIRE(from_file.size() == 2);
  CHECK(from_file[1].lambda_merit == -0.25);
}

TEST_CASE("trace csv parse errors") {
  CHECK(contains(message_of([] { parse_trace_csv(""); }), "empty trace"));
  CHECK(contains(message_of([] { parse_trace_csv("k,objective\n1,2\n"); }),
                 "line 1: unrecognized trace header"));

  const std::string header =
      "k,objective,primal_res,du_norm,dp_norm,du_Hbar_sq,lambda_merit,wall_ms";
  CHECK(parse_trace_csv(header + "\n").empty());
  CHECK(parse_trace_csv(header + "\n\n\n").empty());  // blank rows are skipped
  CHECK(contains(
      message_of([&] { parse_trace_csv(header + "\n1,2,3\n"); }),
      "line 2: expected 8 fields"));
  CHECK(contains(
      message_of([&] { parse_trace_csv(header + "\n1,xyz,0,0,0,,,\n"); }),
      "bad number 'xyz'"));
}

TEST_CASE("shortest round-trip float formatting") {
  const double values[] = {0.1,
                           1.0 / 3.0,
                           3.141592653589793,
                           1e-300,
                           1e300,
                           4.9406564584124654e-324,
                           1.7976931348623157e308,
                           123456789.123456789,
                           -2.5e-17};
  for (double v : values) {
    CHECK(std::strtod(format_g17(v).c_str(), nullptr) == v);
  }
  CHECK(format_g17(1.0) == "1");
  CHECK(std::signbit(std::strtod(format_g17(-0.0).c_str(), nullptr)));
}

// ---------------------------------------------------------------------------
// Summary and validation reports
// ---------------------------------------------------------------------------

TEST_CASE("summary json for a finished run") {
  Job job = build_job(
      RunConfig::parse("problem = qp\nseed = 5\nn = 4\nm = 2\nblocks = 2\n"));
  const ParamReport rep = validate_parameters(job.problem, job.core, job.params);
  RunHooks hooks;
  hooks.measure_time = false;
  const RunResult res = run(job.problem, job.core, job.params, hooks);

  const std::string text = summary_json(job, rep, res);
  CHECK(contains(text, "\"problem\": \"qp\""));
  CHECK(contains(text, "\"variant\": \"identity-core\""));
  CHECK(contains(text, "\"blocks\": 2"));
  CHECK(contains(text, "\"schedule\": \"jacobian\""));
  CHECK(contains(text, "\"termination\": \"converged\""));
  CHECK(contains(text, "\"regime\":"));
  CHECK(contains(text, "\"eps_ceiling\":"));
  CHECK(contains(text, "\"iterations\":"));
  CHECK(contains(text, "\"rate\":"));
  // Wall-clock totals appear only when the job asked for timing.
  CHECK_FALSE(contains(text, "wall_ms_total"));
  job.timing = true;
  CHECK(contains(summary_json(job, rep, res), "wall_ms_total"));
  job.timing = false;

  // A capped short run reports the cap and no rate fit.
  job.params.max_iter = 5;
  const RunResult capped = run(job.problem, job.core, job.params, hooks);
  const std::string capped_text = summary_json(job, rep, capped);
  CHECK(contains(capped_text, "\"termination\": \"iteration-cap\""));
  CHECK(contains(capped_text, "\"rate\": null"));

  CHECK(code_of([&] { summary_json(job, rep, RunResult{}); }) ==
        ErrorCode::InvalidArgument);
}

TEST_CASE("validation json") {
  const Job job = build_job(
      RunConfig::parse("problem = qp\nseed = 5\nn = 4\nm = 2\nblocks = 2\n"));
  const ParamReport rep = validate_parameters(job.problem, job.core, job.params);
  const std::string text = validation_json(job, rep);
  CHECK(contains(text, "\"problem\": \"qp\""));
  CHECK(contains(text, "\"epsilon\":"));
  CHECK(contains(text, "\"theorem2_ok\": true"));
  CHECK(contains(text, "\"messages\": ["));

  // The quadratic-core floor is not defined for the curvature-matched core.
  const Job logit =
      build_job(RunConfig::parse("problem = logistic\nn = 3\nm = 4\n"));
  const ParamReport lrep =
      validate_parameters(logit.problem, logit.core, logit.params);
  const std::string ltext = validation_json(logit, lrep);
  CHECK(contains(ltext, "\"h_under_lambda_min\": null"));
  CHECK(contains(ltext, "\"prop1_applicable\": false"));
}

// ---------------------------------------------------------------------------
// End-to-end determinism through the config pipeline
// ---------------------------------------------------------------------------

TEST_CASE("configured runs serialize identically across worker counts") {
  const RunConfig base = RunConfig::parse(
      "problem = qp\nseed = 3\nn = 6\nm = 2\nblocks = 3\n");
  RunConfig wide = base;
  wide.apply_override("workers", "4");

  const Job job1 = build_job(base);
  const Job job4 = build_job(wide);
  RunHooks hooks;
  hooks.measure_time = false;
  const RunResult r1 = run(job1.problem, job1.core, job1.params, hooks);
  const RunResult r4 = run(job4.problem, job4.core, job4.params, hooks);

  CHECK(r1.reason == Termination::Converged);
  CHECK(r4.reason == Termination::Converged);
  CHECK(format_trace_csv(r1.trace) == format_trace_csv(r4.trace));
}

// ---------------------------------------------------------------------------
// File helpers
// ---------------------------------------------------------------------------

TEST_CASE("text file round trip and errors") {
  const std::string path = scratch_path("note.txt");
  write_text_file(path, "alpha\nbeta\n");
  CHECK(read_text_file(path) == "alpha\nbeta\n");

  CHECK(code_of([] { read_text_file("/nonexistent/vapp/missing.txt"); }) ==
        ErrorCode::Io);
  CHECK(contains(
      message_of([] { read_text_file("/nonexistent/vapp/missing.txt"); }),
      "cannot open"));
}
