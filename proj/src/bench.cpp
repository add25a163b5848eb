// vapp - block-decomposition augmented Lagrangian solver
// Copyright 2026 vapp contributors
// Licensed under the Apache License, Version 2.0

#include "vapp/bench.hpp"

#include <exception>

#include "vapp/errors.hpp"
#include "vapp/io.hpp"
#include "vapp/solver.hpp"

namespace vapp {
namespace {

struct SuiteCase {
  const char* name;
  const char* config;
};

// Mirrors the problem families exercised by the acceptance suite. Every
// entry must converge under its pinned configuration; keep the tunings in
// sync with the acceptance fixtures when they change.
const SuiteCase kSuite[] = {
    {"qp-d1",
     "problem = qp\nseed = 7\nn = 6\nm = 2\nblocks = 3\nmax_iter = 50000\n"},
    {"dsvm",
     "problem = dsvm\nseed = 3\nn = 30\nfeatures = 8\nmax_iter = 50000\n"},
    {"fused-svm",
     "problem = fused-svm\nseed = 11\nn = 20\nm = 50\nalpha1 = 12\n"
     "alpha2 = 6\ntol_primal = 1e-7\ntol_change = 1e-7\nmax_iter = 20000\n"},
};

BenchEntry run_case(const SuiteCase& suite_case) {
  BenchEntry entry;
  entry.name = suite_case.name;
  try {
    Job job = build_job(RunConfig::parse(suite_case.config));
    RunHooks hooks;
    hooks.measure_time = true;
    const RunResult result = run(job.problem, job.core, job.params, hooks);
    entry.n = job.problem.n();
    entry.m = job.problem.m();
    entry.blocks = job.problem.num_blocks();
    entry.iterations = result.state.k;
    entry.termination = result.reason == Termination::Converged
                            ? "converged"
                            : "iteration-cap";
    entry.objective = result.trace.back().objective;
    entry.primal_res = result.trace.back().primal_res;
    entry.wall_ms = result.wall_ms_total;
    entry.ms_per_iteration =
        result.state.k > 0
            ? result.wall_ms_total / static_cast<double>(result.state.k)
            : 0.0;
  } catch (const std::exception& e) {
    entry.status = e.what();
  }
  return entry;
}

std::string json_escape_simple(const std::string& s) {
  std::string out;
  for (char ch : s) {
    if (ch == '"' || ch == '\\') out += '\\';
    if (ch == '\n') {
      out += "\\n";
      continue;
    }
    out += ch;
  }
  return out;
}

}  // namespace

BenchReport run_bench_suite() {
  BenchReport report;
  for (const SuiteCase& suite_case : kSuite) {
    report.entries.push_back(run_case(suite_case));
  }
  return report;
}

std::string bench_report_json(const BenchReport& report) {
  std::string out = "{\n  \"entries\": [\n";
  for (std::size_t i = 0; i < report.entries.size(); ++i) {
    const BenchEntry& e = report.entries[i];
    out += "    {";
    out += "\"name\": \"" + json_escape_simple(e.name) + "\", ";
    out += "\"status\": \"" + json_escape_simple(e.status) + "\", ";
    out += "\"n\": " + std::to_string(e.n) + ", ";
    out += "\"m\": " + std::to_string(e.m) + ", ";
    out += "\"blocks\": " + std::to_string(e.blocks) + ", ";
    out += "\"iterations\": " + std::to_string(e.iterations) + ", ";
    out += "\"termination\": \"" + json_escape_simple(e.termination) + "\", ";
    out += "\"objective\": " + format_g17(e.objective) + ", ";
    out += "\"primal_res\": " + format_g17(e.primal_res) + ", ";
    out += "\"wall_ms\": " + format_g17(e.wall_ms) + ", ";
    out += "\"ms_per_iteration\": " + format_g17(e.ms_per_iteration);
    out += i + 1 < report.entries.size() ? "},\n" : "}\n";
  }
  out += "  ]\n}\n";
  return out;
}

}  // namespace vapp
