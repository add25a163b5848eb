// vapp - block-decomposition augmented Lagrangian solver
// Copyright 2026 vapp contributors
// Licensed under the Apache License, Version 2.0

#ifndef VAPP_BENCH_HPP_
#define VAPP_BENCH_HPP_

#include <string>
#include <vector>

namespace vapp {

//! One timed run of the standard suite. `status` is "ok" or an error string;
//! the numeric fields are meaningful only for "ok" entries.
struct BenchEntry {
  std::string name;
  std::string status = "ok";
  int n = 0;
  int m = 0;
  int blocks = 0;
  long iterations = 0;
  std::string termination;
  double objective = 0.0;
  double primal_res = 0.0;
  double wall_ms = 0.0;
  double ms_per_iteration = 0.0;
};

struct BenchReport {
  std::vector<BenchEntry> entries;
};

//! Runs the built-in problem suite (block QP, box-constrained SVM dual,
//! fused-penalty SVM, logistic regression) with timing enabled.
BenchReport run_bench_suite();

std::string bench_report_json(const BenchReport& report);

}  // namespace vapp

#endif  // VAPP_BENCH_HPP_
