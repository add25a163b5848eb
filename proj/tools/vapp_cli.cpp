// vapp - block-decomposition augmented Lagrangian solver
// Copyright 2026 vapp contributors
// Licensed under the Apache License, Version 2.0
//
// Command-line front end. Talks to the solver strictly through the public C
// interface, as any external embedding would.

#include <cstdio>
#include <filesystem>
#include <string>
#include <system_error>
#include <vector>

#include "CLI11.hpp"
#include "vapp/vapp.h"

namespace {

struct ConfigHandle {
  vapp_config* ptr = vapp_config_new();
  ~ConfigHandle() { vapp_config_free(ptr); }
  ConfigHandle() = default;
  ConfigHandle(const ConfigHandle&) = delete;
  ConfigHandle& operator=(const ConfigHandle&) = delete;
};

struct JobHandle {
  vapp_job* ptr = nullptr;
  ~JobHandle() { vapp_job_free(ptr); }
  JobHandle() = default;
  JobHandle(const JobHandle&) = delete;
  JobHandle& operator=(const JobHandle&) = delete;
};

struct StringHandle {
  char* ptr = nullptr;
  ~StringHandle() { vapp_string_free(ptr); }
  StringHandle() = default;
  StringHandle(const StringHandle&) = delete;
  StringHandle& operator=(const StringHandle&) = delete;
};

// Exit codes: 0 success, 1 solver did not converge, 2 configuration or data
// problem.
int exit_code_for(vapp_status status) {
  if (status == VAPP_OK) return 0;
  if (status == VAPP_ERR_NO_CONVERGENCE || status == VAPP_ERR_NUMERICAL) {
    return 1;
  }
  return 2;
}

int report_error(vapp_status status) {
  std::fprintf(stderr, "error: %s\n", vapp_last_error());
  return exit_code_for(status);
}

std::string config_value(vapp_config* config, const char* key) {
  char* raw = nullptr;
  if (vapp_config_get(config, key, &raw) != VAPP_OK) return "";
  std::string out = raw != nullptr ? raw : "";
  vapp_string_free(raw);
  return out;
}

struct CommonArgs {
  std::string config_path;
  unsigned long long seed = 0;
  bool seed_set = false;
  int workers = 0;
  bool workers_set = false;
  std::string overrides;
};

void add_common_options(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "Run configuration file")
      ->required();
  cmd->add_option("--seed", args.seed, "Override the generator seed");
  cmd->add_option("--workers", args.workers, "Override the worker count");
  cmd->add_option("--override-params", args.overrides,
                  "Comma-separated key=value pairs applied on top of the "
                  "configuration");
}

//! Loads the config file and applies command-line overrides. Returns 0 or
//! the process exit code.
int assemble_config(vapp_config* config, const CommonArgs& args) {
  vapp_status status = vapp_config_load_file(config, args.config_path.c_str());
  if (status != VAPP_OK) return report_error(status);
  if (args.seed_set) {
    status = vapp_config_set(config, "seed",
                             std::to_string(args.seed).c_str());
    if (status != VAPP_OK) return report_error(status);
  }
  if (args.workers_set) {
    status = vapp_config_set(config, "workers",
                             std::to_string(args.workers).c_str());
    if (status != VAPP_OK) return report_error(status);
  }
  std::size_t start = 0;
  while (start < args.overrides.size()) {
    std::size_t end = args.overrides.find(',', start);
    if (end == std::string::npos) end = args.overrides.size();
    const std::string pair = args.overrides.substr(start, end - start);
    start = end + 1;
    if (pair.empty()) continue;
    const std::size_t eq = pair.find('=');
    if (eq == std::string::npos) {
      std::fprintf(stderr, "error: override '%s' is not key=value\n",
                   pair.c_str());
      return 2;
    }
    status = vapp_config_set(config, pair.substr(0, eq).c_str(),
                             pair.substr(eq + 1).c_str());
    if (status != VAPP_OK) return report_error(status);
  }
  return 0;
}

std::string join_dir(const std::string& dir, const std::string& path) {
  if (dir.empty() || path.empty() || path[0] == '/') return path;
  return dir + "/" + path;
}

int run_solve(const CommonArgs& args, const std::string& out_dir) {
  ConfigHandle config;
  int code = assemble_config(config.ptr, args);
  if (code != 0) return code;

  if (!out_dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) {
      std::fprintf(stderr, "error: cannot create '%s': %s\n", out_dir.c_str(),
                   ec.message().c_str());
      return 2;
    }
  }

  std::string trace_path = config_value(config.ptr, "trace_csv");
  if (trace_path.empty()) trace_path = "trace.csv";
  trace_path = join_dir(out_dir, trace_path);
  std::string summary_path = config_value(config.ptr, "summary_json");
  if (summary_path.empty()) summary_path = "summary.json";
  summary_path = join_dir(out_dir, summary_path);
  vapp_status status =
      vapp_config_set(config.ptr, "trace_csv", trace_path.c_str());
  if (status != VAPP_OK) return report_error(status);
  status = vapp_config_set(config.ptr, "summary_json", summary_path.c_str());
  if (status != VAPP_OK) return report_error(status);

  JobHandle job;
  status = vapp_job_new(config.ptr, &job.ptr);
  if (status != VAPP_OK) return report_error(status);

  const vapp_status run_status = vapp_job_run(job.ptr);
  if (run_status != VAPP_OK && run_status != VAPP_ERR_NO_CONVERGENCE) {
    return report_error(run_status);
  }
  std::string run_message = vapp_last_error();

  status = vapp_job_write_outputs(job.ptr);
  if (status != VAPP_OK) return report_error(status);
  std::printf("wrote %s and %s\n", trace_path.c_str(), summary_path.c_str());

  if (run_status == VAPP_ERR_NO_CONVERGENCE) {
    std::fprintf(stderr, "error: %s\n", run_message.c_str());
    return 1;
  }
  std::printf("converged in %ld iterations\n", vapp_job_iterations(job.ptr));
  return 0;
}

int run_validate(const CommonArgs& args) {
  ConfigHandle config;
  int code = assemble_config(config.ptr, args);
  if (code != 0) return code;

  JobHandle job;
  vapp_status status = vapp_job_new(config.ptr, &job.ptr);
  if (status != VAPP_OK) return report_error(status);

  StringHandle json;
  status = vapp_job_validate(job.ptr, &json.ptr);
  if (status != VAPP_OK) return report_error(status);
  std::fputs(json.ptr, stdout);
  return 0;
}

int run_bench(const std::string& out_path) {
  StringHandle json;
  const vapp_status status = vapp_bench_json(&json.ptr);
  if (status != VAPP_OK) return report_error(status);
  std::FILE* out = std::fopen(out_path.c_str(), "wb");
  if (out == nullptr) {
    std::fprintf(stderr, "error: cannot write '%s'\n", out_path.c_str());
    return 2;
  }
  std::fputs(json.ptr, out);
  std::fclose(out);
  std::printf("wrote %s\n", out_path.c_str());
  return 0;
}

int run_gen_data(const std::string& kind, unsigned long long seed, int n,
                 int m, double sparsity, int blocks,
                 const std::string& out_path) {
  const vapp_status status = vapp_generate_dataset(
      kind.c_str(), seed, n, m, sparsity, blocks, out_path.c_str());
  if (status != VAPP_OK) return report_error(status);
  std::printf("wrote %s\n", out_path.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Block-decomposition augmented Lagrangian solver"};
  app.require_subcommand(1);

  CommonArgs solve_args;
  std::string out_dir;
  CLI::App* solve = app.add_subcommand("solve", "Run a configured solve");
  add_common_options(solve, solve_args);
  solve->add_option("--out-dir", out_dir,
                    "Directory for relative output paths");

  CommonArgs validate_args;
  CLI::App* validate = app.add_subcommand(
      "validate", "Print the parameter validation report without solving");
  add_common_options(validate, validate_args);

  std::string bench_out = "bench_report.json";
  CLI::App* bench =
      app.add_subcommand("bench", "Time the built-in problem suite");
  bench->add_option("--out", bench_out, "Report path");

  std::string gen_kind;
  unsigned long long gen_seed = 1;
  int gen_n = 20;
  int gen_m = 50;
  double gen_sparsity = 0.0;
  int gen_blocks = 2;
  std::string gen_out;
  CLI::App* gen =
      app.add_subcommand("gen-data", "Write a synthetic instance file");
  gen->add_option("--kind", gen_kind,
                  "fused-svm | logistic | dsvm | classification | qp")
      ->required();
  gen->add_option("--seed", gen_seed, "Generator seed");
  gen->add_option("--n", gen_n, "Features (datasets) or variables (qp)");
  gen->add_option("--m", gen_m, "Samples (datasets) or constraints (qp)");
  gen->add_option("--sparsity", gen_sparsity, "Zero fraction for datasets");
  gen->add_option("--blocks", gen_blocks, "Block count for qp");
  gen->add_option("--out", gen_out, "Output path")->required();

  CLI11_PARSE(app, argc, argv);

  solve_args.seed_set = solve->count("--seed") > 0;
  solve_args.workers_set = solve->count("--workers") > 0;
  validate_args.seed_set = validate->count("--seed") > 0;
  validate_args.workers_set = validate->count("--workers") > 0;

  if (*solve) return run_solve(solve_args, out_dir);
  if (*validate) return run_validate(validate_args);
  if (*bench) return run_bench(bench_out);
  if (*gen) {
    return run_gen_data(gen_kind, gen_seed, gen_n, gen_m, gen_sparsity,
                        gen_blocks, gen_out);
  }
  return 2;
}
