// vapp - block-decomposition augmented Lagrangian solver
// Copyright 2026 vapp contributors
// Licensed under the Apache License, Version 2.0

#include "vapp/vapp.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <new>
#include <optional>
#include <string>

#include "vapp/bench.hpp"
#include "vapp/diagnostics.hpp"
#include "vapp/errors.hpp"
#include "vapp/io.hpp"
#include "vapp/solver.hpp"

namespace {

thread_local std::string g_last_error;

vapp_status map_code(vapp::ErrorCode code) {
  switch (code) {
    case vapp::ErrorCode::InvalidArgument: return VAPP_ERR_INVALID_ARGUMENT;
    case vapp::ErrorCode::Dimension: return VAPP_ERR_DIMENSION;
    case vapp::ErrorCode::Unsupported: return VAPP_ERR_UNSUPPORTED;
    case vapp::ErrorCode::Singular: return VAPP_ERR_SINGULAR;
    case vapp::ErrorCode::Validation: return VAPP_ERR_VALIDATION;
    case vapp::ErrorCode::Parse: return VAPP_ERR_PARSE;
    case vapp::ErrorCode::Io: return VAPP_ERR_IO;
    case vapp::ErrorCode::Numerical: return VAPP_ERR_NUMERICAL;
    case vapp::ErrorCode::NoConvergence: return VAPP_ERR_NO_CONVERGENCE;
    case vapp::ErrorCode::SizeLimit: return VAPP_ERR_SIZE_LIMIT;
    case vapp::ErrorCode::Unavailable: return VAPP_ERR_UNAVAILABLE;
    case vapp::ErrorCode::Internal: return VAPP_ERR_INTERNAL;
  }
  return VAPP_ERR_INTERNAL;
}

vapp_status set_error(vapp_status status, const char* what) {
  g_last_error = what != nullptr ? what : "";
  return status;
}

//! Runs `body` and converts exceptions into status codes.
template <typename Body>
vapp_status guarded(Body&& body) {
  try {
    return body();
  } catch (const vapp::Error& e) {
    return set_error(map_code(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(VAPP_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(VAPP_ERR_INTERNAL, e.what());
  } catch (...) {
    return set_error(VAPP_ERR_INTERNAL, "unknown failure");
  }
}

char* copy_string(const std::string& text) {
  char* out = static_cast<char*>(std::malloc(text.size() + 1));
  if (out == nullptr) return nullptr;
  std::memcpy(out, text.c_str(), text.size() + 1);
  return out;
}

vapp_status export_string(const std::string& text, char** out) {
  *out = copy_string(text);
  if (*out == nullptr) return set_error(VAPP_ERR_INTERNAL, "out of memory");
  return VAPP_OK;
}

}  // namespace

struct vapp_config {
  vapp::RunConfig config;
};

struct vapp_job {
  vapp::Job job;
  vapp::ParamReport report;
  std::optional<vapp::SaddleReference> saddle;
  std::optional<vapp::RunResult> result;
};

extern "C" {

const char* vapp_version(void) { return "1.0.0"; }

const char* vapp_status_name(vapp_status status) {
  switch (status) {
    case VAPP_OK: return "ok";
    case VAPP_ERR_INVALID_ARGUMENT: return "invalid-argument";
    case VAPP_ERR_DIMENSION: return "dimension";
    case VAPP_ERR_UNSUPPORTED: return "unsupported";
    case VAPP_ERR_SINGULAR: return "singular";
    case VAPP_ERR_VALIDATION: return "validation";
    case VAPP_ERR_PARSE: return "parse";
    case VAPP_ERR_IO: return "io";
    case VAPP_ERR_NUMERICAL: return "numerical";
    case VAPP_ERR_NO_CONVERGENCE: return "no-convergence";
    case VAPP_ERR_SIZE_LIMIT: return "size-limit";
    case VAPP_ERR_UNAVAILABLE: return "unavailable";
    case VAPP_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* vapp_last_error(void) { return g_last_error.c_str(); }

vapp_config* vapp_config_new(void) {
  return new (std::nothrow) vapp_config();
}

void vapp_config_free(vapp_config* config) { delete config; }

vapp_status vapp_config_load_file(vapp_config* config, const char* path) {
  if (config == nullptr || path == nullptr) {
    return set_error(VAPP_ERR_INVALID_ARGUMENT, "null argument");
  }
  return guarded([&] {
    config->config = vapp::RunConfig::load(path);
    return VAPP_OK;
  });
}

vapp_status vapp_config_load_text(vapp_config* config, const char* text) {
  if (config == nullptr || text == nullptr) {
    return set_error(VAPP_ERR_INVALID_ARGUMENT, "null argument");
  }
  return guarded([&] {
    config->config = vapp::RunConfig::parse(text);
    return VAPP_OK;
  });
}

vapp_status vapp_config_set(vapp_config* config, const char* key,
                            const char* value) {
  if (config == nullptr || key == nullptr || value == nullptr) {
    return set_error(VAPP_ERR_INVALID_ARGUMENT, "null argument");
  }
  return guarded([&] {
    config->config.apply_override(key, value);
    return VAPP_OK;
  });
}

vapp_status vapp_config_get(const vapp_config* config, const char* key,
                            char** out_value) {
  if (config == nullptr || key == nullptr || out_value == nullptr) {
    return set_error(VAPP_ERR_INVALID_ARGUMENT, "null argument");
  }
  return guarded([&]() -> vapp_status {
    const vapp::RunConfig& c = config->config;
    const std::string k = key;
    std::string value;
    if (k == "problem") value = c.problem;
    else if (k == "variant") value = c.variant;
    else if (k == "data") value = c.data;
    else if (k == "seed") value = std::to_string(c.seed);
    else if (k == "n") value = std::to_string(c.n);
    else if (k == "m") value = std::to_string(c.m);
    else if (k == "features") value = std::to_string(c.features);
    else if (k == "sparsity") value = vapp::format_g17(c.sparsity);
    else if (k == "blocks") value = std::to_string(c.blocks);
    else if (k == "epsilon") value = vapp::format_g17(c.epsilon);
    else if (k == "gamma") value = vapp::format_g17(c.gamma);
    else if (k == "rho") value = vapp::format_g17(c.rho);
    else if (k == "delta") value = vapp::format_g17(c.delta);
    else if (k == "theta") value = vapp::format_g17(c.theta);
    else if (k == "alpha") value = vapp::format_g17(c.alpha);
    else if (k == "alpha1") value = vapp::format_g17(c.alpha1);
    else if (k == "alpha2") value = vapp::format_g17(c.alpha2);
    else if (k == "lambda") value = vapp::format_g17(c.lambda);
    else if (k == "lambda1") value = vapp::format_g17(c.lambda1);
    else if (k == "lambda2") value = vapp::format_g17(c.lambda2);
    else if (k == "c") value = vapp::format_g17(c.c);
    else if (k == "tol_primal") value = vapp::format_g17(c.tol_primal);
    else if (k == "tol_change") value = vapp::format_g17(c.tol_change);
    else if (k == "max_iter") value = std::to_string(c.max_iter);
    else if (k == "workers") value = std::to_string(c.workers);
    else if (k == "schedule") value = c.schedule;
    else if (k == "trace_csv") value = c.trace_csv;
    else if (k == "summary_json") value = c.summary_json;
    else if (k == "timing") value = c.timing ? "true" : "false";
    else if (k == "allow_unsafe") value = c.allow_unsafe ? "true" : "false";
    else {
      return set_error(VAPP_ERR_INVALID_ARGUMENT,
                       ("unknown key '" + k + "'").c_str());
    }
    return export_string(value, out_value);
  });
}

vapp_status vapp_job_new(const vapp_config* config, vapp_job** out_job) {
  if (config == nullptr || out_job == nullptr) {
    return set_error(VAPP_ERR_INVALID_ARGUMENT, "null argument");
  }
  *out_job = nullptr;
  return guarded([&] {
    vapp::require(config->config.has("problem"), vapp::ErrorCode::Validation,
                  "configuration has no 'problem' key");
    vapp::Job built = vapp::build_job(config->config);
    vapp::ParamReport report =
        vapp::validate_parameters(built.problem, built.core, built.params);
    auto* job = new vapp_job{std::move(built), std::move(report), {}, {}};
    // A saddle reference enables the merit column when the problem is small
    // enough for the exact reference solver; its absence is not an error.
    try {
      vapp::SaddleReference ref = vapp::reference_saddle(job->job.problem);
      if (!ref.degenerate) job->saddle = std::move(ref);
    } catch (const vapp::Error&) {
    }
    *out_job = job;
    return VAPP_OK;
  });
}

void vapp_job_free(vapp_job* job) { delete job; }

vapp_status vapp_job_dims(const vapp_job* job, int* out_n, int* out_m,
                          int* out_blocks) {
  if (job == nullptr) return set_error(VAPP_ERR_INVALID_ARGUMENT, "null job");
  if (out_n != nullptr) *out_n = job->job.problem.n();
  if (out_m != nullptr) *out_m = job->job.problem.m();
  if (out_blocks != nullptr) *out_blocks = job->job.problem.num_blocks();
  return VAPP_OK;
}

vapp_status vapp_job_validate(const vapp_job* job, char** out_json) {
  if (job == nullptr || out_json == nullptr) {
    return set_error(VAPP_ERR_INVALID_ARGUMENT, "null argument");
  }
  return guarded([&] {
    return export_string(vapp::validation_json(job->job, job->report),
                         out_json);
  });
}

vapp_status vapp_job_run(vapp_job* job) {
  if (job == nullptr) return set_error(VAPP_ERR_INVALID_ARGUMENT, "null job");
  return guarded([&]() -> vapp_status {
    vapp::RunHooks hooks;
    hooks.measure_time = job->job.timing;
    if (job->saddle.has_value()) hooks.saddle = &job->saddle.value();
    job->result = vapp::run(job->job.problem, job->job.core, job->job.params,
                            hooks);
    if (job->result->reason == vapp::Termination::IterationCap) {
      return set_error(VAPP_ERR_NO_CONVERGENCE,
                       "iteration cap reached before the tolerances");
    }
    return VAPP_OK;
  });
}

long vapp_job_iterations(const vapp_job* job) {
  if (job == nullptr || !job->result.has_value()) return -1;
  return job->result->state.k;
}

vapp_status vapp_job_solution(const vapp_job* job, double* out_u,
                              size_t u_len, double* out_p, size_t p_len) {
  if (job == nullptr) return set_error(VAPP_ERR_INVALID_ARGUMENT, "null job");
  if (!job->result.has_value()) {
    return set_error(VAPP_ERR_UNAVAILABLE, "no result; run the job first");
  }
  const vapp::IterateState& state = job->result->state;
  if (out_u != nullptr) {
    if (u_len != static_cast<size_t>(state.u.size())) {
      return set_error(VAPP_ERR_DIMENSION, "u buffer length mismatch");
    }
    std::memcpy(out_u, state.u.data(), u_len * sizeof(double));
  }
  if (out_p != nullptr) {
    if (p_len != static_cast<size_t>(state.p.size())) {
      return set_error(VAPP_ERR_DIMENSION, "p buffer length mismatch");
    }
    std::memcpy(out_p, state.p.data(), p_len * sizeof(double));
  }
  return VAPP_OK;
}

vapp_status vapp_job_summary(const vapp_job* job, char** out_json) {
  if (job == nullptr || out_json == nullptr) {
    return set_error(VAPP_ERR_INVALID_ARGUMENT, "null argument");
  }
  if (!job->result.has_value()) {
    return set_error(VAPP_ERR_UNAVAILABLE, "no result; run the job first");
  }
  return guarded([&] {
    return export_string(
        vapp::summary_json(job->job, job->report, job->result.value()),
        out_json);
  });
}

vapp_status vapp_job_trace_csv(const vapp_job* job, char** out_csv) {
  if (job == nullptr || out_csv == nullptr) {
    return set_error(VAPP_ERR_INVALID_ARGUMENT, "null argument");
  }
  if (!job->result.has_value()) {
    return set_error(VAPP_ERR_UNAVAILABLE, "no result; run the job first");
  }
  return guarded([&] {
    return export_string(vapp::format_trace_csv(job->result->trace), out_csv);
  });
}

vapp_status vapp_job_write_outputs(const vapp_job* job) {
  if (job == nullptr) return set_error(VAPP_ERR_INVALID_ARGUMENT, "null job");
  if (!job->result.has_value()) {
    return set_error(VAPP_ERR_UNAVAILABLE, "no result; run the job first");
  }
  return guarded([&] {
    if (!job->job.trace_csv.empty()) {
      vapp::write_trace_csv(job->job.trace_csv, job->result->trace);
    }
    if (!job->job.summary_json.empty()) {
      vapp::write_text_file(
          job->job.summary_json,
          vapp::summary_json(job->job, job->report, job->result.value()));
    }
    return VAPP_OK;
  });
}

void vapp_string_free(char* text) { std::free(text); }

vapp_status vapp_generate_dataset(const char* kind, unsigned long long seed,
                                  int n, int m, double sparsity, int blocks,
                                  const char* path) {
  if (kind == nullptr || path == nullptr) {
    return set_error(VAPP_ERR_INVALID_ARGUMENT, "null argument");
  }
  return guarded([&]() -> vapp_status {
    const std::string kind_str = kind;
    if (kind_str == "qp") {
      vapp::write_qp_file(path, vapp::generate_qp(seed, n, m, blocks));
      return VAPP_OK;
    }
    if (kind_str == "classification" || kind_str == "fused-svm" ||
        kind_str == "logistic" || kind_str == "dsvm") {
      vapp::write_libsvm(path,
                         vapp::generate_classification(seed, n, m, sparsity));
      return VAPP_OK;
    }
    return set_error(VAPP_ERR_INVALID_ARGUMENT,
                     ("unknown dataset kind '" + kind_str + "'").c_str());
  });
}

vapp_status vapp_bench_json(char** out_json) {
  if (out_json == nullptr) {
    return set_error(VAPP_ERR_INVALID_ARGUMENT, "null argument");
  }
  return guarded([&] {
    return export_string(vapp::bench_report_json(vapp::run_bench_suite()),
                         out_json);
  });
}

}  // extern "C"
