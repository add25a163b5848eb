// vapp - block-decomposition augmented Lagrangian solver
// Copyright 2026 vapp contributors
// Licensed under the Apache License, Version 2.0

#include "vapp/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <utility>

#include "vapp/diagnostics.hpp"
#include "vapp/errors.hpp"

namespace vapp {
namespace {

std::string trim(const std::string& s) {
  std::size_t lo = 0, hi = s.size();
  while (lo < hi && std::isspace(static_cast<unsigned char>(s[lo]))) ++lo;
  while (hi > lo && std::isspace(static_cast<unsigned char>(s[hi - 1]))) --hi;
  return s.substr(lo, hi - lo);
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) {
      if (start < text.size()) lines.push_back(text.substr(start));
      break;
    }
    std::string line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
    start = end + 1;
  }
  return lines;
}

[[noreturn]] void parse_fail(long line, const std::string& what) {
  fail(ErrorCode::Parse, "line " + std::to_string(line) + ": " + what);
}

double parse_double_strict(const std::string& token, long line) {
  if (token.empty()) parse_fail(line, "empty number");
  char* end = nullptr;
  const double v = std::strtod(token.c_str(), &end);
  if (end != token.c_str() + token.size()) {
    parse_fail(line, "bad number '" + token + "'");
  }
  return v;
}

long parse_long_strict(const std::string& token, long line) {
  if (token.empty()) parse_fail(line, "empty integer");
  char* end = nullptr;
  const long v = std::strtol(token.c_str(), &end, 10);
  if (end != token.c_str() + token.size()) {
    parse_fail(line, "bad integer '" + token + "'");
  }
  return v;
}

std::vector<std::string> split_fields(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t end = line.find(sep, start);
    if (end == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, end - start));
    start = end + 1;
  }
  return out;
}

std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (char ch : s) {
    switch (ch) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(ch) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", ch);
          out += buf;
        } else {
          out += ch;
        }
    }
  }
  return out;
}

//! JSON number: finite values in full precision, anything else null.
std::string json_number(double v) {
  if (!std::isfinite(v)) return "null";
  return format_g17(v);
}

std::string json_bool(bool v) { return v ? "true" : "false"; }

}  // namespace

// ---------------------------------------------------------------------------
// Datasets
// ---------------------------------------------------------------------------

Dataset parse_libsvm(const std::string& text) {
  struct Entry {
    int index;
    double value;
  };
  std::vector<std::vector<Entry>> samples;
  std::vector<double> labels;
  int dim = 0;

  const std::vector<std::string> lines = split_lines(text);
  for (std::size_t li = 0; li < lines.size(); ++li) {
    const long line_no = static_cast<long>(li) + 1;
    const std::string line = trim(lines[li]);
    if (line.empty() || line[0] == '#') continue;

    std::istringstream words(line);
    std::string token;
    require(static_cast<bool>(words >> token), ErrorCode::Parse, "empty line");
    labels.push_back(parse_double_strict(token, line_no));

    std::vector<Entry> entries;
    int prev_index = 0;
    while (words >> token) {
      const std::size_t colon = token.find(':');
      if (colon == std::string::npos) {
        parse_fail(line_no, "expected index:value, got '" + token + "'");
      }
      const long idx = parse_long_strict(token.substr(0, colon), line_no);
      if (idx < 1) parse_fail(line_no, "feature indices are 1-based");
      if (idx <= prev_index) {
        parse_fail(line_no, "feature indices must be strictly increasing");
      }
      const double value =
          parse_double_strict(token.substr(colon + 1), line_no);
      entries.push_back({static_cast<int>(idx), value});
      prev_index = static_cast<int>(idx);
      dim = std::max(dim, static_cast<int>(idx));
    }
    samples.push_back(std::move(entries));
  }
  require(!samples.empty(), ErrorCode::Parse, "no samples in input");

  Dataset data;
  const int m = static_cast<int>(samples.size());
  data.features = MatrixXd::Zero(dim, m);
  data.labels = VectorXd::Zero(m);
  for (int j = 0; j < m; ++j) {
    data.labels[j] = labels[j];
    for (const Entry& e : samples[j]) data.features(e.index - 1, j) = e.value;
  }
  return data;
}

Dataset read_libsvm(const std::string& path) {
  return parse_libsvm(read_text_file(path));
}

std::string format_libsvm(const Dataset& data) {
  require(data.features.cols() == data.labels.size(), ErrorCode::Dimension,
          "labels must match the sample count");
  std::string out;
  for (int j = 0; j < data.features.cols(); ++j) {
    out += format_g17(data.labels[j]);
    for (int i = 0; i < data.features.rows(); ++i) {
      const double v = data.features(i, j);
      if (v != 0.0) {
        out += ' ';
        out += std::to_string(i + 1);
        out += ':';
        out += format_g17(v);
      }
    }
    out += '\n';
  }
  return out;
}

void write_libsvm(const std::string& path, const Dataset& data) {
  write_text_file(path, format_libsvm(data));
}

Dataset generate_classification(std::uint64_t seed, int n_features,
                                int n_samples, double sparsity) {
  require(n_features >= 1 && n_samples >= 1, ErrorCode::InvalidArgument,
          "generator needs positive sizes");
  require(sparsity >= 0.0 && sparsity < 1.0, ErrorCode::InvalidArgument,
          "sparsity must be in [0, 1)");
  Rng rng(seed);
  const VectorXd plane = rng.normal_vector(n_features);
  Dataset data;
  data.features = MatrixXd::Zero(n_features, n_samples);
  data.labels = VectorXd::Zero(n_samples);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n_features));
  for (int j = 0; j < n_samples; ++j) {
    for (int i = 0; i < n_features; ++i) {
      if (rng.uniform() >= sparsity) data.features(i, j) = rng.normal();
    }
    const double score =
        scale * plane.dot(data.features.col(j)) + 0.1 * rng.normal();
    data.labels[j] = score >= 0.0 ? 1.0 : -1.0;
  }
  return data;
}

QpInstance generate_qp(std::uint64_t seed, int n, int m, int num_blocks) {
  require(n >= 1 && m >= 1, ErrorCode::InvalidArgument,
          "generator needs positive sizes");
  require(num_blocks >= 1 && num_blocks <= n, ErrorCode::InvalidArgument,
          "block count must be between 1 and n");
  Rng rng(seed);
  const MatrixXd s = rng.normal_matrix(n, n);
  QpInstance inst;
  inst.q = (s.transpose() * s) / static_cast<double>(n) +
           0.5 * MatrixXd::Identity(n, n);
  inst.c = rng.normal_vector(n);
  inst.a = rng.normal_matrix(m, n);
  inst.b = inst.a * rng.normal_vector(n);
  const int base = n / num_blocks;
  const int extra = n % num_blocks;
  for (int i = 0; i < num_blocks; ++i) {
    inst.block_sizes.push_back(base + (i < extra ? 1 : 0));
    inst.sets.push_back(ConstraintSet::all_space());
  }
  return inst;
}

namespace {

//! Reads `count` doubles from the rest of `stream`, requiring exhaustion.
std::vector<double> read_doubles(std::istringstream& stream, long count,
                                 long line_no) {
  std::vector<double> values;
  values.reserve(count);
  std::string token;
  while (stream >> token) values.push_back(parse_double_strict(token, line_no));
  if (static_cast<long>(values.size()) != count) {
    parse_fail(line_no, "expected " + std::to_string(count) + " numbers, got " +
                            std::to_string(values.size()));
  }
  return values;
}

//! The next content line, skipping blanks and comments.
bool next_content_line(const std::vector<std::string>& lines, std::size_t& li,
                       std::string& line, long& line_no) {
  while (li < lines.size()) {
    const std::string candidate = trim(lines[li]);
    line_no = static_cast<long>(li) + 1;
    ++li;
    if (!candidate.empty() && candidate[0] != '#') {
      line = candidate;
      return true;
    }
  }
  return false;
}

//! One "<key> <numbers...>" line in mandatory order.
std::vector<double> expect_numbers_line(const std::vector<std::string>& lines,
                                        std::size_t& li, const char* key,
                                        long count) {
  std::string line;
  long line_no = 0;
  if (!next_content_line(lines, li, line, line_no)) {
    fail(ErrorCode::Parse, std::string("unexpected end of file, expected '") +
                               key + "' line");
  }
  std::istringstream stream(line);
  std::string head;
  stream >> head;
  if (head != key) {
    parse_fail(line_no, std::string("expected '") + key + "', got '" + head +
                            "'");
  }
  return read_doubles(stream, count, line_no);
}

MatrixXd row_major(const std::vector<double>& values, int rows, int cols) {
  MatrixXd out(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) out(i, j) = values[i * cols + j];
  }
  return out;
}

}  // namespace

QpInstance parse_qp_text(const std::string& text) {
  const std::vector<std::string> lines = split_lines(text);
  std::size_t li = 0;
  std::string line;
  long line_no = 0;

  require(next_content_line(lines, li, line, line_no), ErrorCode::Parse,
          "empty input");
  if (line != "vapp-qp 1") parse_fail(line_no, "expected header 'vapp-qp 1'");

  const std::vector<double> n_vals = expect_numbers_line(lines, li, "n", 1);
  const int n = static_cast<int>(n_vals[0]);
  require(n >= 1 && n_vals[0] == n, ErrorCode::Parse, "n must be a positive integer");
  const std::vector<double> m_vals = expect_numbers_line(lines, li, "m", 1);
  const int m = static_cast<int>(m_vals[0]);
  require(m >= 1 && m_vals[0] == m, ErrorCode::Parse, "m must be a positive integer");

  // The blocks line has a variable count; parse it by hand.
  require(next_content_line(lines, li, line, line_no), ErrorCode::Parse,
          "unexpected end of file, expected 'blocks' line");
  std::istringstream blocks_stream(line);
  std::string head;
  blocks_stream >> head;
  if (head != "blocks") parse_fail(line_no, "expected 'blocks'");
  QpInstance inst;
  std::string token;
  long total = 0;
  while (blocks_stream >> token) {
    const long size = parse_long_strict(token, line_no);
    if (size < 1) parse_fail(line_no, "block sizes must be positive");
    inst.block_sizes.push_back(static_cast<int>(size));
    total += size;
  }
  if (inst.block_sizes.empty()) parse_fail(line_no, "no block sizes");
  if (total != n) parse_fail(line_no, "block sizes must sum to n");

  inst.q = row_major(expect_numbers_line(lines, li, "q", 1L * n * n), n, n);
  const std::vector<double> c_vals = expect_numbers_line(lines, li, "c", n);
  inst.c = Eigen::Map<const VectorXd>(c_vals.data(), n);
  inst.a = row_major(expect_numbers_line(lines, li, "a", 1L * m * n), m, n);
  const std::vector<double> b_vals = expect_numbers_line(lines, li, "b", m);
  inst.b = Eigen::Map<const VectorXd>(b_vals.data(), m);

  inst.sets.assign(inst.block_sizes.size(), ConstraintSet::all_space());
  while (next_content_line(lines, li, line, line_no)) {
    std::istringstream set_stream(line);
    std::string kind;
    set_stream >> head;
    if (head != "set") parse_fail(line_no, "expected 'set', got '" + head + "'");
    long index = -1;
    if (!(set_stream >> index) || index < 0 ||
        index >= static_cast<long>(inst.block_sizes.size())) {
      parse_fail(line_no, "bad block index on set line");
    }
    if (!(set_stream >> kind)) parse_fail(line_no, "missing set kind");
    const int width = inst.block_sizes[index];
    if (kind == "all") {
      inst.sets[index] = ConstraintSet::all_space();
      std::string rest;
      if (set_stream >> rest) parse_fail(line_no, "trailing tokens on set line");
    } else if (kind == "orthant") {
      inst.sets[index] = ConstraintSet::orthant();
      std::string rest;
      if (set_stream >> rest) parse_fail(line_no, "trailing tokens on set line");
    } else if (kind == "box") {
      const std::vector<double> bounds =
          read_doubles(set_stream, 2L * width, line_no);
      inst.sets[index] =
          ConstraintSet::box(Eigen::Map<const VectorXd>(bounds.data(), width),
                             Eigen::Map<const VectorXd>(bounds.data() + width,
                                                        width));
    } else {
      parse_fail(line_no, "unknown set kind '" + kind + "'");
    }
  }
  return inst;
}

QpInstance read_qp_file(const std::string& path) {
  return parse_qp_text(read_text_file(path));
}

std::string format_qp_text(const QpInstance& inst) {
  const int n = static_cast<int>(inst.q.rows());
  const int m = static_cast<int>(inst.a.rows());
  require(inst.q.cols() == n && inst.a.cols() == n &&
              inst.c.size() == n && inst.b.size() == m,
          ErrorCode::Dimension, "inconsistent instance shapes");
  require(inst.sets.size() == inst.block_sizes.size(), ErrorCode::Dimension,
          "one set per block required");
  std::string out = "vapp-qp 1\n";
  out += "n " + std::to_string(n) + "\n";
  out += "m " + std::to_string(m) + "\n";
  out += "blocks";
  for (int size : inst.block_sizes) out += " " + std::to_string(size);
  out += "\n";
  auto append_matrix = [&out](const char* key, const MatrixXd& mat) {
    out += key;
    for (int i = 0; i < mat.rows(); ++i) {
      for (int j = 0; j < mat.cols(); ++j) out += " " + format_g17(mat(i, j));
    }
    out += "\n";
  };
  append_matrix("q", inst.q);
  append_matrix("c", inst.c.transpose());
  append_matrix("a", inst.a);
  append_matrix("b", inst.b.transpose());
  for (std::size_t i = 0; i < inst.sets.size(); ++i) {
    const ConstraintSet& set = inst.sets[i];
    out += "set " + std::to_string(i);
    if (set.kind() == ConstraintSet::Kind::AllSpace) {
      out += " all";
    } else if (set.kind() == ConstraintSet::Kind::Orthant) {
      out += " orthant";
    } else {
      out += " box";
      for (int j = 0; j < set.lo().size(); ++j) {
        out += " " + format_g17(set.lo()[j]);
      }
      for (int j = 0; j < set.hi().size(); ++j) {
        out += " " + format_g17(set.hi()[j]);
      }
    }
    out += "\n";
  }
  return out;
}

void write_qp_file(const std::string& path, const QpInstance& inst) {
  write_text_file(path, format_qp_text(inst));
}

DsvmInstance dsvm_instance_from_data(const Dataset& data, double box_c,
                                     double ridge) {
  const int n = static_cast<int>(data.labels.size());
  require(n >= 1, ErrorCode::InvalidArgument, "dataset is empty");
  require(data.features.cols() == n, ErrorCode::Dimension,
          "labels must match the sample count");
  require(ridge >= 0.0, ErrorCode::InvalidArgument,
          "ridge must be nonnegative");
  DsvmInstance inst;
  const MatrixXd scaled = data.features * data.labels.asDiagonal();
  inst.q = scaled.transpose() * scaled + ridge * MatrixXd::Identity(n, n);
  inst.lin = VectorXd::Constant(n, -1.0);
  inst.y = data.labels;
  inst.box_c = box_c;
  return inst;
}

// ---------------------------------------------------------------------------
// Run configuration
// ---------------------------------------------------------------------------

namespace {

//! Applies one key/value pair. `line_no` feeds error messages; overrides use
//! line 0 and are allowed to replace earlier values.
void apply_pair(RunConfig& config, const std::string& key,
                const std::string& value, long line_no, bool is_override) {
  if (key.empty()) parse_fail(line_no, "empty key");
  if (value.empty()) parse_fail(line_no, "empty value for '" + key + "'");
  if (!is_override && config.provided.count(key) > 0) {
    parse_fail(line_no, "duplicate key '" + key + "'");
  }

  auto as_double = [&] { return parse_double_strict(value, line_no); };
  auto as_int = [&] {
    const long v = parse_long_strict(value, line_no);
    if (v < -2147483647L || v > 2147483647L) {
      parse_fail(line_no, "integer out of range");
    }
    return static_cast<int>(v);
  };
  auto as_bool = [&]() -> bool {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    parse_fail(line_no, "expected true or false for '" + key + "'");
  };

  if (key == "problem") {
    std::string kind = value == "generic-qp" ? "qp" : value;
    if (kind != "qp" && kind != "fused-svm" && kind != "logistic" &&
        kind != "dsvm") {
      parse_fail(line_no, "unknown problem '" + value + "'");
    }
    config.problem = kind;
  } else if (key == "variant") {
    if (value != "pjvapp" && value != "ljvapp" && value != "lpvapp" &&
        value != "identity-core" && value != "newton-core") {
      parse_fail(line_no, "unknown variant '" + value + "'");
    }
    config.variant = value;
  } else if (key == "data") {
    config.data = value;
  } else if (key == "seed") {
    char* end = nullptr;
    config.seed = std::strtoull(value.c_str(), &end, 10);
    if (end != value.c_str() + value.size() || value[0] == '-') {
      parse_fail(line_no, "bad seed '" + value + "'");
    }
  } else if (key == "n") {
    config.n = as_int();
  } else if (key == "m") {
    config.m = as_int();
  } else if (key == "features") {
    config.features = as_int();
  } else if (key == "sparsity") {
    config.sparsity = as_double();
  } else if (key == "blocks") {
    config.blocks = as_int();
  } else if (key == "epsilon") {
    config.epsilon = as_double();
  } else if (key == "gamma") {
    config.gamma = as_double();
  } else if (key == "rho") {
    config.rho = as_double();
  } else if (key == "delta") {
    config.delta = as_double();
  } else if (key == "theta") {
    config.theta = as_double();
  } else if (key == "alpha") {
    config.alpha = as_double();
  } else if (key == "alpha1") {
    config.alpha1 = as_double();
  } else if (key == "alpha2") {
    config.alpha2 = as_double();
  } else if (key == "lambda") {
    config.lambda = as_double();
  } else if (key == "lambda1") {
    config.lambda1 = as_double();
  } else if (key == "lambda2") {
    config.lambda2 = as_double();
  } else if (key == "c") {
    config.c = as_double();
  } else if (key == "tol_primal") {
    config.tol_primal = as_double();
  } else if (key == "tol_change") {
    config.tol_change = as_double();
  } else if (key == "max_iter") {
    config.max_iter = parse_long_strict(value, line_no);
  } else if (key == "workers") {
    config.workers = as_int();
  } else if (key == "schedule") {
    if (value != "jacobian" && value != "gauss-seidel") {
      parse_fail(line_no, "unknown schedule '" + value + "'");
    }
    config.schedule = value;
  } else if (key == "trace_csv") {
    config.trace_csv = value;
  } else if (key == "summary_json") {
    config.summary_json = value;
  } else if (key == "timing") {
    config.timing = as_bool();
  } else if (key == "allow_unsafe") {
    config.allow_unsafe = as_bool();
  } else {
    parse_fail(line_no, "unknown key '" + key + "'");
  }
  config.provided.insert(key);
}

}  // namespace

RunConfig RunConfig::parse(const std::string& text) {
  RunConfig config;
  const std::vector<std::string> lines = split_lines(text);
  for (std::size_t li = 0; li < lines.size(); ++li) {
    const long line_no = static_cast<long>(li) + 1;
    std::string line = lines[li];
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) parse_fail(line_no, "expected key = value");
    apply_pair(config, trim(line.substr(0, eq)), trim(line.substr(eq + 1)),
               line_no, false);
  }
  require(config.has("problem"), ErrorCode::Parse,
          "missing required key 'problem'");
  return config;
}

RunConfig RunConfig::load(const std::string& path) {
  return parse(read_text_file(path));
}

void RunConfig::apply_override(const std::string& key,
                               const std::string& value) {
  apply_pair(*this, trim(key), trim(value), 0, true);
}

namespace {

const std::set<std::string>& common_keys() {
  static const std::set<std::string> keys = {
      "problem",    "variant",     "seed",         "epsilon",
      "gamma",      "rho",         "delta",        "tol_primal",
      "tol_change", "max_iter",    "workers",      "schedule",
      "trace_csv",  "summary_json", "timing",      "allow_unsafe"};
  return keys;
}

void check_key_applicability(const RunConfig& config) {
  static const std::map<std::string, std::set<std::string>> extra = {
      {"qp", {"n", "m", "blocks", "theta", "alpha", "data"}},
      {"fused-svm",
       {"n", "m", "sparsity", "lambda1", "lambda2", "alpha1", "alpha2",
        "data"}},
      {"logistic", {"n", "m", "sparsity", "lambda", "data"}},
      {"dsvm", {"n", "features", "sparsity", "c", "data"}},
  };
  const std::set<std::string>& allowed = extra.at(config.problem);
  for (const std::string& key : config.provided) {
    if (common_keys().count(key) == 0 && allowed.count(key) == 0) {
      fail(ErrorCode::Validation, "key '" + key +
                                      "' does not apply to problem '" +
                                      config.problem + "'");
    }
  }
  if (!config.data.empty()) {
    for (const char* gen_key :
         {"n", "m", "features", "sparsity", "seed", "blocks"}) {
      if (config.has(gen_key)) {
        fail(ErrorCode::Validation,
             std::string("both a data path and generator key '") + gen_key +
                 "' were given; use exactly one data source");
      }
    }
  }
}

std::string variant_or_default(const RunConfig& config) {
  if (!config.variant.empty()) return config.variant;
  if (config.problem == "fused-svm") return "pjvapp";
  if (config.problem == "logistic") return "newton-core";
  return "identity-core";
}

[[noreturn]] void reject_variant(const std::string& variant,
                                 const std::string& problem) {
  fail(ErrorCode::Validation, "variant '" + variant +
                                  "' is not available for problem '" +
                                  problem + "'");
}

//! 90% of the step-bound ceiling for the given augmentation strength.
double default_epsilon(const BlockProblem& problem, const BoundCore& core,
                       double gamma) {
  const double lam = spectral_norm_sq(problem.full_a());
  const double denom = problem.coupler().lipschitz_grad + gamma * lam;
  return denom > 0.0 ? 0.9 * core.beta() / denom : 1.0;
}

Job finish_job(const RunConfig& config, const std::string& variant,
               BlockProblem problem, BoundCore core, SolverParams params) {
  if (config.has("epsilon")) params.epsilon = config.epsilon;
  if (config.has("delta")) params.delta = config.delta;
  params.tol_primal = config.tol_primal;
  params.tol_change = config.tol_change;
  params.max_iter = config.max_iter;
  params.worker_count = config.workers;
  params.schedule = config.schedule == "gauss-seidel" ? Schedule::GaussSeidel
                                                      : Schedule::Jacobian;
  params.allow_unsafe = config.allow_unsafe;
  return Job{config.problem,  variant,
             config.trace_csv, config.summary_json,
             config.timing,    std::move(problem),
             std::move(core),  std::move(params)};
}

Dataset dataset_for(const RunConfig& config, int default_n, int default_m) {
  if (!config.data.empty()) return read_libsvm(config.data);
  return generate_classification(config.seed,
                                 config.n > 0 ? config.n : default_n,
                                 config.m > 0 ? config.m : default_m,
                                 config.sparsity);
}

Job build_qp_job(const RunConfig& config, const std::string& variant) {
  QpInstance inst;
  if (!config.data.empty()) {
    inst = read_qp_file(config.data);
  } else {
    inst = generate_qp(config.seed, config.n > 0 ? config.n : 12,
                       config.m > 0 ? config.m : 4, config.blocks);
  }
  BlockProblem problem = build_block_qp(inst.q, inst.c, inst.a, inst.b,
                                        inst.block_sizes, inst.sets);
  SolverParams params;
  params.gamma = config.gamma;
  params.rho = config.rho;

  CoreFunctionSpec spec = CoreFunctionSpec::identity_quadratic(1.0);
  if (variant == "identity-core") {
    // epsilon default set below from the step-bound ceiling.
  } else if (variant == "pjvapp" || variant == "ljvapp" ||
             variant == "lpvapp") {
    double theta = config.theta != 0.0 ? config.theta : config.gamma;
    double alpha = config.alpha;
    if (variant == "pjvapp") {
      require(theta > 0.0 && alpha > 0.0, ErrorCode::Validation,
              "variant 'pjvapp' needs positive theta and alpha");
    } else if (variant == "ljvapp") {
      require(!config.has("alpha"), ErrorCode::Validation,
              "variant 'ljvapp' fixes alpha = 0");
      require(theta > 0.0, ErrorCode::Validation,
              "variant 'ljvapp' needs a positive theta");
      alpha = 0.0;
    } else {  // lpvapp
      require(!config.has("theta"), ErrorCode::Validation,
              "variant 'lpvapp' fixes theta = 0");
      require(alpha > 0.0, ErrorCode::Validation,
              "variant 'lpvapp' needs a positive alpha");
      theta = 0.0;
    }
    spec = CoreFunctionSpec::jacobian_quadratic(
        VectorXd::Constant(1, theta), VectorXd::Constant(1, alpha), {});
    params.epsilon = 1.0;
  } else {
    reject_variant(variant, "qp");
  }

  BoundCore core = bind_core(spec, problem);
  if (variant == "identity-core" && !config.has("epsilon")) {
    params.epsilon = default_epsilon(problem, core, config.gamma);
  }
  return finish_job(config, variant, std::move(problem), std::move(core),
                    params);
}

Job build_fused_job(const RunConfig& config, const std::string& variant) {
  if (variant != "pjvapp" && variant != "ljvapp" && variant != "lpvapp") {
    reject_variant(variant, "fused-svm");
  }
  const Dataset data = dataset_for(config, 20, 50);
  FusedSvmInstance inst;
  inst.features = data.features;
  inst.labels = data.labels;
  inst.lambda1 = config.lambda1;
  inst.lambda2 = config.lambda2;
  inst.gamma = config.gamma;
  inst.rho = config.rho;
  inst.alpha1 = config.alpha1;
  inst.alpha2 = config.alpha2;
  if (variant == "ljvapp") {
    require(!config.has("alpha1") && !config.has("alpha2"),
            ErrorCode::Validation, "variant 'ljvapp' fixes alpha1 = alpha2 = 0");
    inst.alpha1 = 0.0;
    inst.alpha2 = 0.0;
  }
  AppBuild build = build_fused_svm(inst);
  if (variant == "lpvapp") {
    const int n = static_cast<int>(data.features.rows());
    VectorXd alpha(n + 1);
    alpha.head(n).setConstant(inst.alpha1);
    alpha[n] = inst.alpha2;
    build.core = CoreFunctionSpec::jacobian_quadratic(VectorXd::Zero(1),
                                                      alpha, {});
  }
  BoundCore core = bind_core(build.core, build.problem);
  return finish_job(config, variant, std::move(build.problem), std::move(core),
                    build.params);
}

Job build_logistic_job(const RunConfig& config, const std::string& variant) {
  if (variant != "newton-core" && variant != "identity-core") {
    reject_variant(variant, "logistic");
  }
  const Dataset data = dataset_for(config, 30, 60);
  LogisticInstance inst;
  inst.features = data.features;
  inst.labels = data.labels;
  inst.lambda = config.lambda;
  inst.epsilon = config.epsilon > 0.0 ? config.epsilon : 0.1;
  inst.gamma = config.gamma;
  inst.rho = config.rho;
  AppBuild build = build_logistic(inst);
  if (variant == "identity-core") {
    build.core = CoreFunctionSpec::identity_quadratic(1.0);
  }
  BoundCore core = bind_core(build.core, build.problem);
  if (!config.has("epsilon")) {
    build.params.epsilon = default_epsilon(build.problem, core, config.gamma);
  }
  return finish_job(config, variant, std::move(build.problem), std::move(core),
                    build.params);
}

Job build_dsvm_job(const RunConfig& config, const std::string& variant) {
  if (variant != "identity-core") reject_variant(variant, "dsvm");
  Dataset data;
  if (!config.data.empty()) {
    data = read_libsvm(config.data);
  } else {
    data = generate_classification(config.seed, config.features,
                                   config.n > 0 ? config.n : 40,
                                   config.sparsity);
  }
  DsvmInstance inst = dsvm_instance_from_data(data, config.c);
  inst.epsilon = config.epsilon > 0.0 ? config.epsilon : 0.1;
  inst.gamma = config.gamma;
  inst.rho = config.rho;
  AppBuild build = build_dsvm(inst);
  BoundCore core = bind_core(build.core, build.problem);
  if (!config.has("epsilon")) {
    build.params.epsilon = default_epsilon(build.problem, core, config.gamma);
  }
  return finish_job(config, variant, std::move(build.problem), std::move(core),
                    build.params);
}

}  // namespace

Job build_job(const RunConfig& config) {
  check_key_applicability(config);
  const std::string variant = variant_or_default(config);
  if (config.problem == "qp") return build_qp_job(config, variant);
  if (config.problem == "fused-svm") return build_fused_job(config, variant);
  if (config.problem == "logistic") return build_logistic_job(config, variant);
  require(config.problem == "dsvm", ErrorCode::InvalidArgument,
          "unknown problem kind");
  return build_dsvm_job(config, variant);
}

// ---------------------------------------------------------------------------
// Trace and summary serialization
// ---------------------------------------------------------------------------

std::string format_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

const char* kTraceHeader =
    "k,objective,primal_res,du_norm,dp_norm,du_Hbar_sq,lambda_merit,wall_ms";

//! Unavailable diagnostics serialize as empty cells.
std::string csv_cell(double v) {
  if (std::isnan(v)) return "";
  return format_g17(v);
}

double parse_cell(const std::string& token, long line) {
  if (token.empty()) return std::numeric_limits<double>::quiet_NaN();
  return parse_double_strict(token, line);
}

}  // namespace

std::string format_trace_csv(const std::vector<TraceRecord>& trace) {
  std::string out = kTraceHeader;
  out += '\n';
  for (const TraceRecord& r : trace) {
    out += std::to_string(r.k);
    out += ',';
    out += csv_cell(r.objective);
    out += ',';
    out += csv_cell(r.primal_res);
    out += ',';
    out += csv_cell(r.du_norm);
    out += ',';
    out += csv_cell(r.dp_norm);
    out += ',';
    out += csv_cell(r.du_hbar_sq);
    out += ',';
    out += csv_cell(r.lambda_merit);
    out += ',';
    out += csv_cell(r.wall_ms);
    out += '\n';
  }
  return out;
}

void write_trace_csv(const std::string& path,
                     const std::vector<TraceRecord>& trace) {
  write_text_file(path, format_trace_csv(trace));
}

std::vector<TraceRecord> parse_trace_csv(const std::string& text) {
  const std::vector<std::string> lines = split_lines(text);
  require(!lines.empty(), ErrorCode::Parse, "empty trace");
  require(lines[0] == kTraceHeader, ErrorCode::Parse,
          "line 1: unrecognized trace header");
  std::vector<TraceRecord> out;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const long line_no = static_cast<long>(li) + 1;
    if (trim(lines[li]).empty()) continue;
    const std::vector<std::string> fields = split_fields(lines[li], ',');
    if (fields.size() != 8) parse_fail(line_no, "expected 8 fields");
    TraceRecord r;
    r.k = parse_long_strict(fields[0], line_no);
    r.objective = parse_cell(fields[1], line_no);
    r.primal_res = parse_cell(fields[2], line_no);
    r.du_norm = parse_cell(fields[3], line_no);
    r.dp_norm = parse_cell(fields[4], line_no);
    r.du_hbar_sq = parse_cell(fields[5], line_no);
    r.lambda_merit = parse_cell(fields[6], line_no);
    r.wall_ms = parse_cell(fields[7], line_no);
    out.push_back(r);
  }
  return out;
}

std::vector<TraceRecord> read_trace_csv(const std::string& path) {
  return parse_trace_csv(read_text_file(path));
}

namespace {

std::string report_json_fields(const ParamReport& report) {
  std::string out;
  out += "\"regime\": \"" + std::string(regime_name(report.regime)) + "\",\n";
  out += "  \"theorem2_ok\": " + json_bool(report.theorem2_ok) + ",\n";
  out += "  \"prop1_applicable\": " + json_bool(report.prop1_applicable) +
         ",\n";
  out += "  \"prop1_ok\": " + json_bool(report.prop1_ok) + ",\n";
  out += "  \"beta\": " + json_number(report.beta) + ",\n";
  out += "  \"b_upper\": " + json_number(report.bee) + ",\n";
  out += "  \"b_g\": " + json_number(report.b_g) + ",\n";
  out += "  \"lambda_max_ata\": " + json_number(report.lambda_max_ata) + ",\n";
  out += "  \"eps_ceiling\": " + json_number(report.eps_ceiling) + ",\n";
  out += "  \"rho_ceiling\": " + json_number(report.rho_ceiling) + ",\n";
  out += "  \"h_under_lambda_min\": " + json_number(report.h_under_lambda_min);
  return out;
}

//! Tail rate fit over the squared-step series; null when the run is too
//! short for a meaningful fit.
std::string rate_json(const SolverParams& params,
                      const std::vector<TraceRecord>& trace) {
  std::vector<double> series;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const TraceRecord& r = trace[i];
    const double a =
        std::isnan(r.du_hbar_sq)
            ? r.du_norm * r.du_norm + r.dp_norm * r.dp_norm
            : r.du_hbar_sq + r.dp_norm * r.dp_norm / params.rho;
    series.push_back(a);
  }
  if (series.size() < 20) return "null";
  const long window = std::max<long>(
      2, std::min<long>(200, static_cast<long>(series.size()) / 5));
  const RateFit fit = rate_fit(series, window);
  std::string out = "{";
  out += "\"slope\": " + json_number(fit.slope) + ", ";
  out += "\"intercept\": " + json_number(fit.intercept) + ", ";
  out += "\"small_o\": " + json_bool(fit.small_o);
  out += "}";
  return out;
}

}  // namespace

std::string summary_json(const Job& job, const ParamReport& report,
                         const RunResult& result) {
  require(!result.trace.empty(), ErrorCode::InvalidArgument,
          "result has no trace");
  const TraceRecord& last = result.trace.back();
  std::string out = "{\n";
  out += "  \"problem\": \"" + json_escape(job.kind) + "\",\n";
  out += "  \"variant\": \"" + json_escape(job.variant) + "\",\n";
  out += "  \"n\": " + std::to_string(job.problem.n()) + ",\n";
  out += "  \"m\": " + std::to_string(job.problem.m()) + ",\n";
  out += "  \"blocks\": " + std::to_string(job.problem.num_blocks()) + ",\n";
  out += "  \"schedule\": \"" +
         std::string(schedule_name(job.params.schedule)) + "\",\n";
  out += "  \"workers\": " + std::to_string(job.params.worker_count) + ",\n";
  out += "  \"epsilon\": " + json_number(job.params.epsilon) + ",\n";
  out += "  \"gamma\": " + json_number(job.params.gamma) + ",\n";
  out += "  \"rho\": " + json_number(job.params.rho) + ",\n";
  out += "  \"delta\": " + json_number(job.params.delta) + ",\n";
  out += "  \"tol_primal\": " + json_number(job.params.tol_primal) + ",\n";
  out += "  \"tol_change\": " + json_number(job.params.tol_change) + ",\n";
  out += "  \"max_iter\": " + std::to_string(job.params.max_iter) + ",\n";
  out += "  " + report_json_fields(report) + ",\n";
  out += "  \"iterations\": " + std::to_string(result.state.k) + ",\n";
  out += std::string("  \"termination\": \"") +
         (result.reason == Termination::Converged ? "converged"
                                                  : "iteration-cap") +
         "\",\n";
  out += "  \"objective\": " + json_number(last.objective) + ",\n";
  out += "  \"primal_res\": " + json_number(last.primal_res) + ",\n";
  out += "  \"du_norm\": " + json_number(last.du_norm) + ",\n";
  out += "  \"dp_norm\": " + json_number(last.dp_norm) + ",\n";
  out += "  \"rate\": " + rate_json(job.params, result.trace);
  if (job.timing) {
    out += ",\n  \"wall_ms_total\": " + json_number(result.wall_ms_total);
  }
  out += "\n}\n";
  return out;
}

std::string validation_json(const Job& job, const ParamReport& report) {
  std::string out = "{\n";
  out += "  \"problem\": \"" + json_escape(job.kind) + "\",\n";
  out += "  \"variant\": \"" + json_escape(job.variant) + "\",\n";
  out += "  \"epsilon\": " + json_number(job.params.epsilon) + ",\n";
  out += "  \"gamma\": " + json_number(job.params.gamma) + ",\n";
  out += "  \"rho\": " + json_number(job.params.rho) + ",\n";
  out += "  \"delta\": " + json_number(job.params.delta) + ",\n";
  out += "  " + report_json_fields(report) + ",\n";
  out += "  \"messages\": [";
  for (std::size_t i = 0; i < report.messages.size(); ++i) {
    if (i > 0) out += ", ";
    out += "\"" + json_escape(report.messages[i]) + "\"";
  }
  out += "]\n}\n";
  return out;
}

// ---------------------------------------------------------------------------
// Small file helpers
// ---------------------------------------------------------------------------

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorCode::Io, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  require(!in.bad(), ErrorCode::Io, "read failed on '" + path + "'");
  return buf.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(out.good(), ErrorCode::Io, "cannot write '" + path + "'");
  out << text;
  out.flush();
  require(out.good(), ErrorCode::Io, "write failed on '" + path + "'");
}

}  // namespace vapp
