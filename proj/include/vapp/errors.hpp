// vapp - block-decomposition augmented Lagrangian solver
// Copyright 2026 vapp contributors
// Licensed under the Apache License, Version 2.0

#ifndef VAPP_ERRORS_HPP_
#define VAPP_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace vapp {

enum class ErrorCode {
  InvalidArgument,
  Dimension,
  Unsupported,
  Singular,
  Validation,
  Parse,
  Io,
  Numerical,
  NoConvergence,
  SizeLimit,
  Unavailable,
  Internal,
};

//! Library error. Every failure surfaced across module boundaries carries a
//! code so callers (and the C shell) can map it without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

const char* error_code_name(ErrorCode code);

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

inline void require(bool ok, ErrorCode code, const std::string& what) {
  if (!ok) fail(code, what);
}

}  // namespace vapp

#endif  // VAPP_ERRORS_HPP_
