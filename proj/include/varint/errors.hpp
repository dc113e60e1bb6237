#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace varint {

/// Failure categories shared by the C++ core and the C API.
enum class ErrorCode {
  Config,          // invalid configuration or precondition
  Domain,          // evaluation outside a model/monitor/jet domain
  NonMonotoneTime, // t_{k+1} <= t_k
  NonConvergence,  // Newton iteration cap reached
  IllPosed,        // singular or numerically singular Jacobian
  UnsupportedOrder,
  Io,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorCode::Config, what) {}
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(ErrorCode::Domain, what) {}
};

class NonMonotoneTimeError : public Error {
 public:
  explicit NonMonotoneTimeError(const std::string& what) : Error(ErrorCode::NonMonotoneTime, what) {}
};

class IllPosedError : public Error {
 public:
  explicit IllPosedError(const std::string& what) : Error(ErrorCode::IllPosed, what) {}
};

class UnsupportedOrderError : public Error {
 public:
  explicit UnsupportedOrderError(const std::string& what) : Error(ErrorCode::UnsupportedOrder, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorCode::Io, what) {}
};

/// Newton ran out of iterations. The best iterate seen is kept (as doubles,
/// since the exception is shared across scalar types).
class NonConvergenceError : public Error {
 public:
  NonConvergenceError(const std::string& what, std::vector<double> best_iterate, double best_residual)
      : Error(ErrorCode::NonConvergence, what),
        best_iterate_(std::move(best_iterate)),
        best_residual_(best_residual) {}

  const std::vector<double>& best_iterate() const noexcept { return best_iterate_; }
  double best_residual() const noexcept { return best_residual_; }

 private:
  std::vector<double> best_iterate_;
  double best_residual_;
};

}  // namespace varint
