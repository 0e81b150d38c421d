#pragma once

#include <stdexcept>
#include <string>

namespace rotorid {

/// Failure category. Each maps onto one CLI exit code.
enum class ErrorKind {
  Config = 2,
  Data = 3,
  Numerical = 4,
  Safety = 5,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace rotorid
