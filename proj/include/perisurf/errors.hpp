#pragma once

#include <stdexcept>
#include <string>

namespace perisurf {

enum class ErrorKind {
  Config,
  Geometry,
  InvalidPerturbation,
  Solver,
  AmbiguousLocator,
  Io,
  Domain,
  Anomaly,
  Interface,
  Consistency,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

// CLI exit code for an error category.
inline int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Config:
    case ErrorKind::Io:
    case ErrorKind::Interface:
      return 2;
    case ErrorKind::AmbiguousLocator:
      return 4;
    default:
      return 3;
  }
}

}  // namespace perisurf
