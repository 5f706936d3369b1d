#pragma once

#include <stdexcept>
#include <string>

namespace echkit {

/// Base class for every domain-level failure. `code()` is a stable,
/// machine-readable tag used by the CLI's structured error output.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& what)
      : std::runtime_error(what), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

/// A floor/ceil/sign/comparison query whose answer is not certified by the
/// available precision.
class AmbiguousError : public Error {
 public:
  explicit AmbiguousError(const std::string& what) : Error("ambiguous", what) {}
};

class UnknownOrbitError : public Error {
 public:
  explicit UnknownOrbitError(const std::string& id)
      : Error("unknown_orbit", "unknown orbit id '" + id + "'") {}
};

class PreconditionError : public Error {
 public:
  explicit PreconditionError(const std::string& what) : Error("precondition", what) {}
};

class DimensionError : public Error {
 public:
  explicit DimensionError(const std::string& what) : Error("dimension_mismatch", what) {}
};

/// Raised when two routes that must agree do not (an internal defect).
class InconsistencyError : public Error {
 public:
  explicit InconsistencyError(const std::string& what) : Error("inconsistent", what) {}
};

/// Raised on action coincidences and spectrum ties.
class DegenerateError : public Error {
 public:
  explicit DegenerateError(const std::string& what) : Error("degenerate", what) {}
};

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what) : Error("parse", what) {}
};

}  // namespace echkit
