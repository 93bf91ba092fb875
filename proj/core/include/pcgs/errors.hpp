#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pcgs {

/// Bad shapes, out-of-range parameters, malformed configuration.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A dense operation was requested above the configured dimension cap.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised by factorizations and by CG when a curvature pᵀΦp is not positive.
class NotPositiveDefiniteError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A non-finite value appeared during an iterative solve.
class NumericBreakdownError : public std::runtime_error {
 public:
  NumericBreakdownError(const std::string& what, std::size_t iteration);
  std::size_t iteration() const noexcept { return iteration_; }

 private:
  std::size_t iteration_;
};

class DegeneratePreconditionerError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A conditional update that has no exact sampler for the requested prior.
class UnsupportedUpdateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or truncated input file.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A Gibbs scan failed; carries the iteration that aborted.
class GibbsError : public std::runtime_error {
 public:
  GibbsError(const std::string& what, std::size_t iteration);
  std::size_t iteration() const noexcept { return iteration_; }

 private:
  std::size_t iteration_;
};

}  // namespace pcgs
