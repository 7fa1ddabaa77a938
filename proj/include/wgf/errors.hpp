#pragma once

#include <stdexcept>
#include <string>

namespace wgf {

/// Violated precondition or type invariant (bad dimension, γ ≥ 1/L, ...).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An iterative solver hit its iteration cap before certifying optimality.
class SolverFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A computed quantity contradicts a known fact, e.g. a minimizer was beaten.
class InconsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

namespace detail {
inline void require(bool ok, const std::string& what) {
  if (!ok) throw PreconditionError(what);
}
}  // namespace detail

}  // namespace wgf
