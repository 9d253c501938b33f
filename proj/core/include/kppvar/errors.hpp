// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace kppvar {

/// Invalid parameter value or malformed input data.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An iterative solver failed to converge.  The message carries the
/// diagnostics (iteration count, last residual or gradient).
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, int iterations)
      : std::runtime_error(what + " (after " + std::to_string(iterations) + " iterations)"),
        iterations_(iterations) {}

  int iterations() const noexcept { return iterations_; }

 private:
  int iterations_;
};

/// Time-dependent simulation failure: CFL violation, lost front,
/// non-convergent speed fit.
class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Ensemble-level failure (too many per-realization solver errors).
class EnsembleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace kppvar
