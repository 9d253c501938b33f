// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "kppvar/eigen.hpp"
#include "kppvar/shear.hpp"

namespace kppvar {

/// Value and derivative of the dispersion curve H(lambda) = mu(lambda)/lambda.
struct SpeedObjective {
  double value = 0.0;
  double derivative = 0.0;
};

/// Evaluates H and H' at one lambda.  mu'(lambda) is the exact
/// Hellmann-Feynman derivative of the discrete eigenvalue,
///   mu' = sum_i v_i^2 (2 kappa lambda + delta b_i) / sum_i v_i^2,
/// where v is the symmetric eigenvector (the physical eigenfunction with its
/// end components carrying weight 1/2, matching the trapezoid rule).
SpeedObjective speed_objective(const ShearPath& shear, double delta, double f_prime0,
                               double lambda, double kappa = 1.0);

struct SpeedOptions {
  double lambda_min_factor = 1e-4;   // lower search endpoint, fraction of lambda0
  double gradient_tol = 1e-10;       // |H'| convergence threshold
  int max_newton_iterations = 50;
  double golden_tol = 1e-10;         // fallback bracket width
  double kappa = 1.0;                // diffusivity; lambda0 = sqrt(f'(0)/kappa)
};

struct SpeedResult {
  double c_star = 0.0;
  double lambda_star = 0.0;
  double mu_star = 0.0;
  int iterations = 0;
  bool converged = false;
  bool fallback_used = false;
};

/// Accepted iterate of the minimization, for trace output.
struct SpeedTracePoint {
  double lambda = 0.0;
  double objective = 0.0;
};

/// Minimal front speed c* = inf H(lambda) over (lambda_min, lambda0].
///
/// The infimum over all lambda > 0 is attained in this bracket
/// (lambda0 = sqrt(f'(0)/kappa)); a constant shear component only shifts H,
/// so the bracket is valid for shears of any mean.  Newton iterations on H'
/// (secant curvature, backtracking line search, monotone in H) start from
/// lambda0; golden-section search over the bracket is the fallback when
/// Newton does not converge within the iteration budget.
SpeedResult minimal_speed(const ShearPath& shear, double delta, double f_prime0,
                          const SpeedOptions& opts = {},
                          std::vector<SpeedTracePoint>* trace = nullptr);

}  // namespace kppvar
