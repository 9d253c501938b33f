// SPDX-License-Identifier: Apache-2.0
#include "kppvar/speed.hpp"

#include <cmath>
#include <limits>

#include "kppvar/errors.hpp"

namespace kppvar {

SpeedObjective speed_objective(const ShearPath& shear, double delta, double f_prime0,
                               double lambda, double kappa) {
  const auto op = assemble_operator(shear, lambda, delta, f_prime0, kappa);
  const auto eig = principal_eigenpair(op);

  const int m = shear.grid.nodes;
  double weighted = 0.0;
  double norm = 0.0;
  for (int i = 0; i < m; ++i) {
    const double weight = (i == 0 || i == m - 1) ? 0.5 : 1.0;  // end scaling squared
    const double w2 = weight * eig.phi[i] * eig.phi[i];
    weighted += w2 * (2.0 * kappa * lambda + delta * shear.values[i]);
    norm += w2;
  }
  const double mu_prime = weighted / norm;

  SpeedObjective obj;
  obj.value = eig.mu / lambda;
  obj.derivative = (mu_prime * lambda - eig.mu) / (lambda * lambda);
  return obj;
}

namespace {

struct Evaluation {
  double lambda;
  SpeedObjective obj;
};

}  // namespace

SpeedResult minimal_speed(const ShearPath& shear, double delta, double f_prime0,
                          const SpeedOptions& opts, std::vector<SpeedTracePoint>* trace) {
  if (!(f_prime0 > 0.0)) throw ParameterError("minimal_speed: f'(0) must be positive");
  if (!(opts.kappa > 0.0)) throw ParameterError("minimal_speed: kappa must be positive");

  const double lambda0 = std::sqrt(f_prime0 / opts.kappa);
  const double lambda_min = opts.lambda_min_factor * lambda0;

  const auto evaluate = [&](double lambda) -> Evaluation {
    return {lambda, speed_objective(shear, delta, f_prime0, lambda, opts.kappa)};
  };
  const auto record = [&](const Evaluation& e) {
    if (trace) trace->push_back({e.lambda, e.obj.value});
  };

  SpeedResult result;
  Evaluation current = evaluate(lambda0);
  record(current);

  // Zero-shear curvature 2 f'(0)/lambda^3 seeds the secant Hessian estimate.
  double curvature = 2.0 * f_prime0 / (lambda0 * lambda0 * lambda0);
  // The analytic gradient carries eigensolver noise of order eps*||S||/gap,
  // which exceeds gradient_tol on fine grids; once the iterate can no longer
  // move or H no longer decreases, a gradient at that floor is converged.
  const double gradient_floor = 1e-6;
  bool newton_ok = false;
  for (int it = 0; it < opts.max_newton_iterations; ++it) {
    if (std::abs(current.obj.derivative) <= opts.gradient_tol) {
      newton_ok = true;
      break;
    }
    if (!(curvature > 0.0) || !std::isfinite(curvature))
      curvature = 2.0 * f_prime0 / (current.lambda * current.lambda * current.lambda);

    double lambda_try = current.lambda - current.obj.derivative / curvature;
    lambda_try = std::min(std::max(lambda_try, lambda_min), lambda0);
    const double step_floor =
        16.0 * std::numeric_limits<double>::epsilon() * std::max(current.lambda, lambda0);
    if (std::abs(lambda_try - current.lambda) <= step_floor) {
      newton_ok = std::abs(current.obj.derivative) <= gradient_floor;
      break;
    }

    // Backtrack toward the current point until H does not increase; the
    // slack of a few ulps keeps terminal steps acceptable once the true
    // decrease falls below the resolution of H itself.
    const double slack =
        8.0 * std::numeric_limits<double>::epsilon() * (std::abs(current.obj.value) + 1.0);
    Evaluation next = evaluate(lambda_try);
    int backtracks = 0;
    while (next.obj.value > current.obj.value + slack && backtracks < 40) {
      lambda_try = current.lambda + 0.5 * (lambda_try - current.lambda);
      if (std::abs(lambda_try - current.lambda) <= step_floor) break;
      next = evaluate(lambda_try);
      ++backtracks;
    }
    if (next.obj.value > current.obj.value + slack) {
      newton_ok = std::abs(current.obj.derivative) <= gradient_floor;
      break;
    }

    const double secant =
        (next.obj.derivative - current.obj.derivative) / (next.lambda - current.lambda);
    if (secant > 0.0 && std::isfinite(secant)) curvature = secant;

    current = next;
    record(current);
    ++result.iterations;
  }

  if (!newton_ok && std::abs(current.obj.derivative) <= gradient_floor &&
      result.iterations >= opts.max_newton_iterations)
    newton_ok = true;

  if (!newton_ok) {
    // Golden-section fallback on the full bracket; H is unimodal there.
    const double inv_phi = 0.6180339887498948482;
    double a = lambda_min;
    double b = lambda0;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    Evaluation e1 = evaluate(x1);
    Evaluation e2 = evaluate(x2);
    int golden_iterations = 0;
    while (b - a > opts.golden_tol && golden_iterations < 200) {
      if (e1.obj.value <= e2.obj.value) {
        b = x2;
        x2 = x1;
        e2 = e1;
        x1 = b - inv_phi * (b - a);
        e1 = evaluate(x1);
      } else {
        a = x1;
        x1 = x2;
        e1 = e2;
        x2 = a + inv_phi * (b - a);
        e2 = evaluate(x2);
      }
      ++golden_iterations;
    }
    Evaluation best = e1.obj.value <= e2.obj.value ? e1 : e2;
    if (best.obj.value < current.obj.value) current = best;
    record(current);
    result.iterations += golden_iterations;
    result.fallback_used = true;
    if (!std::isfinite(current.obj.value))
      throw SolverError("minimal_speed: no convergence by Newton or golden section",
                        result.iterations);
  }

  result.converged = true;
  result.lambda_star = current.lambda;
  result.mu_star = current.obj.value * current.lambda;
  result.c_star = result.mu_star / result.lambda_star;
  return result;
}

}  // namespace kppvar
