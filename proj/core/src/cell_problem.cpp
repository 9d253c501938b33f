// SPDX-License-Identifier: Apache-2.0
#include "kppvar/cell_problem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kppvar/errors.hpp"

namespace kppvar {

ChiField solve_cell_problem(const Grid& grid, std::span<const double> fluctuation) {
  const int m = grid.nodes;
  if (static_cast<int>(fluctuation.size()) != m)
    throw ParameterError("solve_cell_problem: source size does not match grid");

  double max_abs = 0.0;
  for (double v : fluctuation) max_abs = std::max(max_abs, std::abs(v));

  std::vector<double> mean_check(fluctuation.begin(), fluctuation.end());
  const double source_mean = trapezoid_mean(grid, mean_check);
  if (std::abs(source_mean) > 1e-10 * std::max(max_abs, 1e-300))
    throw ParameterError("solve_cell_problem: source has nonzero mean (Neumann solvability)");

  ChiField field;
  field.grid = grid;
  field.chi_deriv.resize(m);
  field.chi.resize(m);

  // chi'(y_i) = -cumulative trapezoid of b1.  Both ends are pinned to zero:
  // the left end by the empty integral, the right end by the solvability
  // condition checked above (the raw value there is pure roundoff).
  const double h = grid.spacing;
  field.chi_deriv[0] = 0.0;
  double acc = 0.0;
  for (int i = 1; i < m; ++i) {
    acc += 0.5 * h * (fluctuation[i - 1] + fluctuation[i]);
    field.chi_deriv[i] = -acc;
  }
  field.chi_deriv[m - 1] = 0.0;

  field.chi[0] = 0.0;
  acc = 0.0;
  for (int i = 1; i < m; ++i) {
    acc += 0.5 * h * (field.chi_deriv[i - 1] + field.chi_deriv[i]);
    field.chi[i] = acc;
  }
  const double chi_min = *std::min_element(field.chi.begin(), field.chi.end());
  for (double& v : field.chi) v -= chi_min;

  double k_sum = 0.5 * (field.chi_deriv[0] * field.chi_deriv[0] +
                        field.chi_deriv[m - 1] * field.chi_deriv[m - 1]);
  for (int i = 1; i < m - 1; ++i) k_sum += field.chi_deriv[i] * field.chi_deriv[i];
  field.enhancement_coeff = k_sum * h / grid.length;
  return field;
}

double predicted_speed_small_delta(double enhancement_coeff, double delta, double f_prime0) {
  if (!(f_prime0 > 0.0)) throw ParameterError("predicted_speed_small_delta: f'(0) must be positive");
  if (delta < 0.0) throw ParameterError("predicted_speed_small_delta: delta must be nonnegative");
  const double c0 = 2.0 * std::sqrt(f_prime0);
  return c0 + 0.5 * c0 * delta * delta * enhancement_coeff;
}

namespace {

// g(s) = e^{-s}(4/s^2 - 1/3) + s/3 - 4/s^2 - 5/3 + 4/s, the width-free part
// of the closed form; enh = rho * g(aL) / a^2.
double bracket_direct(double s) {
  const double inv_s2 = 1.0 / (s * s);
  return std::exp(-s) * (4.0 * inv_s2 - 1.0 / 3.0) + s / 3.0 - 4.0 * inv_s2 - 5.0 / 3.0 +
         4.0 / s;
}

// Alternating series of g(s); the direct form loses all significant digits
// for small s (terms of size 4/s^2 cancel down to O(s^3)).
double bracket_series(double s) {
  double sum = 0.0;
  double s_pow = s * s * s;
  double factorial = 120.0;  // (3+2)!
  double sign = 1.0;
  for (int n = 3; n < 60; ++n) {
    const double term = sign * (n + 5.0) * (n - 2.0) / (3.0 * factorial) * s_pow;
    sum += term;
    if (std::abs(term) < std::numeric_limits<double>::epsilon() * std::abs(sum)) break;
    s_pow *= s;
    factorial *= (n + 3.0);
    sign = -sign;
  }
  return sum;
}

}  // namespace

double ou_enhancement_closed_form(double drift_rate, double noise_intensity,
                                  double channel_width) {
  if (!(drift_rate > 0.0) || !(noise_intensity > 0.0) || !(channel_width > 0.0))
    throw ParameterError("ou_enhancement_closed_form: parameters must be positive");
  const double rho = noise_intensity * noise_intensity / (2.0 * drift_rate);
  const double s = drift_rate * channel_width;
  const double bracket = s < 1.0 ? bracket_series(s) : bracket_direct(s);
  return rho * bracket / (drift_rate * drift_rate);
}

double predicted_mean_speed(const OUParams& params, double delta, double f_prime0) {
  if (!(f_prime0 > 0.0)) throw ParameterError("predicted_mean_speed: f'(0) must be positive");
  if (delta < 0.0) throw ParameterError("predicted_mean_speed: delta must be nonnegative");
  const double c0 = 2.0 * std::sqrt(f_prime0);
  if (delta == 0.0) return c0;
  const double enh = ou_enhancement_closed_form(params.drift_rate, params.noise_intensity,
                                                params.channel_width);
  return c0 + 0.5 * c0 * delta * delta * enh;
}

}  // namespace kppvar
