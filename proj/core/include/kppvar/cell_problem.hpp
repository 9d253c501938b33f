// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

#include "kppvar/grid.hpp"
#include "kppvar/shear.hpp"

namespace kppvar {

/// Solution of the 1D Neumann cell problem chi'' = -b1 on [0, L] for a
/// mean-zero source b1, normalized so min(chi) = 0.  The enhancement
/// coefficient is the integral average of chi'^2.
struct ChiField {
  Grid grid;
  std::vector<double> chi;
  std::vector<double> chi_deriv;     // chi'(y_i); exactly 0 at both ends
  double enhancement_coeff = 0.0;    // (1/L) * integral of chi'^2
};

/// Solves the cell problem by two cumulative trapezoid passes:
///   chi'(y) = -int_0^y b1,   chi(y) = int_0^y chi',  shifted to min 0.
/// Requires the trapezoid mean of b1 to vanish (Neumann solvability);
/// tolerance 1e-10 * max|b1|.
ChiField solve_cell_problem(const Grid& grid, std::span<const double> fluctuation);

/// Small-amplitude speed expansion c0 + c0 * delta^2 * coeff / 2 with
/// c0 = 2 sqrt(f_prime0).
double predicted_speed_small_delta(double enhancement_coeff, double delta, double f_prime0);

/// Closed-form ensemble average of the enhancement coefficient for the
/// stationary O-U shear on [0, L]:
///
///   enh = rho * ( e^{-aL} (4/(L^2 a^4) - 1/(3a^2))
///                 + L/(3a) - 4/(L^2 a^4) - 5/(3a^2) + 4/(L a^3) ),
///
/// with rho = r^2/(2a).  The bracket is a difference of large terms for
/// small aL; below aL = 1 it is evaluated through the alternating series
///   enh = (rho / a^2) * sum_{n>=3} (-1)^{n+1} (n+5)(n-2) / (3 (n+2)!) (aL)^n,
/// which the closed form reduces to analytically.
double ou_enhancement_closed_form(double drift_rate, double noise_intensity, double channel_width);

/// Small-amplitude ensemble-averaged speed c0 + (c0 delta^2 / 2) * enh.
double predicted_mean_speed(const OUParams& params, double delta, double f_prime0);

}  // namespace kppvar
