// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

#include "kppvar/grid.hpp"
#include "kppvar/random.hpp"

namespace kppvar {

/// Parameters of a stationary Ornstein-Uhlenbeck process
///   dX = -a X dy + r dW,  X(0) ~ Normal(0, rho),  rho = r^2 / (2a),
/// restricted to the channel cross-section [0, L].  The stationary
/// covariance is rho * exp(-a |lag|).
struct OUParams {
  double drift_rate = 0.0;          // a > 0
  double noise_intensity = 0.0;     // r >= 0 (r = 0 degenerates to the zero path)
  double channel_width = 0.0;       // L > 0
  double stationary_variance = 0.0; // rho = r^2 / (2a), stored redundantly

  static OUParams create(double drift_rate, double noise_intensity, double channel_width);
};

/// One discrete shear realization b(y_i) on a uniform grid, decomposed into
/// its integral mean (composite trapezoid rule) and the fluctuation about it.
struct ShearPath {
  Grid grid;
  std::vector<double> values;
  double mean = 0.0;
  std::vector<double> fluctuation;  // values[i] - mean

  /// Builds the decomposition and validates that all values are finite.
  static ShearPath from_values(Grid grid, std::vector<double> values);
};

/// Euler-Maruyama path of the O-U process on a fine grid of spacing
/// hbar = h / ceil(1/h) <= h^2, subsampled at the grid nodes.  For additive
/// noise the Milstein correction vanishes, so this coincides with the
/// Milstein scheme.
ShearPath sample_ou_path(const OUParams& params, const Grid& grid, RandomStream& stream);

/// Exact-transition sampler: X(y+h) = e^{-ah} X(y) + Normal(0, rho(1-e^{-2ah})).
/// The marginal law at every node is exactly stationary; used as a
/// distributional oracle for sample_ou_path and for cheap k-statistics.
ShearPath exact_ou_sample(const OUParams& params, const Grid& grid, RandomStream& stream);

/// Stationary covariance rho * exp(-a |lag|).
double ou_covariance(const OUParams& params, double lag);

struct CovarianceEstimate {
  double lag = 0.0;
  double value = 0.0;
  double std_error = 0.0;
};

/// Empirical covariance at lags t = j*h, averaged over node pairs within each
/// path and then over paths.  The standard error is the across-path spread of
/// the per-path averages.  All paths must share one grid.
std::vector<CovarianceEstimate> estimate_covariance(std::span<const ShearPath> paths,
                                                    std::span<const int> lag_steps);

}  // namespace kppvar
