// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "kppvar/cell_problem.hpp"
#include "kppvar/shear.hpp"
#include "kppvar/speed.hpp"

namespace kppvar {

struct EnsembleConfig {
  OUParams ou;
  Grid grid;
  std::vector<double> deltas;     // nonnegative, strictly increasing
  int realizations = 0;           // N
  std::uint64_t master_seed = 0;
  double f_prime0 = 1.0;
  int histogram_bins = 300;       // Q, used by downstream PDF construction
  int threads = 0;                // 0 = hardware concurrency
  bool use_exact_sampler = false; // exact-transition sampler instead of Euler-Maruyama
  SpeedOptions speed_options{};
};

/// Everything retained per realization: the shear mean, the cell-problem
/// enhancement coefficient, and the minimal speed at every amplitude.
struct RealizationRecord {
  double shear_mean = 0.0;
  double enhancement_coeff = 0.0;
  std::vector<double> c_star;
  bool failed = false;
};

struct DeltaStatistics {
  double delta = 0.0;
  double mean_enhancement = 0.0;   // average of the samples below
  double std_error = 0.0;          // sample std / sqrt(N)
  std::vector<double> samples;     // M_i in realization order, failures excluded
};

struct EnsembleResult {
  double c0 = 0.0;
  std::vector<DeltaStatistics> per_delta;
  std::vector<RealizationRecord> records;
  int failures = 0;
};

/// Mean-subtracted enhancement M = c* - c0 - delta * b_mean.  A constant
/// shear shifts c* by exactly +delta * b_mean through the eigenvalue
/// diagonal, so constant shears give M = 0 identically.
double enhancement_sample(double c_star, double c0, double delta, double shear_mean);

/// Monte Carlo ensemble: N independent shear realizations (streams derived
/// from the master seed by realization index), the same realizations reused
/// across all amplitudes (common random numbers).  Realizations whose solver
/// fails are excluded and counted; more than 0.1% failures aborts the run.
/// Aggregation is an ordered reduction over realization index, so the result
/// is independent of the worker count.
EnsembleResult run_ensemble(const EnsembleConfig& config);

struct ScalingFit {
  double exponent = 0.0;
  double intercept = 0.0;   // of the log-log fit
  double r_squared = 0.0;
};

/// Least-squares slope of log(enhancement) against log(delta).
/// All enhancements must be positive.
ScalingFit fit_scaling_exponent(std::span<const std::pair<double, double>> points);

/// Histogram probability density: bin j has density count_j / (N * width_j),
/// so the densities integrate to one exactly.
struct Pdf {
  std::vector<double> edges;     // Q+1 ascending edges
  std::vector<double> density;   // Q values
  std::size_t count = 0;
};

/// Q equal-width bins spanning [min, max] of the samples.
Pdf histogram_pdf(std::span<const double> samples, int bins);

/// Histogram on prescribed edges (values outside land in the end bins);
/// used to compare subsample PDFs on a common binning.
Pdf histogram_pdf(std::span<const double> samples, std::span<const double> edges);

/// Kolmogorov (sup-CDF) distance between the distributions induced by two
/// histograms on identical edges.
double distribution_distance(const Pdf& a, const Pdf& b);

/// Per-realization upper bounds on the minimal speed:
///   g1      = 2 kappa f'(0) + delta * max|b|
///   g1_sqrt = 2 sqrt(kappa f'(0)) + delta * max|b|
///   g2      = 2 sqrt(kappa + (delta^2/kappa) * max|chi'|)
/// The two g1 forms coincide at kappa = 1; g1_sqrt is the dimensionally
/// consistent one and the bound to trust at kappa != 1.
struct SpeedBounds {
  double g1 = 0.0;
  double g1_sqrt = 0.0;
  double g2 = 0.0;
};

SpeedBounds upper_bounds(const ShearPath& shear, const ChiField& chi, double delta,
                         double kappa, double f_prime0);

}  // namespace kppvar
