// SPDX-License-Identifier: Apache-2.0
#include "kppvar/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "kppvar/errors.hpp"

namespace kppvar {

double enhancement_sample(double c_star, double c0, double delta, double shear_mean) {
  return c_star - c0 - delta * shear_mean;
}

namespace {

void validate(const EnsembleConfig& config) {
  if (config.realizations < 1) throw ParameterError("run_ensemble: need at least one realization");
  if (config.deltas.empty()) throw ParameterError("run_ensemble: empty delta list");
  if (config.histogram_bins < 2) throw ParameterError("run_ensemble: need at least two bins");
  if (!(config.f_prime0 > 0.0)) throw ParameterError("run_ensemble: f'(0) must be positive");
  for (std::size_t j = 0; j < config.deltas.size(); ++j) {
    if (config.deltas[j] < 0.0) throw ParameterError("run_ensemble: negative delta");
    if (j > 0 && config.deltas[j] <= config.deltas[j - 1])
      throw ParameterError("run_ensemble: deltas must be strictly increasing");
  }
}

}  // namespace

EnsembleResult run_ensemble(const EnsembleConfig& config) {
  validate(config);
  const int n = config.realizations;
  const std::size_t n_deltas = config.deltas.size();

  EnsembleResult result;
  result.c0 = 2.0 * std::sqrt(config.f_prime0 * config.speed_options.kappa);
  result.records.assign(n, RealizationRecord{});

  const auto work = [&](int i) {
    RealizationRecord& record = result.records[i];
    try {
      RandomStream stream = realization_stream(config.master_seed, static_cast<std::uint64_t>(i));
      const ShearPath path = config.use_exact_sampler
                                 ? exact_ou_sample(config.ou, config.grid, stream)
                                 : sample_ou_path(config.ou, config.grid, stream);
      record.shear_mean = path.mean;
      record.enhancement_coeff =
          solve_cell_problem(config.grid, path.fluctuation).enhancement_coeff;
      record.c_star.resize(n_deltas);
      for (std::size_t j = 0; j < n_deltas; ++j) {
        if (config.deltas[j] == 0.0) {
          record.c_star[j] = result.c0;
          continue;
        }
        record.c_star[j] =
            minimal_speed(path, config.deltas[j], config.f_prime0, config.speed_options).c_star;
      }
    } catch (const std::exception&) {
      record.failed = true;
    }
  };

  int thread_count = config.threads > 0
                         ? config.threads
                         : static_cast<int>(std::thread::hardware_concurrency());
  thread_count = std::max(1, std::min(thread_count, n));
  if (thread_count == 1) {
    for (int i = 0; i < n; ++i) work(i);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(thread_count);
    for (int t = 0; t < thread_count; ++t)
      pool.emplace_back([&] {
        for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) work(i);
      });
    for (auto& th : pool) th.join();
  }

  for (const auto& record : result.records)
    if (record.failed) ++result.failures;
  if (result.failures > 0.001 * n)
    throw EnsembleError("run_ensemble: " + std::to_string(result.failures) + " of " +
                        std::to_string(n) + " realizations failed");

  result.per_delta.resize(n_deltas);
  for (std::size_t j = 0; j < n_deltas; ++j) {
    DeltaStatistics& stats = result.per_delta[j];
    stats.delta = config.deltas[j];
    stats.samples.reserve(n);
    for (const auto& record : result.records) {
      if (record.failed) continue;
      stats.samples.push_back(enhancement_sample(record.c_star[j], result.c0, stats.delta,
                                                 record.shear_mean));
    }
    const auto count = static_cast<double>(stats.samples.size());
    double mean = 0.0;
    for (double v : stats.samples) mean += v;
    mean /= count;
    double var = 0.0;
    for (double v : stats.samples) var += (v - mean) * (v - mean);
    stats.mean_enhancement = mean;
    stats.std_error = count > 1 ? std::sqrt(var / (count - 1.0) / count) : 0.0;
  }
  return result;
}

ScalingFit fit_scaling_exponent(std::span<const std::pair<double, double>> points) {
  if (points.size() < 2) throw ParameterError("fit_scaling_exponent: need at least two points");
  std::vector<double> xs, ys;
  xs.reserve(points.size());
  ys.reserve(points.size());
  for (const auto& [delta, enhancement] : points) {
    if (!(delta > 0.0)) throw ParameterError("fit_scaling_exponent: delta must be positive");
    if (!(enhancement > 0.0))
      throw ParameterError("fit_scaling_exponent: nonpositive enhancement (log undefined)");
    xs.push_back(std::log(delta));
    ys.push_back(std::log(enhancement));
  }
  const auto n = static_cast<double>(xs.size());
  double x_mean = 0.0, y_mean = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    x_mean += xs[i];
    y_mean += ys[i];
  }
  x_mean /= n;
  y_mean /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - x_mean) * (xs[i] - x_mean);
    sxy += (xs[i] - x_mean) * (ys[i] - y_mean);
    syy += (ys[i] - y_mean) * (ys[i] - y_mean);
  }
  if (!(sxx > 0.0)) throw ParameterError("fit_scaling_exponent: deltas must be distinct");

  ScalingFit fit;
  fit.exponent = sxy / sxx;
  fit.intercept = y_mean - fit.exponent * x_mean;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double e = ys[i] - (fit.intercept + fit.exponent * xs[i]);
    ss_res += e * e;
  }
  fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  return fit;
}

Pdf histogram_pdf(std::span<const double> samples, int bins) {
  if (bins < 2) throw ParameterError("histogram_pdf: need at least two bins");
  if (samples.size() < 2) throw ParameterError("histogram_pdf: need at least two samples");
  const auto [lo_it, hi_it] = std::minmax_element(samples.begin(), samples.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  if (!(hi > lo)) throw ParameterError("histogram_pdf: degenerate sample range");

  Pdf pdf;
  pdf.count = samples.size();
  pdf.edges.resize(bins + 1);
  const double width = (hi - lo) / bins;
  for (int j = 0; j <= bins; ++j) pdf.edges[j] = lo + j * width;
  pdf.edges.back() = hi;

  std::vector<std::size_t> counts(bins, 0);
  for (double x : samples) {
    int j = static_cast<int>((x - lo) / width);
    j = std::clamp(j, 0, bins - 1);
    ++counts[j];
  }
  pdf.density.resize(bins);
  const auto n = static_cast<double>(samples.size());
  for (int j = 0; j < bins; ++j)
    pdf.density[j] = counts[j] / (n * (pdf.edges[j + 1] - pdf.edges[j]));
  return pdf;
}

Pdf histogram_pdf(std::span<const double> samples, std::span<const double> edges) {
  if (edges.size() < 3) throw ParameterError("histogram_pdf: need at least two bins");
  if (samples.size() < 2) throw ParameterError("histogram_pdf: need at least two samples");
  for (std::size_t j = 1; j < edges.size(); ++j)
    if (!(edges[j] > edges[j - 1])) throw ParameterError("histogram_pdf: edges must increase");

  Pdf pdf;
  pdf.count = samples.size();
  pdf.edges.assign(edges.begin(), edges.end());
  const int bins = static_cast<int>(edges.size()) - 1;
  std::vector<std::size_t> counts(bins, 0);
  for (double x : samples) {
    const auto it = std::upper_bound(pdf.edges.begin(), pdf.edges.end(), x);
    int j = static_cast<int>(it - pdf.edges.begin()) - 1;
    j = std::clamp(j, 0, bins - 1);
    ++counts[j];
  }
  pdf.density.resize(bins);
  const auto n = static_cast<double>(samples.size());
  for (int j = 0; j < bins; ++j)
    pdf.density[j] = counts[j] / (n * (pdf.edges[j + 1] - pdf.edges[j]));
  return pdf;
}

double distribution_distance(const Pdf& a, const Pdf& b) {
  if (a.edges.size() != b.edges.size())
    throw ParameterError("distribution_distance: histograms must share edges");
  for (std::size_t j = 0; j < a.edges.size(); ++j)
    if (a.edges[j] != b.edges[j])
      throw ParameterError("distribution_distance: histograms must share edges");
  double cdf_a = 0.0, cdf_b = 0.0, dist = 0.0;
  for (std::size_t j = 0; j + 1 < a.edges.size(); ++j) {
    const double width = a.edges[j + 1] - a.edges[j];
    cdf_a += a.density[j] * width;
    cdf_b += b.density[j] * width;
    dist = std::max(dist, std::abs(cdf_a - cdf_b));
  }
  return dist;
}

SpeedBounds upper_bounds(const ShearPath& shear, const ChiField& chi, double delta,
                         double kappa, double f_prime0) {
  if (!(kappa > 0.0)) throw ParameterError("upper_bounds: kappa must be positive");
  double b_inf = 0.0;
  for (double v : shear.values) b_inf = std::max(b_inf, std::abs(v));
  double grad_inf = 0.0;
  for (double v : chi.chi_deriv) grad_inf = std::max(grad_inf, std::abs(v));

  SpeedBounds bounds;
  bounds.g1 = 2.0 * kappa * f_prime0 + delta * b_inf;
  bounds.g1_sqrt = 2.0 * std::sqrt(kappa * f_prime0) + delta * b_inf;
  bounds.g2 = 2.0 * std::sqrt(kappa + delta * delta / kappa * grad_inf);
  return bounds;
}

}  // namespace kppvar
