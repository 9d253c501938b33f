// SPDX-License-Identifier: Apache-2.0
#include "kppvar/shear.hpp"

#include <cmath>

#include "kppvar/errors.hpp"

namespace kppvar {

OUParams OUParams::create(double drift_rate, double noise_intensity, double channel_width) {
  if (!(drift_rate > 0.0)) throw ParameterError("OUParams: drift rate must be positive");
  if (!(noise_intensity >= 0.0)) throw ParameterError("OUParams: noise intensity must be nonnegative");
  if (!(channel_width > 0.0)) throw ParameterError("OUParams: channel width must be positive");
  OUParams p;
  p.drift_rate = drift_rate;
  p.noise_intensity = noise_intensity;
  p.channel_width = channel_width;
  p.stationary_variance = noise_intensity * noise_intensity / (2.0 * drift_rate);
  return p;
}

ShearPath ShearPath::from_values(Grid grid, std::vector<double> values) {
  if (static_cast<int>(values.size()) != grid.nodes)
    throw ParameterError("ShearPath: value count does not match grid");
  for (double v : values)
    if (!std::isfinite(v)) throw ParameterError("ShearPath: non-finite value");

  ShearPath path;
  path.grid = grid;
  path.values = std::move(values);
  path.mean = trapezoid_mean(grid, path.values);
  path.fluctuation.resize(path.values.size());
  for (std::size_t i = 0; i < path.values.size(); ++i)
    path.fluctuation[i] = path.values[i] - path.mean;
  return path;
}

ShearPath sample_ou_path(const OUParams& params, const Grid& grid, RandomStream& stream) {
  const double h = grid.spacing;
  // Largest fine spacing <= h^2 dividing h evenly: hbar = h / ceil(1/h).
  const int substeps = std::max(1, static_cast<int>(std::ceil(1.0 / h)));
  const double hbar = h / substeps;
  const double a = params.drift_rate;
  const double noise_scale = params.noise_intensity * std::sqrt(hbar);

  std::vector<double> values(grid.nodes);
  double x = std::sqrt(params.stationary_variance) * stream.normal();
  values[0] = x;
  for (int i = 1; i < grid.nodes; ++i) {
    for (int k = 0; k < substeps; ++k)
      x += -a * x * hbar + noise_scale * stream.normal();
    values[i] = x;
  }
  return ShearPath::from_values(grid, std::move(values));
}

ShearPath exact_ou_sample(const OUParams& params, const Grid& grid, RandomStream& stream) {
  const double decay = std::exp(-params.drift_rate * grid.spacing);
  const double step_sd = std::sqrt(params.stationary_variance * (1.0 - decay * decay));

  std::vector<double> values(grid.nodes);
  double x = std::sqrt(params.stationary_variance) * stream.normal();
  values[0] = x;
  for (int i = 1; i < grid.nodes; ++i) {
    x = decay * x + step_sd * stream.normal();
    values[i] = x;
  }
  return ShearPath::from_values(grid, std::move(values));
}

double ou_covariance(const OUParams& params, double lag) {
  return params.stationary_variance * std::exp(-params.drift_rate * std::abs(lag));
}

std::vector<CovarianceEstimate> estimate_covariance(std::span<const ShearPath> paths,
                                                    std::span<const int> lag_steps) {
  if (paths.empty()) throw ParameterError("estimate_covariance: no paths");
  const Grid& grid = paths.front().grid;
  for (const auto& p : paths)
    if (!p.grid.same_as(grid)) throw ParameterError("estimate_covariance: mismatched grids");

  const int m = grid.nodes;
  const auto n_paths = static_cast<double>(paths.size());

  std::vector<CovarianceEstimate> result;
  result.reserve(lag_steps.size());
  std::vector<double> per_path(paths.size());
  for (int j : lag_steps) {
    if (j < 0 || j >= m) throw ParameterError("estimate_covariance: lag outside grid");
    for (std::size_t p = 0; p < paths.size(); ++p) {
      const auto& b = paths[p].values;
      double sum = 0.0;
      for (int i = 0; i + j < m; ++i) sum += b[i] * b[i + j];
      per_path[p] = sum / (m - j);
    }
    double mean = 0.0;
    for (double v : per_path) mean += v;
    mean /= n_paths;
    double var = 0.0;
    for (double v : per_path) var += (v - mean) * (v - mean);
    const double std_error =
        paths.size() > 1 ? std::sqrt(var / (n_paths - 1.0) / n_paths) : 0.0;
    result.push_back({j * grid.spacing, mean, std_error});
  }
  return result;
}

}  // namespace kppvar
