// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <utility>
#include <vector>

#include <doctest.h>

#include "kppvar/ensemble.hpp"
#include "kppvar/errors.hpp"
#include "support/oracles.hpp"

using namespace kppvar;

namespace {

EnsembleConfig small_config() {
  EnsembleConfig config;
  config.ou = OUParams::create(4.0, 4.0, 1.0);
  config.grid = Grid::uniform(1.0, 101);
  config.deltas = {0.1, 0.2, 0.4};
  config.realizations = 64;
  config.master_seed = 31337;
  config.f_prime0 = 1.0;
  config.histogram_bins = 16;
  return config;
}

}  // namespace

TEST_CASE("enhancement sample definition") {
  CHECK(enhancement_sample(2.35, 2.0, 0.5, 0.7) == doctest::Approx(0.0).scale(1.0));
  CHECK(enhancement_sample(2.0, 2.0, 0.5, 0.0) == 0.0);
}

TEST_CASE("constant and zero shears give zero enhancement through the pipeline") {
  const Grid g = Grid::uniform(1.0, 101);
  const double c = 0.8;
  const auto constant = ShearPath::from_values(g, std::vector<double>(101, c));
  const auto speed = minimal_speed(constant, 1.0, 1.0);
  CHECK(std::abs(enhancement_sample(speed.c_star, 2.0, 1.0, constant.mean)) <= 1e-10);

  const auto zero = ShearPath::from_values(g, std::vector<double>(101, 0.0));
  const auto zero_speed = minimal_speed(zero, 1.0, 1.0);
  CHECK(std::abs(enhancement_sample(zero_speed.c_star, 2.0, 1.0, zero.mean)) <= 1e-12);
}

TEST_CASE("mean-zero realizations give strictly positive enhancement") {
  const auto config = small_config();
  const auto result = run_ensemble(config);
  for (const auto& stats : result.per_delta)
    for (double m : stats.samples) CHECK(m > -1e-10);
  // Positivity is strict at these amplitudes.
  CHECK(result.per_delta.back().mean_enhancement > 0.0);
}

TEST_CASE("delta zero is allowed and reproduces c0 exactly") {
  EnsembleConfig config = small_config();
  config.deltas = {0.0};
  config.realizations = 1;
  const auto result = run_ensemble(config);
  CHECK(result.per_delta.front().mean_enhancement == 0.0);
  CHECK(result.c0 == 2.0);
}

TEST_CASE("ensemble runs are deterministic and thread-count independent") {
  EnsembleConfig config = small_config();
  config.threads = 1;
  const auto serial = run_ensemble(config);
  config.threads = 4;
  const auto parallel = run_ensemble(config);
  REQUIRE(serial.per_delta.size() == parallel.per_delta.size());
  for (std::size_t j = 0; j < serial.per_delta.size(); ++j) {
    REQUIRE(serial.per_delta[j].samples.size() == parallel.per_delta[j].samples.size());
    for (std::size_t i = 0; i < serial.per_delta[j].samples.size(); ++i)
      CHECK(serial.per_delta[j].samples[i] == parallel.per_delta[j].samples[i]);
    CHECK(serial.per_delta[j].mean_enhancement == parallel.per_delta[j].mean_enhancement);
  }
}

TEST_CASE("common random numbers: enhancement grows with the amplitude") {
  const auto result = run_ensemble(small_config());
  for (std::size_t i = 0; i < result.records.size(); ++i) {
    const auto& record = result.records[i];
    REQUIRE(!record.failed);
    for (std::size_t j = 1; j < record.c_star.size(); ++j) {
      const double prev = enhancement_sample(record.c_star[j - 1], result.c0,
                                             result.per_delta[j - 1].delta, record.shear_mean);
      const double next = enhancement_sample(record.c_star[j], result.c0,
                                             result.per_delta[j].delta, record.shear_mean);
      CHECK(next >= prev - 1e-12);
    }
  }
  for (std::size_t j = 1; j < result.per_delta.size(); ++j)
    CHECK(result.per_delta[j].mean_enhancement >= result.per_delta[j - 1].mean_enhancement);
}

TEST_CASE("config validation") {
  EnsembleConfig config = small_config();
  config.deltas = {0.2, 0.1};
  CHECK_THROWS_AS(run_ensemble(config), ParameterError);
  config = small_config();
  config.realizations = 0;
  CHECK_THROWS_AS(run_ensemble(config), ParameterError);
  config = small_config();
  config.deltas = {-0.5, 0.1};
  CHECK_THROWS_AS(run_ensemble(config), ParameterError);
}

TEST_CASE("scaling fit recovers exact power laws") {
  std::vector<std::pair<double, double>> quadratic, linear;
  for (double delta : {0.1, 0.2, 0.4, 0.8}) {
    quadratic.emplace_back(delta, 3.0 * delta * delta);
    linear.emplace_back(delta, 0.7 * delta);
  }
  const auto fit2 = fit_scaling_exponent(quadratic);
  CHECK(fit2.exponent == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(fit2.r_squared == doctest::Approx(1.0).epsilon(1e-12));
  const auto fit1 = fit_scaling_exponent(linear);
  CHECK(fit1.exponent == doctest::Approx(1.0).epsilon(1e-12));

  std::vector<std::pair<double, double>> bad{{0.1, 1.0}, {0.2, -1.0}};
  CHECK_THROWS_AS(fit_scaling_exponent(bad), ParameterError);
  std::vector<std::pair<double, double>> single{{0.1, 1.0}};
  CHECK_THROWS_AS(fit_scaling_exponent(single), ParameterError);
}

TEST_CASE("histogram densities integrate to one and match the definition") {
  RandomStream stream(99);
  std::vector<double> samples;
  samples.reserve(100000);
  for (int i = 0; i < 100000; ++i) samples.push_back(stream.uniform01());
  const Pdf pdf = histogram_pdf(samples, 10);
  double integral = 0.0;
  for (std::size_t j = 0; j < pdf.density.size(); ++j) {
    integral += pdf.density[j] * (pdf.edges[j + 1] - pdf.edges[j]);
    // Uniform samples: every density near 1 (law of large numbers).
    CHECK(pdf.density[j] == doctest::Approx(1.0).epsilon(0.05));
  }
  CHECK(std::abs(integral - 1.0) <= 1e-12);
}

TEST_CASE("histogram density equals count over N times width") {
  const std::vector<double> samples{0.0, 0.05, 0.1, 0.1, 0.35, 1.0};
  const Pdf pdf = histogram_pdf(samples, 4);
  const double width = 0.25;
  // Counts per bin: 4, 1, 0, 1.
  CHECK(pdf.density[0] == doctest::Approx(4.0 / (6.0 * width)).epsilon(1e-12));
  CHECK(pdf.density[1] == doctest::Approx(1.0 / (6.0 * width)).epsilon(1e-12));
  CHECK(pdf.density[2] == 0.0);
  CHECK(pdf.density[3] == doctest::Approx(1.0 / (6.0 * width)).epsilon(1e-12));
}

TEST_CASE("degenerate histogram input is rejected") {
  const std::vector<double> same{1.0, 1.0, 1.0};
  CHECK_THROWS_AS(histogram_pdf(same, 8), ParameterError);
  const std::vector<double> two{1.0, 2.0};
  CHECK_THROWS_AS(histogram_pdf(two, 1), ParameterError);
}

TEST_CASE("distribution distance between full and half samples is small") {
  RandomStream stream(123);
  std::vector<double> samples;
  samples.reserve(20000);
  for (int i = 0; i < 20000; ++i) samples.push_back(stream.normal());
  const Pdf full = histogram_pdf(samples, 300);
  const std::span<const double> half(samples.data(), samples.size() / 2);
  const Pdf half_pdf = histogram_pdf(half, full.edges);
  const double d = distribution_distance(full, half_pdf);
  CHECK(d >= 0.0);
  CHECK(d <= 0.10);
  // Distance to itself is zero.
  CHECK(distribution_distance(full, full) == 0.0);
}

TEST_CASE("upper bounds: degenerate closed forms") {
  const Grid g = Grid::uniform(1.0, 51);
  const auto zero = ShearPath::from_values(g, std::vector<double>(51, 0.0));
  const auto chi = solve_cell_problem(g, zero.fluctuation);
  const auto at_one = upper_bounds(zero, chi, 0.0, 1.0, 1.0);
  CHECK(at_one.g1 == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(at_one.g1_sqrt == doctest::Approx(2.0).epsilon(1e-14));
  const auto quarter = upper_bounds(zero, chi, 0.7, 0.25, 1.0);
  CHECK(quarter.g2 == doctest::Approx(2.0 * std::sqrt(0.25)).epsilon(1e-14));
}

TEST_CASE("per-realization dominance at large amplitude (desk preview)") {
  const OUParams p = OUParams::create(4.0, 4.0, 1.0);
  const Grid g = Grid::uniform(1.0, 201);
  SpeedOptions opts;
  opts.kappa = 0.01;
  for (int i = 0; i < 20; ++i) {
    RandomStream stream = realization_stream(4242, i);
    const ShearPath path = sample_ou_path(p, g, stream);
    const ChiField chi = solve_cell_problem(g, path.fluctuation);
    const SpeedResult speed = minimal_speed(path, 50.0, 1.0, opts);
    const SpeedBounds bounds = upper_bounds(path, chi, 50.0, 0.01, 1.0);
    CHECK(speed.c_star <= std::min(bounds.g1, bounds.g2) + 1e-10);
    CHECK(speed.c_star <= std::min(bounds.g1_sqrt, bounds.g2) + 1e-10);
  }
}

TEST_CASE("small ensemble reproduces the quadratic law against the closed form") {
  EnsembleConfig config = small_config();
  config.realizations = 400;
  config.deltas = {0.05, 0.1, 0.2};
  const auto result = run_ensemble(config);
  std::vector<std::pair<double, double>> points;
  for (const auto& stats : result.per_delta)
    points.emplace_back(stats.delta, stats.mean_enhancement);
  const auto fit = fit_scaling_exponent(points);
  CHECK(fit.exponent == doctest::Approx(2.0).epsilon(0.06));

  // Mean enhancement against the closed-form prediction within
  // max(3 SE, 15%).
  const double enh = ou_enhancement_closed_form(4.0, 4.0, 1.0);
  for (const auto& stats : result.per_delta) {
    const double predicted = 0.5 * result.c0 * stats.delta * stats.delta * enh;
    const double tolerance = std::max(3.0 * stats.std_error, 0.15 * predicted);
    CHECK(std::abs(stats.mean_enhancement - predicted) <= tolerance);
  }
}
