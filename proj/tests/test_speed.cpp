// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <numbers>
#include <vector>

#include <doctest.h>

#include "kppvar/errors.hpp"
#include "kppvar/speed.hpp"
#include "support/oracles.hpp"

using namespace kppvar;

namespace {

constexpr double kPi = std::numbers::pi;

ShearPath zero_shear(int nodes) {
  return ShearPath::from_values(Grid::uniform(1.0, nodes), std::vector<double>(nodes, 0.0));
}

ShearPath constant_shear(int nodes, double value) {
  return ShearPath::from_values(Grid::uniform(1.0, nodes),
                                std::vector<double>(nodes, value));
}

ShearPath cosine_shear(int nodes) {
  const Grid g = Grid::uniform(1.0, nodes);
  std::vector<double> values(nodes);
  for (int i = 0; i < nodes; ++i) values[i] = std::cos(2.0 * kPi * g.node(i));
  return ShearPath::from_values(g, std::move(values));
}

ShearPath ou_shear(std::uint64_t index, int nodes = 201) {
  const Grid g = Grid::uniform(1.0, nodes);
  RandomStream stream = realization_stream(777, index);
  return sample_ou_path(OUParams::create(4.0, 4.0, 1.0), g, stream);
}

// Brute-force reference: scan 2000 lambdas over (0, lambda0], then refine
// around the best with golden section down to 1e-11.
double scan_minimum(const ShearPath& shear, double delta, double f_prime0) {
  const double lambda0 = std::sqrt(f_prime0);
  const int count = 2000;
  double best_lambda = lambda0;
  double best = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= count; ++k) {
    const double lambda = lambda0 * k / count;
    const double h = speed_objective(shear, delta, f_prime0, lambda).value;
    if (h < best) {
      best = h;
      best_lambda = lambda;
    }
  }
  double a = std::max(1e-8, best_lambda - lambda0 / count);
  double b = std::min(lambda0, best_lambda + lambda0 / count);
  const double inv_phi = 0.6180339887498949;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = speed_objective(shear, delta, f_prime0, x1).value;
  double f2 = speed_objective(shear, delta, f_prime0, x2).value;
  while (b - a > 1e-11) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = speed_objective(shear, delta, f_prime0, x1).value;
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = speed_objective(shear, delta, f_prime0, x2).value;
    }
  }
  return std::min(f1, f2);
}

}  // namespace

TEST_CASE("zero shear: H(lambda) = lambda + f'(0)/lambda closed form") {
  const auto shear = zero_shear(101);
  for (double lambda : {0.3, 0.5, 1.0, 1.7}) {
    const auto obj = speed_objective(shear, 0.7, 1.0, lambda);
    CHECK(obj.value == doctest::Approx(lambda + 1.0 / lambda).epsilon(1e-12));
    CHECK(obj.derivative ==
          doctest::Approx(1.0 - 1.0 / (lambda * lambda)).epsilon(1e-9).scale(1.0));
  }
  CHECK(speed_objective(shear, 0.0, 1.0, 0.5).derivative == doctest::Approx(-3.0).epsilon(1e-10));
}

TEST_CASE("analytic H' matches a centered finite difference") {
  const auto shear = ou_shear(0, 101);
  const double step = 1e-5;
  for (double lambda : {0.4, 0.8, 1.0}) {
    const auto obj = speed_objective(shear, 1.0, 1.0, lambda);
    const double plus = speed_objective(shear, 1.0, 1.0, lambda + step).value;
    const double minus = speed_objective(shear, 1.0, 1.0, lambda - step).value;
    const double fd = (plus - minus) / (2.0 * step);
    CHECK(std::abs(obj.derivative - fd) <= 1e-6);
  }
}

TEST_CASE("zero shear minimal speed: c0 = 2 sqrt(f'(0)) at lambda0") {
  const auto shear = zero_shear(201);
  const auto result = minimal_speed(shear, 0.0, 1.0);
  CHECK(result.c_star == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(result.lambda_star == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(result.converged);
  CHECK(!result.fallback_used);
  CHECK(result.c_star == result.mu_star / result.lambda_star);

  const auto scaled = minimal_speed(shear, 0.0, 2.25);
  CHECK(scaled.c_star == doctest::Approx(3.0).epsilon(1e-10));
  CHECK(scaled.lambda_star == doctest::Approx(1.5).epsilon(1e-8));
}

TEST_CASE("constant shear shifts the speed by exactly delta times the constant") {
  for (double c : {0.7, -0.7}) {
    const auto result = minimal_speed(constant_shear(101, c), 1.0, 1.0);
    CHECK(result.c_star == doctest::Approx(2.0 + c).epsilon(1e-12));
    CHECK(std::abs(std::abs(result.c_star - 2.0) - std::abs(c)) <= 1e-12);
  }
}

TEST_CASE("cosine shear reproduces the small-amplitude expansion") {
  const auto shear = cosine_shear(501);
  const double delta = 0.1;
  const auto result = minimal_speed(shear, delta, 1.0);
  const double expected = 2.0 + delta * delta / (8.0 * kPi * kPi);
  CHECK(std::abs(result.c_star - expected) <= 5e-6);
}

TEST_CASE("scan oracle: Newton result matches a refined dense scan") {
  for (std::uint64_t i = 0; i < 50; ++i) {
    const auto shear = ou_shear(i);
    const double delta = (i % 2 == 0) ? 1.0 : 5.0;
    const auto result = minimal_speed(shear, delta, 1.0);
    const double reference = scan_minimum(shear, delta, 1.0);
    CHECK(std::abs(result.c_star - reference) <= 1e-8);
  }
}

TEST_CASE("accepted Newton iterates are monotone in H") {
  const auto shear = ou_shear(3);
  std::vector<SpeedTracePoint> trace;
  const auto result = minimal_speed(shear, 2.0, 1.0, {}, &trace);
  CHECK(result.converged);
  REQUIRE(trace.size() >= 2);
  for (std::size_t k = 1; k < trace.size(); ++k)
    CHECK(trace[k].objective <=
          trace[k - 1].objective + 1e-13 * (std::abs(trace[k - 1].objective) + 1.0));
}

TEST_CASE("minimizer stays inside the bracket") {
  for (std::uint64_t i = 0; i < 20; ++i) {
    const auto shear = ou_shear(100 + i, 101);
    for (double delta : {0.5, 10.0}) {
      const auto result = minimal_speed(shear, delta, 1.0);
      CHECK(result.lambda_star > 0.0);
      CHECK(result.lambda_star <= 1.0 * (1.0 + 1e-8));
      CHECK(result.c_star == result.mu_star / result.lambda_star);
    }
  }
}

TEST_CASE("mean-zero shear always enhances the speed") {
  for (std::uint64_t i = 0; i < 20; ++i) {
    const auto raw = ou_shear(200 + i, 101);
    const auto mean_zero = ShearPath::from_values(raw.grid, raw.fluctuation);
    const auto result = minimal_speed(mean_zero, 1.0, 1.0);
    CHECK(result.c_star >= 2.0 - 1e-10);
  }
}

TEST_CASE("mean decomposition: c*(b) = c*(b1) + delta * b_mean") {
  for (std::uint64_t i = 0; i < 10; ++i) {
    const auto raw = ou_shear(300 + i, 101);
    const auto mean_zero = ShearPath::from_values(raw.grid, raw.fluctuation);
    const double delta = 1.5;
    const double full = minimal_speed(raw, delta, 1.0).c_star;
    const double fluct = minimal_speed(mean_zero, delta, 1.0).c_star;
    CHECK(full - (fluct + delta * raw.mean) == doctest::Approx(0.0).scale(1.0).epsilon(1e-10));
  }
}

TEST_CASE("golden-section fallback agrees with Newton") {
  const auto shear = ou_shear(4);
  SpeedOptions newton_opts;
  const auto newton = minimal_speed(shear, 1.0, 1.0, newton_opts);
  SpeedOptions forced;
  forced.max_newton_iterations = 0;  // golden section from the start
  const auto golden = minimal_speed(shear, 1.0, 1.0, forced);
  CHECK(golden.fallback_used);
  CHECK(golden.converged);
  CHECK(!newton.fallback_used);
  CHECK(golden.c_star == doctest::Approx(newton.c_star).epsilon(1e-9));
}

TEST_CASE("invalid arguments are rejected") {
  const auto shear = zero_shear(11);
  CHECK_THROWS_AS(minimal_speed(shear, 1.0, 0.0), ParameterError);
  CHECK_THROWS_AS(minimal_speed(shear, 1.0, -1.0), ParameterError);
}
