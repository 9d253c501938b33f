// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <numbers>
#include <vector>

#include <doctest.h>

#include "kppvar/eigen.hpp"
#include "kppvar/errors.hpp"
#include "kppvar/random.hpp"
#include "support/oracles.hpp"

using namespace kppvar;

namespace {

constexpr double kPi = std::numbers::pi;

ShearPath cosine_shear(int nodes, double length = 1.0) {
  const Grid g = Grid::uniform(length, nodes);
  std::vector<double> values(nodes);
  for (int i = 0; i < nodes; ++i) values[i] = std::cos(2.0 * kPi * g.node(i) / length);
  return ShearPath::from_values(g, std::move(values));
}

ShearPath random_shear(int nodes, std::uint64_t seed, double scale = 1.0) {
  const Grid g = Grid::uniform(1.0, nodes);
  RandomStream stream(seed);
  std::vector<double> values(nodes);
  for (double& v : values) v = scale * stream.normal();
  return ShearPath::from_values(g, std::move(values));
}

ShearPath zero_shear(int nodes, double length = 1.0) {
  return ShearPath::from_values(Grid::uniform(length, nodes), std::vector<double>(nodes, 0.0));
}

// Dense symmetric matrix corresponding to the tridiagonal operator.
std::vector<std::vector<double>> dense_matrix(const TridiagonalOperator& op) {
  const int m = op.grid.nodes;
  std::vector<std::vector<double>> a(m, std::vector<double>(m, 0.0));
  for (int i = 0; i < m; ++i) a[i][i] = op.diag[i];
  for (int i = 0; i + 1 < m; ++i) a[i][i + 1] = a[i + 1][i] = op.offdiag[i];
  return a;
}

}  // namespace

TEST_CASE("constant shear: constant eigenfunction is exact") {
  const auto shear = zero_shear(3);
  const auto op = assemble_operator(shear, 1.0, 1.0, 1.0);
  const auto eig = principal_eigenpair(op);
  CHECK(eig.mu == doctest::Approx(2.0).epsilon(1e-12));
  for (double v : eig.phi) CHECK(v == doctest::Approx(1.0).epsilon(1e-10));

  const auto fine = zero_shear(201);
  const auto fine_eig = principal_eigenpair(assemble_operator(fine, 1.0, 1.0, 1.0));
  CHECK(fine_eig.mu == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(fine_eig.residual <= 1e-10 * (std::abs(fine_eig.mu) + 1.0));
}

TEST_CASE("kappa scales the zero-shear eigenvalue") {
  const auto shear = zero_shear(101);
  const double kappa = 0.025;
  const double lambda = 3.0;
  const auto eig = principal_eigenpair(assemble_operator(shear, lambda, 0.7, 1.0, kappa));
  CHECK(eig.mu == doctest::Approx(kappa * lambda * lambda + 1.0).epsilon(1e-12));
}

TEST_CASE("diagonal shift identity for a constant added to the shear") {
  const double lambda = 1.3;
  const double delta = 0.8;
  const auto base = random_shear(101, 99);
  auto shifted_values = base.values;
  const double c = 0.61;
  for (double& v : shifted_values) v += c;
  const auto shifted = ShearPath::from_values(base.grid, std::move(shifted_values));

  const double mu0 = principal_eigenpair(assemble_operator(base, lambda, delta, 1.0)).mu;
  const double mu1 = principal_eigenpair(assemble_operator(shifted, lambda, delta, 1.0)).mu;
  CHECK(mu1 - (mu0 + lambda * delta * c) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
}

TEST_CASE("cosine shear: perturbation expansion of the eigenvalue") {
  // mu = lambda^2 + f'(0) + lambda^2 delta^2 k + O(delta^4) for a single
  // cosine (the odd orders vanish by reflection symmetry), k = 1/(8 pi^2).
  const auto shear = cosine_shear(2001);
  const double lambda = 1.0;
  const double delta = 0.01;
  const auto eig = principal_eigenpair(assemble_operator(shear, lambda, delta, 1.0));
  const double k = 1.0 / (8.0 * kPi * kPi);
  const double expected = lambda * lambda + 1.0 + lambda * lambda * delta * delta * k;
  CHECK(eig.mu - expected == doctest::Approx(0.0).scale(1.0).epsilon(1e-10));
}

TEST_CASE("Rayleigh-quotient bounds from the shear range") {
  const double lambda = 0.9;
  const double delta = 2.0;
  const auto shear = random_shear(51, 1234);
  double lo = shear.values[0], hi = shear.values[0];
  for (double v : shear.values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const auto eig = principal_eigenpair(assemble_operator(shear, lambda, delta, 1.0));
  CHECK(eig.mu >= lambda * lambda + 1.0 + lambda * delta * lo - 1e-10);
  CHECK(eig.mu <= lambda * lambda + 1.0 + lambda * delta * hi + 1e-10);
}

TEST_CASE("agreement with a dense Jacobi eigensolver oracle") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto shear = random_shear(21, seed, 1.5);
    const auto op = assemble_operator(shear, 0.7 + 0.1 * seed, 1.1, 1.0);
    const auto eig = principal_eigenpair(op);

    std::vector<std::vector<double>> vectors;
    const auto dense_eigs = oracles::jacobi_eigenvalues(dense_matrix(op), &vectors);
    const double mu_dense = dense_eigs.back();
    CHECK(eig.mu == doctest::Approx(mu_dense).epsilon(1e-12));
    CHECK(std::abs(eig.mu - mu_dense) <= 1e-10 * (std::abs(eig.mu) + 1.0));

    // Compare eigenvectors after undoing the sqrt(2) end scaling and
    // normalizing the oracle the same way.
    const int m = op.grid.nodes;
    std::vector<double> oracle_phi(m);
    for (int i = 0; i < m; ++i) oracle_phi[i] = vectors[i][m - 1];
    oracle_phi.front() *= std::sqrt(2.0);
    oracle_phi.back() *= std::sqrt(2.0);
    double peak = 0.0;
    for (double v : oracle_phi) peak = std::abs(v) > std::abs(peak) ? v : peak;
    for (double& v : oracle_phi) v /= peak;
    for (int i = 0; i < m; ++i)
      CHECK(eig.phi[i] == doctest::Approx(oracle_phi[i]).epsilon(1e-8).scale(1.0));
  }
}

TEST_CASE("eigenfunction positivity, including strong localization") {
  const auto mild = random_shear(201, 7, std::sqrt(2.0));
  const auto eig1 = principal_eigenpair(assemble_operator(mild, 1.0, 1.0, 1.0));
  for (double v : eig1.phi) CHECK(v > 0.0);

  // delta = 50 at kappa = 0.01 drives extreme concentration.
  const auto eig2 = principal_eigenpair(assemble_operator(mild, 1.0, 50.0, 1.0, 0.01));
  for (double v : eig2.phi) CHECK(v > 0.0);
  CHECK(eig2.residual <= 1e-10 * (std::abs(eig2.mu) + 1.0));
}

TEST_CASE("grid convergence of the eigenvalue is second order") {
  const double lambda = 1.0;
  const double delta = 1.0;
  const auto mu_at = [&](int nodes) {
    return principal_eigenpair(assemble_operator(cosine_shear(nodes), lambda, delta, 1.0)).mu;
  };
  const double mu1 = mu_at(51);
  const double mu2 = mu_at(101);
  const double mu3 = mu_at(201);
  const double ratio = (mu1 - mu2) / (mu2 - mu3);
  CHECK(ratio >= 3.5);
  CHECK(ratio <= 4.5);
}

TEST_CASE("eigenvalue is convex in lambda") {
  for (std::uint64_t seed : {11u, 12u, 13u}) {
    const Grid g = Grid::uniform(1.0, 101);
    RandomStream stream = realization_stream(seed, 0);
    const OUParams p = OUParams::create(4.0, 4.0, 1.0);
    const ShearPath shear = sample_ou_path(p, g, stream);
    std::vector<double> lambdas, mus;
    for (int k = 1; k <= 50; ++k) {
      const double lambda = k * (1.0 / 50.0);
      lambdas.push_back(lambda);
      mus.push_back(principal_eigenpair(assemble_operator(shear, lambda, 1.0, 1.0)).mu);
    }
    for (std::size_t k = 2; k < lambdas.size(); ++k) {
      const double d1 = (mus[k - 1] - mus[k - 2]) / (lambdas[k - 1] - lambdas[k - 2]);
      const double d2 = (mus[k] - mus[k - 1]) / (lambdas[k] - lambdas[k - 1]);
      const double second = (d2 - d1) / (lambdas[k] - lambdas[k - 2]);
      CHECK(second >= -1e-9);
    }
  }
}

TEST_CASE("assembly validates its arguments") {
  const auto shear = zero_shear(11);
  CHECK_THROWS_AS(assemble_operator(shear, 0.0, 1.0, 1.0), ParameterError);
  CHECK_THROWS_AS(assemble_operator(shear, -1.0, 1.0, 1.0), ParameterError);
  CHECK_THROWS_AS(assemble_operator(shear, 1.0, 1.0, 1.0, 0.0), ParameterError);
}

TEST_CASE("interior diagonal entries match the stencil") {
  const auto shear = cosine_shear(51);
  const double lambda = 1.7, delta = 0.4, f0 = 1.0;
  const auto op = assemble_operator(shear, lambda, delta, f0);
  const double h = shear.grid.spacing;
  for (int i = 1; i < 50; i += 7) {
    const double expected =
        lambda * lambda + lambda * delta * shear.values[i] + f0 - 2.0 / (h * h);
    CHECK(op.diag[i] == doctest::Approx(expected).epsilon(1e-14));
  }
}
