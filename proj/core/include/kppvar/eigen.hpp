// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "kppvar/grid.hpp"
#include "kppvar/shear.hpp"

namespace kppvar {

/// Symmetric tridiagonal discretization of the cross-sectional operator
///
///   kappa * d^2/dy^2 + [kappa lambda^2 + lambda delta b(y) + f'(0)]
///
/// with Neumann ends, on the shear's grid.  The boundary rows come from the
/// second-order ghost-node closure (phi_{-1} = phi_1), which is asymmetric
/// (off-diagonal 2 kappa/h^2 at the corners); the diagonal similarity that
/// scales the first and last components by sqrt(2) restores symmetry without
/// moving the spectrum.  Off-diagonals are therefore sqrt(2) kappa/h^2 at the
/// ends and kappa/h^2 inside.
struct TridiagonalOperator {
  std::vector<double> diag;     // nodes entries
  std::vector<double> offdiag;  // nodes-1 entries, symmetrized
  Grid grid;
  double lambda = 0.0;
  double delta = 0.0;
  double f_prime0 = 0.0;
  double kappa = 1.0;

  /// Potential value at node i: diag[i] + 2 kappa / h^2.
  double potential(int i) const {
    const double h = grid.spacing;
    return diag[i] + 2.0 * kappa / (h * h);
  }
};

TridiagonalOperator assemble_operator(const ShearPath& shear, double lambda, double delta,
                                      double f_prime0, double kappa = 1.0);

/// Principal (largest) eigenpair.  phi is the physical eigenfunction, i.e.
/// the symmetric eigenvector with its end components scaled back by sqrt(2),
/// strictly positive and normalized so the maximum entry is +1.
struct EigenResult {
  double mu = 0.0;
  std::vector<double> phi;
  double residual = 0.0;  // max-norm of A phi - mu phi in the physical rows
  int iterations = 0;
};

/// Largest eigenvalue by Sturm-count bisection, eigenvector by inverse
/// iteration with a shift just above the spectrum (the shifted matrix is
/// negative definite, so the unpivoted LDL^T factorization is safe).  A
/// two-sided recurrence from the ends toward the potential peak recovers the
/// eigenvector when extreme localization drives inverse iteration's far-field
/// components into roundoff.
EigenResult principal_eigenpair(const TridiagonalOperator& op);

}  // namespace kppvar
