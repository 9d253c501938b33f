// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>

#include "kppvar/errors.hpp"

namespace kppvar {

/// Uniform grid on [0, L]: nodes y_i = i*h, i = 0..nodes-1, h = L/(nodes-1).
struct Grid {
  double length = 0.0;
  int nodes = 0;
  double spacing = 0.0;

  static Grid uniform(double length, int nodes) {
    if (!(length > 0.0)) throw ParameterError("Grid: length must be positive");
    if (nodes < 3) throw ParameterError("Grid: at least 3 nodes required");
    return Grid{length, nodes, length / (nodes - 1)};
  }

  double node(int i) const { return i * spacing; }

  bool same_as(const Grid& other) const {
    return nodes == other.nodes && length == other.length;
  }
};

/// Composite trapezoid rule over the full grid.
inline double trapezoid(const Grid& grid, std::span<const double> values) {
  const int m = grid.nodes;
  double sum = 0.5 * (values[0] + values[m - 1]);
  for (int i = 1; i < m - 1; ++i) sum += values[i];
  return sum * grid.spacing;
}

/// Integral average (1/L) * trapezoid.
inline double trapezoid_mean(const Grid& grid, std::span<const double> values) {
  return trapezoid(grid, values) / grid.length;
}

}  // namespace kppvar
