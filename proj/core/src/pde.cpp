// SPDX-License-Identifier: Apache-2.0
#include "kppvar/pde.hpp"

#include <algorithm>
#include <cmath>

#include "kppvar/errors.hpp"

namespace kppvar {

Nonlinearity Nonlinearity::kpp() { return Nonlinearity{ReactionKind::kpp, 0.3, 0.25}; }

Nonlinearity Nonlinearity::combustion(double ignition) {
  if (!(ignition > 0.0 && ignition < 1.0))
    throw ParameterError("Nonlinearity: combustion cutoff must lie in (0, 1)");
  return Nonlinearity{ReactionKind::combustion, ignition, 0.25};
}

Nonlinearity Nonlinearity::bistable(double unstable_zero) {
  if (!(unstable_zero > 0.0 && unstable_zero < 0.5))
    throw ParameterError("Nonlinearity: bistable root must lie in (0, 1/2)");
  return Nonlinearity{ReactionKind::bistable, 0.3, unstable_zero};
}

double Nonlinearity::value(double u) const {
  switch (kind) {
    case ReactionKind::kpp:
      return u * (1.0 - u);
    case ReactionKind::combustion:
      return u > ignition ? (u - ignition) * (1.0 - u) : 0.0;
    case ReactionKind::bistable:
      return u * (1.0 - u) * (u - unstable_zero);
  }
  return 0.0;
}

double Nonlinearity::f_prime0() const {
  switch (kind) {
    case ReactionKind::kpp:
      return 1.0;
    case ReactionKind::combustion:
      return 0.0;
    case ReactionKind::bistable:
      return -unstable_zero;
  }
  return 0.0;
}

namespace {

constexpr double kSafety = 0.9;

void check_cfl(const FrontState& state, double dt) {
  const double dy = state.cross_section.spacing;
  const double diff_limit =
      kSafety * std::min(state.dx * state.dx, dy * dy) / (4.0 * state.kappa);
  if (dt > diff_limit) throw SimulationError("step: diffusive CFL violated");
  double w_max = 0.0;
  for (double b : state.shear) w_max = std::max(w_max, std::abs(state.delta * b));
  if (w_max > 0.0) {
    if (dt * w_max / state.dx > kSafety)
      throw SimulationError("step: advective Courant number above limit");
    if (dt > kSafety * 2.0 * state.kappa / (w_max * w_max))
      throw SimulationError("step: advective-diffusive stability limit violated");
  }
}

template <ReactionKind Kind>
double reaction(double u, const Nonlinearity& nl) {
  if constexpr (Kind == ReactionKind::kpp) return u * (1.0 - u);
  if constexpr (Kind == ReactionKind::combustion)
    return u > nl.ignition ? (u - nl.ignition) * (1.0 - u) : 0.0;
  if constexpr (Kind == ReactionKind::bistable)
    return u * (1.0 - u) * (u - nl.unstable_zero);
  return 0.0;
}

// Semi-discrete rate kappa (u_xx + u_yy) + w u_x + f(u) for the field
// `u` on the state's geometry; zero on the fixed Dirichlet columns.
template <ReactionKind Kind>
void compute_rate(const FrontState& state, const std::vector<double>& u,
                  const Nonlinearity& nl, std::vector<double>& rate) {
  const int nx = state.nx;
  const int ny = state.cross_section.nodes;
  const double inv_dx2 = 1.0 / (state.dx * state.dx);
  const double dy = state.cross_section.spacing;
  const double inv_dy2 = 1.0 / (dy * dy);
  const double inv_2dx = 0.5 / state.dx;
  const double kappa = state.kappa;

  for (int iy = 0; iy < ny; ++iy) {
    const double w = state.delta * state.shear[iy];
    const double* row = &u[static_cast<std::size_t>(iy) * nx];
    const double* up = &u[static_cast<std::size_t>(iy == ny - 1 ? iy - 1 : iy + 1) * nx];
    const double* down = &u[static_cast<std::size_t>(iy == 0 ? iy + 1 : iy - 1) * nx];
    double* out = &rate[static_cast<std::size_t>(iy) * nx];

    out[0] = 0.0;
    out[nx - 1] = 0.0;

    const auto rate_at = [&](int ix, double ux) {
      const double v = row[ix];
      const double uxx = (row[ix - 1] - 2.0 * v + row[ix + 1]) * inv_dx2;
      const double uyy = (down[ix] - 2.0 * v + up[ix]) * inv_dy2;
      out[ix] = kappa * (uxx + uyy) + w * ux + reaction<Kind>(v, nl);
    };

    if (w >= 0.0) {
      // Wind carries information from the right: forward one-sided stencil.
      for (int ix = 1; ix < nx - 2; ++ix)
        rate_at(ix, (-3.0 * row[ix] + 4.0 * row[ix + 1] - row[ix + 2]) * inv_2dx);
      rate_at(nx - 2,
              (-3.0 * row[nx - 2] + 4.0 * row[nx - 1] - state.right_value) * inv_2dx);
    } else {
      rate_at(1, (3.0 * row[1] - 4.0 * row[0] + state.left_value) * inv_2dx);
      for (int ix = 2; ix < nx - 1; ++ix)
        rate_at(ix, (3.0 * row[ix] - 4.0 * row[ix - 1] + row[ix - 2]) * inv_2dx);
    }
  }
}

// Heun step (explicit two-stage, second order in time) with both the
// predictor and the final value clipped to the invariant region [0, 1].
template <ReactionKind Kind>
void step_impl(FrontState& state, const Nonlinearity& nl, double dt) {
  static thread_local std::vector<double> rate1, predictor, rate2;
  const std::size_t size = state.field.size();
  rate1.resize(size);
  predictor.resize(size);
  rate2.resize(size);

  compute_rate<Kind>(state, state.field, nl, rate1);
  for (std::size_t i = 0; i < size; ++i)
    predictor[i] = std::clamp(state.field[i] + dt * rate1[i], 0.0, 1.0);
  compute_rate<Kind>(state, predictor, nl, rate2);
  for (std::size_t i = 0; i < size; ++i)
    state.field[i] =
        std::clamp(state.field[i] + 0.5 * dt * (rate1[i] + rate2[i]), 0.0, 1.0);
}

}  // namespace

void step(FrontState& state, const Nonlinearity& nl, double dt) {
  check_cfl(state, dt);
  switch (nl.kind) {
    case ReactionKind::kpp:
      step_impl<ReactionKind::kpp>(state, nl, dt);
      break;
    case ReactionKind::combustion:
      step_impl<ReactionKind::combustion>(state, nl, dt);
      break;
    case ReactionKind::bistable:
      step_impl<ReactionKind::bistable>(state, nl, dt);
      break;
  }
  state.time += dt;
}

double front_position(const FrontState& state) {
  const int nx = state.nx;
  const int ny = state.cross_section.nodes;

  std::vector<double> profile(nx, 0.0);
  for (int iy = 0; iy < ny; ++iy) {
    const double weight = (iy == 0 || iy == ny - 1) ? 0.5 : 1.0;  // trapezoid in y
    const double* row = &state.field[static_cast<std::size_t>(iy) * nx];
    for (int ix = 0; ix < nx; ++ix) profile[ix] += weight * row[ix];
  }
  const double norm = 1.0 / (ny - 1);
  for (double& v : profile) v *= norm;

  for (int ix = nx - 2; ix >= 0; --ix) {
    if (profile[ix] >= 0.5 && profile[ix + 1] < 0.5) {
      const double t = (profile[ix] - 0.5) / (profile[ix] - profile[ix + 1]);
      return state.x_left + (ix + t) * state.dx;
    }
  }
  throw SimulationError("front_position: profile does not cross 1/2 (front lost)");
}

namespace {

FrontState make_front_state(const ShearPath& shear, double delta, const PdeParams& params) {
  FrontState state;
  state.cross_section = shear.grid;
  state.dx = params.dx;
  state.nx = static_cast<int>(std::lround(params.window_length / params.dx)) + 1;
  state.x_left = 0.0;
  state.kappa = params.kappa;
  state.delta = delta;
  // Mirrored orientation: see simulate_front's contract.
  state.shear.resize(shear.values.size());
  for (std::size_t i = 0; i < shear.values.size(); ++i) state.shear[i] = -shear.values[i];

  const int ny = state.cross_section.nodes;
  state.field.resize(static_cast<std::size_t>(ny) * state.nx);
  const double x0 = 0.4 * params.window_length;
  for (int ix = 0; ix < state.nx; ++ix) {
    const double x = ix * params.dx;
    const double u = 0.5 * (1.0 - std::tanh((x - x0) / params.init_front_width));
    for (int iy = 0; iy < ny; ++iy) state.at(iy, ix) = u;
  }
  for (int iy = 0; iy < ny; ++iy) {
    state.at(iy, 0) = state.left_value;
    state.at(iy, state.nx - 1) = state.right_value;
  }
  return state;
}

// Moves the window by `cells` grid cells (positive: rightward, filling the
// fresh right side with the ahead value; negative: leftward, filling the
// fresh left side with the behind value).
void shift_window(FrontState& state, int cells) {
  const int nx = state.nx;
  const int ny = state.cross_section.nodes;
  for (int iy = 0; iy < ny; ++iy) {
    double* row = &state.field[static_cast<std::size_t>(iy) * nx];
    if (cells > 0) {
      for (int ix = 0; ix < nx - cells; ++ix) row[ix] = row[ix + cells];
      for (int ix = nx - cells; ix < nx; ++ix) row[ix] = state.right_value;
    } else {
      for (int ix = nx - 1; ix >= -cells; --ix) row[ix] = row[ix + cells];
      for (int ix = 0; ix < -cells; ++ix) row[ix] = state.left_value;
    }
    row[0] = state.left_value;
    row[nx - 1] = state.right_value;
  }
  state.x_left += cells * state.dx;
}

}  // namespace

FrontTrajectory simulate_front(const ShearPath& shear, double delta, const Nonlinearity& nl,
                               const PdeParams& params) {
  FrontState state = make_front_state(shear, delta, params);
  const double dy = state.cross_section.spacing;

  // Subdivide the nominal step when a rough realization tightens the CFL.
  double w_max = 0.0;
  for (double b : state.shear) w_max = std::max(w_max, std::abs(delta * b));
  double dt_limit =
      kSafety * std::min(params.dx * params.dx, dy * dy) / (4.0 * params.kappa);
  if (w_max > 0.0) {
    dt_limit = std::min(dt_limit, kSafety * params.dx / w_max);
    dt_limit = std::min(dt_limit, kSafety * 2.0 * params.kappa / (w_max * w_max));
  }
  const int subdivide = std::max(1, static_cast<int>(std::ceil(params.dt / dt_limit)));
  const double dt = params.dt / subdivide;

  const auto total_steps = static_cast<long>(std::llround(params.t_final / dt));
  const double window = params.window_length;

  FrontTrajectory traj;
  traj.dt_used = dt;
  traj.times.push_back(0.0);
  traj.positions.push_back(front_position(state));

  for (long n = 1; n <= total_steps; ++n) {
    step(state, nl, dt);
    if (n % params.record_stride == 0 || n == total_steps) {
      const double x_f = front_position(state);
      traj.times.push_back(state.time);
      traj.positions.push_back(x_f);
      const double offset = x_f - state.x_left;
      if (offset > 0.55 * window || offset < 0.25 * window) {
        const int cells = static_cast<int>(std::lround((offset - 0.4 * window) / state.dx));
        if (cells != 0 && std::abs(cells) < state.nx - 2) shift_window(state, cells);
      }
    }
  }

  // Least-squares speed over the trailing portion of the trajectory.
  const std::size_t total = traj.times.size();
  const auto first = static_cast<std::size_t>((1.0 - params.fit_fraction) * total);
  const std::size_t count = total - first;
  if (count < 10) throw SimulationError("simulate_front: too few records for a speed fit");

  double t_mean = 0.0, x_mean = 0.0;
  for (std::size_t i = first; i < total; ++i) {
    t_mean += traj.times[i];
    x_mean += traj.positions[i];
  }
  t_mean /= count;
  x_mean /= count;
  double stt = 0.0, stx = 0.0;
  for (std::size_t i = first; i < total; ++i) {
    stt += (traj.times[i] - t_mean) * (traj.times[i] - t_mean);
    stx += (traj.times[i] - t_mean) * (traj.positions[i] - x_mean);
  }
  traj.speed = stx / stt;
  double ss = 0.0;
  for (std::size_t i = first; i < total; ++i) {
    const double e = traj.positions[i] - (x_mean + traj.speed * (traj.times[i] - t_mean));
    ss += e * e;
  }
  traj.fit_residual = std::sqrt(ss / count);
  if (traj.fit_residual > params.max_fit_residual)
    throw SimulationError("simulate_front: speed fit residual " +
                          std::to_string(traj.fit_residual) + " above threshold");
  return traj;
}

}  // namespace kppvar
