// SPDX-License-Identifier: Apache-2.0
#include "sdon/cavity.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sdon/error.hpp"

namespace sdon::cavity {

void Params::validate() const {
  if (grid.nx < 3 || grid.ny < 3) throw InvalidArgument("cavity: grid needs >= 3x3 nodes");
  if (!(grid.lx > 0.0 && grid.ly > 0.0)) throw InvalidArgument("cavity: domain lengths must be positive");
  if (!(dt > 0.0)) throw InvalidArgument("cavity: dt must be positive");
  if (!(rho > 0.0)) throw InvalidArgument("cavity: rho must be positive");
  if (!(mu >= 0.0)) throw InvalidArgument("cavity: mu must be non-negative");
  if (n_snapshots == 0 || n_steps == 0 || n_steps % n_snapshots != 0) {
    throw InvalidArgument("cavity: n_steps must be a positive multiple of n_snapshots");
  }
}

FlowState FlowState::zeros(const Grid& grid) {
  FlowState s;
  s.grid = grid;
  s.u.assign(grid.nodes(), 0.0);
  s.v.assign(grid.nodes(), 0.0);
  s.p.assign(grid.nodes(), 0.0);
  return s;
}

void apply_velocity_bcs(FlowState& state, double lid_u) {
  const Grid& g = state.grid;
  for (std::size_t j = 0; j < g.ny; ++j) {
    for (std::size_t i : {std::size_t{0}, g.nx - 1}) {
      state.u[g.index(i, j)] = 0.0;
      state.v[g.index(i, j)] = 0.0;
    }
  }
  for (std::size_t i = 0; i < g.nx; ++i) {
    state.u[g.index(i, 0)] = 0.0;
    state.v[g.index(i, 0)] = 0.0;
    // The lid row is written last, so the two top corners carry the lid speed.
    state.u[g.index(i, g.ny - 1)] = lid_u;
    state.v[g.index(i, g.ny - 1)] = 0.0;
  }
}

void apply_pressure_bcs(const Grid& g, std::vector<double>& p) {
  for (std::size_t j = 0; j < g.ny; ++j) {
    p[g.index(0, j)] = p[g.index(1, j)];
    p[g.index(g.nx - 1, j)] = p[g.index(g.nx - 2, j)];
  }
  for (std::size_t i = 0; i < g.nx; ++i) {
    p[g.index(i, 0)] = p[g.index(i, 1)];
    p[g.index(i, g.ny - 1)] = 0.0;
  }
}

double poisson_residual(const Grid& g, const std::vector<double>& p,
                        const std::vector<double>& rhs) {
  const double idx2 = 1.0 / (g.dx() * g.dx());
  const double idy2 = 1.0 / (g.dy() * g.dy());
  double res2 = 0.0;
  double rhs2 = 0.0;
  for (std::size_t j = 1; j + 1 < g.ny; ++j) {
    for (std::size_t i = 1; i + 1 < g.nx; ++i) {
      const std::size_t k = g.index(i, j);
      const double lap = (p[k + 1] - 2.0 * p[k] + p[k - 1]) * idx2 +
                         (p[k + g.nx] - 2.0 * p[k] + p[k - g.nx]) * idy2;
      const double r = lap - rhs[k];
      res2 += r * r;
      rhs2 += rhs[k] * rhs[k];
    }
  }
  if (rhs2 == 0.0) return std::sqrt(res2);
  return std::sqrt(res2 / rhs2);
}

PoissonResult solve_pressure_poisson(const Grid& g, std::vector<double>& p,
                                     const std::vector<double>& rhs,
                                     const PoissonMode& mode) {
  const double dx2 = g.dx() * g.dx();
  const double dy2 = g.dy() * g.dy();
  const double denom = 2.0 * (dx2 + dy2);
  const bool until_converged = mode.kind == PoissonMode::Kind::kTolerance;
  const std::size_t limit = until_converged ? mode.max_iterations : mode.iterations;

  double rhs2 = 0.0;
  for (std::size_t j = 1; j + 1 < g.ny; ++j) {
    for (std::size_t i = 1; i + 1 < g.nx; ++i) rhs2 += rhs[g.index(i, j)] * rhs[g.index(i, j)];
  }
  const double rhs_norm = rhs2 > 0.0 ? std::sqrt(rhs2) : 1.0;

  std::vector<double> pn(p.size());
  PoissonResult result;
  for (std::size_t sweep = 0; sweep < limit; ++sweep) {
    pn = p;
    // p_new - p_old is the residual of the old iterate times dx2*dy2/denom,
    // so the convergence check costs nothing extra.
    double upd2 = 0.0;
    for (std::size_t j = 1; j + 1 < g.ny; ++j) {
      for (std::size_t i = 1; i + 1 < g.nx; ++i) {
        const std::size_t k = g.index(i, j);
        p[k] = ((pn[k + 1] + pn[k - 1]) * dy2 + (pn[k + g.nx] + pn[k - g.nx]) * dx2 -
                rhs[k] * dx2 * dy2) /
               denom;
        const double d = p[k] - pn[k];
        upd2 += d * d;
      }
    }
    apply_pressure_bcs(g, p);
    ++result.sweeps;
    if (until_converged) {
      const double old_residual = std::sqrt(upd2) * denom / (dx2 * dy2) / rhs_norm;
      if (old_residual <= mode.tolerance &&
          poisson_residual(g, p, rhs) <= mode.tolerance) {
        break;
      }
    }
  }
  result.residual = poisson_residual(g, p, rhs);
  if (until_converged && result.residual > mode.tolerance) {
    throw NumericalError("cavity: pressure Poisson did not reach tolerance " +
                         std::to_string(mode.tolerance) + " in " +
                         std::to_string(limit) + " sweeps (residual " +
                         std::to_string(result.residual) + ")");
  }
  return result;
}

namespace {

bool all_finite(const std::vector<double>& a) {
  return std::all_of(a.begin(), a.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

PoissonResult step(FlowState& state, double lid_u, const Params& params) {
  const Grid& g = state.grid;
  const double dx = g.dx();
  const double dy = g.dy();
  const double dt = params.dt;
  const double mu = params.mu;
  const double idx2 = 1.0 / (dx * dx);
  const double idy2 = 1.0 / (dy * dy);

  const std::vector<double> un = state.u;
  const std::vector<double> vn = state.v;
  const std::size_t nx = g.nx;

  for (std::size_t j = 1; j + 1 < g.ny; ++j) {
    for (std::size_t i = 1; i + 1 < nx; ++i) {
      const std::size_t k = g.index(i, j);
      const double uc = un[k];
      const double vc = vn[k];
      const double adv_u = uc * (un[k + 1] - un[k - 1]) / (2.0 * dx) +
                           vc * (un[k + nx] - un[k - nx]) / (2.0 * dy);
      const double adv_v = uc * (vn[k + 1] - vn[k - 1]) / (2.0 * dx) +
                           vc * (vn[k + nx] - vn[k - nx]) / (2.0 * dy);
      const double lap_u = (un[k + 1] - 2.0 * uc + un[k - 1]) * idx2 +
                           (un[k + nx] - 2.0 * uc + un[k - nx]) * idy2;
      const double lap_v = (vn[k + 1] - 2.0 * vc + vn[k - 1]) * idx2 +
                           (vn[k + nx] - 2.0 * vc + vn[k - nx]) * idy2;
      state.u[k] = uc + dt * (mu * lap_u - adv_u);
      state.v[k] = vc + dt * (mu * lap_v - adv_v);
    }
  }
  apply_velocity_bcs(state, lid_u);

  std::vector<double> rhs(g.nodes(), 0.0);
  const double scale = params.rho / dt;
  for (std::size_t j = 1; j + 1 < g.ny; ++j) {
    for (std::size_t i = 1; i + 1 < nx; ++i) {
      const std::size_t k = g.index(i, j);
      rhs[k] = scale * ((state.u[k + 1] - state.u[k - 1]) / (2.0 * dx) +
                        (state.v[k + nx] - state.v[k - nx]) / (2.0 * dy));
    }
  }

  const PoissonResult pr = solve_pressure_poisson(g, state.p, rhs, params.poisson);

  const double corr = dt / params.rho;
  const std::vector<double>& p = state.p;
  for (std::size_t j = 1; j + 1 < g.ny; ++j) {
    for (std::size_t i = 1; i + 1 < nx; ++i) {
      const std::size_t k = g.index(i, j);
      state.u[k] -= corr * (p[k + 1] - p[k - 1]) / (2.0 * dx);
      state.v[k] -= corr * (p[k + nx] - p[k - nx]) / (2.0 * dy);
    }
  }
  apply_velocity_bcs(state, lid_u);

  state.t += dt;
  ++state.step;
  if (!all_finite(state.u) || !all_finite(state.v) || !all_finite(state.p)) {
    throw NumericalError("cavity: non-finite field value at step " +
                         std::to_string(state.step));
  }
  return pr;
}

double divergence_norm(const FlowState& state) {
  const Grid& g = state.grid;
  const double dx = g.dx();
  const double dy = g.dy();
  double sum = 0.0;
  for (std::size_t j = 1; j + 1 < g.ny; ++j) {
    for (std::size_t i = 1; i + 1 < g.nx; ++i) {
      const std::size_t k = g.index(i, j);
      const double d = (state.u[k + 1] - state.u[k - 1]) / (2.0 * dx) +
                       (state.v[k + g.nx] - state.v[k - g.nx]) / (2.0 * dy);
      sum += d * d;
    }
  }
  return std::sqrt(sum);
}

CaseResult run_case(const LidFunction& lid, const Params& params) {
  params.validate();
  const Grid& g = params.grid;
  const std::size_t n = g.nodes();
  const std::size_t stride = params.n_steps / params.n_snapshots;

  CaseResult result;
  result.snapshots = Tensor({params.n_snapshots, n, 3});
  result.diagnostics.reserve(params.n_snapshots);
  auto out = result.snapshots.data();

  FlowState state = FlowState::zeros(g);
  std::size_t snap = 0;
  for (std::size_t k = 1; k <= params.n_steps; ++k) {
    const double t = params.dt * static_cast<double>(k);
    const PoissonResult pr = step(state, lid(t), params);
    if (k % stride != 0) continue;

    double umax = 0.0;
    for (double x : state.u) umax = std::max(umax, std::abs(x));
    result.diagnostics.push_back(
        {k, params.dt * umax / g.dx(), divergence_norm(state), pr.residual});

    double* dst = out.data() + snap * n * 3;
    for (std::size_t node = 0; node < n; ++node) {
      dst[3 * node + 0] = state.p[node];
      dst[3 * node + 1] = state.u[node];
      dst[3 * node + 2] = state.v[node];
    }
    ++snap;
  }
  return result;
}

CaseResult run_cavity_case(const LoadProfile& profile, const Params& params) {
  params.validate();
  const double t_end = profile.control.times.back();
  if (std::abs(t_end - params.t_total()) > 1e-9 * std::max(1.0, t_end)) {
    throw InvalidArgument("cavity: load profile spans [0, " + std::to_string(t_end) +
                          "] but the run lasts " + std::to_string(params.t_total()));
  }
  const RbiInterpolant interp = fit_rbi(profile.control);
  const double lo = interp.centers.front();
  const double hi = interp.centers.back();
  return run_case(
      [&interp, lo, hi](double t) { return interp(std::clamp(t, lo, hi)); },
      params);
}

Tensor coordinates(const Grid& g) {
  Tensor c({g.nodes(), 2});
  for (std::size_t j = 0; j < g.ny; ++j) {
    for (std::size_t i = 0; i < g.nx; ++i) {
      const std::size_t k = g.index(i, j);
      c[2 * k] = g.dx() * static_cast<double>(i);
      c[2 * k + 1] = g.dy() * static_cast<double>(j);
    }
  }
  return c;
}

}  // namespace sdon::cavity
