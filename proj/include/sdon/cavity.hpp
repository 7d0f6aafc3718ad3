// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "sdon/rbi.hpp"
#include "sdon/tensor.hpp"

namespace sdon::cavity {

/// Uniform collocated grid. Node (i, j) sits at x = i*dx, y = j*dy and is
/// stored at index j*nx + i (rows run along x, y-major). Row j = ny-1 is
/// the lid.
struct Grid {
  std::size_t nx = 121;
  std::size_t ny = 41;
  double lx = 3.0;
  double ly = 1.0;

  double dx() const { return lx / static_cast<double>(nx - 1); }
  double dy() const { return ly / static_cast<double>(ny - 1); }
  std::size_t nodes() const { return nx * ny; }
  std::size_t index(std::size_t i, std::size_t j) const { return j * nx + i; }
};

struct PoissonMode {
  enum class Kind { kFixed, kTolerance };
  Kind kind = Kind::kFixed;
  std::size_t iterations = 50;  // sweeps in fixed mode
  double tolerance = 1e-6;      // relative residual in tolerance mode
  std::size_t max_iterations = 100000;

  static PoissonMode fixed(std::size_t sweeps) {
    return {Kind::kFixed, sweeps, 0.0, sweeps};
  }
  static PoissonMode until(double tol, std::size_t max_iter) {
    return {Kind::kTolerance, 0, tol, max_iter};
  }
};

struct Params {
  Grid grid;
  double rho = 1.0;
  double mu = 0.1;
  double dt = 2e-4;
  std::size_t n_steps = 10000;
  std::size_t n_snapshots = 25;
  PoissonMode poisson;

  double t_total() const { return dt * static_cast<double>(n_steps); }
  void validate() const;
};

struct FlowState {
  Grid grid;
  std::vector<double> u, v, p;
  double t = 0.0;
  std::size_t step = 0;

  static FlowState zeros(const Grid& grid);
};

struct PoissonResult {
  double residual = 0.0;  // relative residual ||lap p - rhs|| / ||rhs||
  std::size_t sweeps = 0;
};

struct StepDiagnostics {
  std::size_t step = 0;
  double cfl = 0.0;
  double divergence = 0.0;
  double poisson_residual = 0.0;
};

// No-slip walls, lid moving at lid_u along y = Ly. Interior untouched.
void apply_velocity_bcs(FlowState& state, double lid_u);

// p = 0 on the lid, zero normal derivative on the other three walls.
void apply_pressure_bcs(const Grid& grid, std::vector<double>& p);

/// Jacobi iteration for lap(p) = rhs on the interior, warm-started from p.
/// Tolerance mode throws NumericalError when max_iterations is exhausted.
PoissonResult solve_pressure_poisson(const Grid& grid, std::vector<double>& p,
                                     const std::vector<double>& rhs,
                                     const PoissonMode& mode);

double poisson_residual(const Grid& grid, const std::vector<double>& p,
                        const std::vector<double>& rhs);

/// One explicit projection step: provisional velocity from central
/// advection and diffusion, pressure solve, correction by -(dt/rho) grad p,
/// boundary conditions. Throws NumericalError on non-finite values.
PoissonResult step(FlowState& state, double lid_u, const Params& params);

// L2 norm of the central-difference divergence over interior nodes.
double divergence_norm(const FlowState& state);

struct CaseResult {
  Tensor snapshots;  // [S x N x 3], components P, u, v
  std::vector<StepDiagnostics> diagnostics;  // one per snapshot
};

using LidFunction = std::function<double(double)>;

CaseResult run_case(const LidFunction& lid, const Params& params);

/// Drives the lid with the profile's interpolant evaluated at every step.
CaseResult run_cavity_case(const LoadProfile& profile, const Params& params);

// Node coordinates [N x 2] in storage order.
Tensor coordinates(const Grid& grid);

}  // namespace sdon::cavity
