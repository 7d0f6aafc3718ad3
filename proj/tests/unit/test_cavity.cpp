// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>

#include "cavity_reference.hpp"
#include "sdon/cavity.hpp"
#include "sdon/error.hpp"
#include "sdon/random.hpp"

using namespace sdon;
using namespace sdon::cavity;

namespace {

using oracle::Field;
using oracle::ref_jacobi;
using oracle::ref_step;
using oracle::to_2d;

using oracle::max_abs_diff;

Params small_params(std::size_t nx, std::size_t ny, std::size_t sweeps = 50) {
  Params p;
  p.grid = Grid{nx, ny, 3.0, 1.0};
  p.dt = 1e-3;
  p.n_steps = 100;
  p.n_snapshots = 10;
  p.poisson = PoissonMode::fixed(sweeps);
  return p;
}

FlowState random_state(const Grid& g, std::uint64_t seed, double lid) {
  FlowState s = FlowState::zeros(g);
  Rng rng(seed);
  for (auto* f : {&s.u, &s.v, &s.p}) {
    for (double& x : *f) x = rng.uniform(-0.5, 0.5);
  }
  apply_velocity_bcs(s, lid);
  apply_pressure_bcs(g, s.p);
  return s;
}

// x-mirror; u changes sign.
FlowState mirrored(const FlowState& s) {
  FlowState m = s;
  const Grid& g = s.grid;
  for (std::size_t j = 0; j < g.ny; ++j) {
    for (std::size_t i = 0; i < g.nx; ++i) {
      const std::size_t a = g.index(i, j);
      const std::size_t b = g.index(g.nx - 1 - i, j);
      m.u[a] = -s.u[b];
      m.v[a] = s.v[b];
      m.p[a] = s.p[b];
    }
  }
  return m;
}

}  // namespace

TEST(CavityBcs, LidRowAndWalls) {
  const Grid g{7, 5, 3.0, 1.0};
  FlowState s = FlowState::zeros(g);
  for (double& x : s.u) x = 9.0;
  for (double& x : s.v) x = 9.0;
  apply_velocity_bcs(s, 1.5);
  for (std::size_t i = 0; i < g.nx; ++i) {
    EXPECT_EQ(s.u[g.index(i, g.ny - 1)], 1.5);
    EXPECT_EQ(s.v[g.index(i, g.ny - 1)], 0.0);
    EXPECT_EQ(s.u[g.index(i, 0)], 0.0);
    EXPECT_EQ(s.v[g.index(i, 0)], 0.0);
  }
  for (std::size_t j = 0; j + 1 < g.ny; ++j) {
    EXPECT_EQ(s.u[g.index(0, j)], 0.0);
    EXPECT_EQ(s.u[g.index(g.nx - 1, j)], 0.0);
  }
  for (std::size_t j = 1; j + 1 < g.ny; ++j) {
    for (std::size_t i = 1; i + 1 < g.nx; ++i) {
      EXPECT_EQ(s.u[g.index(i, j)], 9.0);
      EXPECT_EQ(s.v[g.index(i, j)], 9.0);
    }
  }
}

TEST(CavityBcs, ZeroLidZeroBoundary) {
  const Grid g{6, 4, 3.0, 1.0};
  FlowState s = FlowState::zeros(g);
  apply_velocity_bcs(s, 0.0);
  for (double x : s.u) EXPECT_EQ(x, 0.0);
}

TEST(CavityPoisson, ZeroRhsStaysZero) {
  const Grid g{9, 7, 3.0, 1.0};
  std::vector<double> p(g.nodes(), 0.0);
  const std::vector<double> rhs(g.nodes(), 0.0);
  const auto r = solve_pressure_poisson(g, p, rhs, PoissonMode::fixed(50));
  for (double x : p) EXPECT_EQ(x, 0.0);
  EXPECT_EQ(r.residual, 0.0);
}

TEST(CavityPoisson, FiveByFiveMatchesReferenceJacobi) {
  const Grid g{5, 5, 1.0, 1.0};
  std::vector<double> p(g.nodes(), 0.0);
  std::vector<double> rhs(g.nodes(), 0.0);
  rhs[g.index(2, 2)] = 1.0;
  solve_pressure_poisson(g, p, rhs, PoissonMode::fixed(10));

  Field pr(5, std::vector<double>(5, 0.0));
  Field b(5, std::vector<double>(5, 0.0));
  b[2][2] = 1.0;
  ref_jacobi(pr, b, g.dx(), g.dy(), 10);
  EXPECT_LE(max_abs_diff(to_2d(g, p), pr), 1e-14);
  EXPECT_NE(p[g.index(2, 2)], 0.0);
}

TEST(CavityPoisson, MirrorSymmetricRhsGivesSymmetricPressure) {
  const Grid g{21, 11, 3.0, 1.0};
  std::vector<double> rhs(g.nodes(), 0.0);
  Rng rng(4);
  for (std::size_t j = 1; j + 1 < g.ny; ++j) {
    for (std::size_t i = 1; i <= g.nx / 2; ++i) {
      const double v = rng.uniform(-1, 1);
      rhs[g.index(i, j)] = v;
      rhs[g.index(g.nx - 1 - i, j)] = v;
    }
  }
  std::vector<double> p(g.nodes(), 0.0);
  solve_pressure_poisson(g, p, rhs, PoissonMode::fixed(200));
  for (std::size_t j = 0; j < g.ny; ++j) {
    for (std::size_t i = 0; i < g.nx; ++i) {
      EXPECT_NEAR(p[g.index(i, j)], p[g.index(g.nx - 1 - i, j)], 1e-12);
    }
  }
}

TEST(CavityPoisson, ToleranceModeConvergesOrThrows) {
  const Grid g{11, 7, 3.0, 1.0};
  std::vector<double> rhs(g.nodes(), 0.0);
  rhs[g.index(5, 3)] = 1.0;
  std::vector<double> p(g.nodes(), 0.0);
  const auto r = solve_pressure_poisson(g, p, rhs, PoissonMode::until(1e-8, 100000));
  EXPECT_LE(r.residual, 1e-8);
  EXPECT_LE(poisson_residual(g, p, rhs), 1e-8);

  std::vector<double> q(g.nodes(), 0.0);
  EXPECT_THROW(solve_pressure_poisson(g, q, rhs, PoissonMode::until(1e-12, 3)), NumericalError);
}

TEST(CavityStep, ZeroLidKeepsZeroState) {
  Params prm = small_params(9, 7);
  FlowState s = FlowState::zeros(prm.grid);
  for (int k = 0; k < 20; ++k) step(s, 0.0, prm);
  for (double x : s.u) EXPECT_EQ(x, 0.0);
  for (double x : s.v) EXPECT_EQ(x, 0.0);
  for (double x : s.p) EXPECT_EQ(x, 0.0);
  EXPECT_EQ(s.step, 20u);
  EXPECT_DOUBLE_EQ(s.t, 20 * prm.dt);
}

TEST(CavityStep, SingleStepFromZeroMatchesReference) {
  Params prm = small_params(5, 5);
  prm.grid = Grid{5, 5, 1.0, 1.0};
  FlowState s = FlowState::zeros(prm.grid);
  step(s, 1.0, prm);

  Field u(5, std::vector<double>(5, 0.0)), v = u, p = u;
  ref_step(u, v, p, 1.0, prm.grid.dx(), prm.grid.dy(), prm.dt, prm.rho, prm.mu, 50);
  EXPECT_LE(max_abs_diff(to_2d(prm.grid, s.u), u), 1e-14);
  EXPECT_LE(max_abs_diff(to_2d(prm.grid, s.v), v), 1e-14);
  EXPECT_LE(max_abs_diff(to_2d(prm.grid, s.p), p), 1e-14);
}

TEST(CavityStep, RandomStateStepMatchesReference) {
  Params prm = small_params(5, 5);
  prm.grid = Grid{5, 5, 1.0, 1.0};
  FlowState s = random_state(prm.grid, 12, 0.7);
  Field u = to_2d(prm.grid, s.u), v = to_2d(prm.grid, s.v), p = to_2d(prm.grid, s.p);
  step(s, 0.7, prm);
  ref_step(u, v, p, 0.7, prm.grid.dx(), prm.grid.dy(), prm.dt, prm.rho, prm.mu, 50);
  EXPECT_LE(max_abs_diff(to_2d(prm.grid, s.u), u), 1e-14);
  EXPECT_LE(max_abs_diff(to_2d(prm.grid, s.v), v), 1e-14);
  EXPECT_LE(max_abs_diff(to_2d(prm.grid, s.p), p), 1e-14);
}

TEST(CavityStep, WithoutPressureSweepsOnlyRowsNextToLidChange) {
  // With zero sweeps the update is purely local. The lid row is written at
  // the end of a step, so from rest the second step reaches only the row
  // below the lid.
  Params prm = small_params(9, 7, 0);
  FlowState s = FlowState::zeros(prm.grid);
  step(s, 1.0, prm);
  for (std::size_t j = 0; j + 1 < prm.grid.ny; ++j) {
    EXPECT_EQ(s.u[prm.grid.index(4, j)], 0.0);
  }
  step(s, 1.0, prm);
  const Grid& g = prm.grid;
  for (std::size_t j = 1; j + 2 < g.ny; ++j) {
    for (std::size_t i = 0; i < g.nx; ++i) {
      EXPECT_EQ(s.u[g.index(i, j)], 0.0) << i << "," << j;
      EXPECT_EQ(s.v[g.index(i, j)], 0.0) << i << "," << j;
    }
  }
  EXPECT_NE(s.u[g.index(4, g.ny - 2)], 0.0);
}

TEST(CavityStep, MirrorReflectionProperty) {
  Params prm = small_params(13, 7);
  FlowState a = random_state(prm.grid, 3, 0.8);
  FlowState b = mirrored(a);
  step(a, 0.8, prm);
  step(b, -0.8, prm);
  const FlowState am = mirrored(a);
  for (std::size_t k = 0; k < a.u.size(); ++k) {
    EXPECT_NEAR(am.u[k], b.u[k], 1e-12);
    EXPECT_NEAR(am.v[k], b.v[k], 1e-12);
    EXPECT_NEAR(am.p[k], b.p[k], 1e-12);
  }
}

TEST(CavityStep, NonFiniteStateRaises) {
  Params prm = small_params(9, 7);
  FlowState s = FlowState::zeros(prm.grid);
  s.u[prm.grid.index(4, 3)] = std::nan("");
  EXPECT_THROW(step(s, 1.0, prm), NumericalError);
}

TEST(CavityDivergence, AnalyticFields) {
  const Grid g{31, 11, 3.0, 1.0};
  FlowState s = FlowState::zeros(g);
  EXPECT_EQ(divergence_norm(s), 0.0);
  const Tensor xy = coordinates(g);
  for (std::size_t k = 0; k < g.nodes(); ++k) {
    s.u[k] = xy[2 * k];
    s.v[k] = -xy[2 * k + 1];
  }
  EXPECT_LE(divergence_norm(s), 1e-12);
  for (std::size_t k = 0; k < g.nodes(); ++k) s.v[k] = 0.0;
  const double interior = static_cast<double>((g.nx - 2) * (g.ny - 2));
  EXPECT_NEAR(divergence_norm(s), std::sqrt(interior), 1e-10);
}

TEST(CavityRun, ZeroProfileGivesZeroSnapshots) {
  Params prm = small_params(9, 7);
  const auto profile = make_profile(ControlPoints::uniform(prm.t_total(), {0, 0, 0, 0, 0, 0}), 10, prm.t_total());
  const CaseResult r = run_cavity_case(profile, prm);
  ASSERT_EQ(r.snapshots.shape(), (Shape{10, 63, 3}));
  for (double x : r.snapshots.data()) EXPECT_EQ(x, 0.0);
}

TEST(CavityRun, SnapshotLayoutAndDiagnostics) {
  Params prm = small_params(9, 7);
  const auto profile = sample_profiles(5, 1, -2, 2, 10, prm.t_total()).front();
  const CaseResult r = run_cavity_case(profile, prm);
  ASSERT_EQ(r.diagnostics.size(), 10u);
  EXPECT_EQ(r.diagnostics.front().step, 10u);
  EXPECT_EQ(r.diagnostics.back().step, 100u);
  // Lid row u matches the interpolated lid speed at each snapshot time.
  const RbiInterpolant f = fit_rbi(profile.control);
  const Grid& g = prm.grid;
  for (std::size_t s = 0; s < 10; ++s) {
    const double t = prm.dt * static_cast<double>(r.diagnostics[s].step);
    EXPECT_NEAR(r.snapshots.at({s, g.index(4, g.ny - 1), 1}), f(t), 1e-12);
    EXPECT_EQ(r.snapshots.at({s, g.index(4, g.ny - 1), 0}), 0.0);  // p = 0 on the lid
  }
}

TEST(CavityRun, MismatchedProfileSpanRejected) {
  Params prm = small_params(9, 7);
  const auto profile = sample_profiles(5, 1, -2, 2, 10, 2.0 * prm.t_total()).front();
  EXPECT_THROW(run_cavity_case(profile, prm), InvalidArgument);
}

TEST(CavityRun, Deterministic) {
  Params prm = small_params(15, 7);
  const auto profile = sample_profiles(8, 1, -2, 2, 10, prm.t_total()).front();
  EXPECT_EQ(run_cavity_case(profile, prm).snapshots, run_cavity_case(profile, prm).snapshots);
}

TEST(CavityRun, ConstantLidApproachesSteadyState) {
  Params prm;
  prm.grid = Grid{61, 21, 3.0, 1.0};
  prm.dt = 1e-3;
  prm.n_steps = 10000;
  prm.n_snapshots = 25;
  const CaseResult r = run_case([](double) { return 1.0; }, prm);
  const std::size_t n = prm.grid.nodes();
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double a = r.snapshots.at({24, k, 1});
    const double b = r.snapshots.at({23, k, 1});
    num += (a - b) * (a - b);
    den += a * a;
  }
  EXPECT_LT(std::sqrt(num / den), 1e-3);
}

TEST(CavityParams, Validation) {
  Params p;
  p.n_steps = 101;
  EXPECT_THROW(p.validate(), InvalidArgument);
  p = Params{};
  p.dt = 0.0;
  EXPECT_THROW(p.validate(), InvalidArgument);
}
