// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include "oracles.hpp"
#include "sdon/error.hpp"
#include "sdon/random.hpp"
#include "sdon/rbi.hpp"

using namespace sdon;

namespace {

ControlPoints unit_cp(std::array<double, 6> values) { return ControlPoints::uniform(1.0, values); }

std::vector<double> times_of(const ControlPoints& cp) { return {cp.times.begin(), cp.times.end()}; }
std::vector<double> values_of(const ControlPoints& cp) { return {cp.values.begin(), cp.values.end()}; }

}  // namespace

TEST(Rbi, UniformTimes) {
  const auto cp = ControlPoints::uniform(2.0, {0, 1, 2, 3, 4, 5});
  for (std::size_t i = 0; i < 6; ++i) EXPECT_DOUBLE_EQ(cp.times[i], 0.4 * static_cast<double>(i));
}

TEST(Rbi, ZeroValuesGiveZeroInterpolant) {
  const auto f = fit_rbi(unit_cp({0, 0, 0, 0, 0, 0}));
  for (double w : f.rbf_weights) EXPECT_EQ(w, 0.0);
  EXPECT_EQ(f.poly_coeffs[0], 0.0);
  EXPECT_EQ(f.poly_coeffs[1], 0.0);
  for (double t : {0.0, 0.13, 0.5, 0.99, 1.0}) EXPECT_EQ(f(t), 0.0);
}

TEST(Rbi, LinearDataReproducedExactly) {
  const auto cp = unit_cp({0, 0.4, 0.8, 1.2, 1.6, 2.0});
  const auto f = fit_rbi(cp);
  for (double t = 0.0; t <= 1.0; t += 0.01) EXPECT_NEAR(f(t), 2.0 * t, 1e-10);
}

TEST(Rbi, ConstantDataReproduced) {
  ControlPoints cp = unit_cp({3.5, 3.5, 3.5, 3.5, 3.5, 3.5});
  const auto f = fit_rbi(cp);
  for (double t = 0.0; t <= 1.0; t += 0.05) EXPECT_NEAR(f(t), 3.5, 1e-10);
}

TEST(Rbi, MatchesDenseSolveOracle) {
  const auto cp = unit_cp({0, 1, 0, -1, 0, 1});
  const auto f = fit_rbi(cp);
  std::vector<double> query = times_of(cp);
  for (std::size_t i = 0; i + 1 < 6; ++i) query.push_back(0.5 * (cp.times[i] + cp.times[i + 1]));
  const auto expected = oracle::rbf_cubic(times_of(cp), values_of(cp), query);
  const auto got = eval_rbi(f, query);
  for (std::size_t i = 0; i < query.size(); ++i) EXPECT_NEAR(got[i], expected[i], 1e-10) << "t=" << query[i];
  for (std::size_t i = 0; i < 6; ++i) EXPECT_NEAR(got[i], cp.values[i], 1e-10);
}

TEST(Rbi, DuplicateOrUnsortedTimesRejected) {
  ControlPoints cp = unit_cp({0, 1, 2, 3, 4, 5});
  cp.times[3] = cp.times[2];
  EXPECT_THROW(fit_rbi(cp), InvalidArgument);
  cp = unit_cp({0, 1, 2, 3, 4, 5});
  std::swap(cp.times[1], cp.times[2]);
  EXPECT_THROW(fit_rbi(cp), InvalidArgument);
}

TEST(Rbi, ExtrapolationRejected) {
  const auto f = fit_rbi(unit_cp({0, 1, 0, -1, 0, 1}));
  const std::vector<double> below{-0.01};
  const std::vector<double> above{1.01};
  EXPECT_THROW(eval_rbi(f, below), InvalidArgument);
  EXPECT_THROW(eval_rbi(f, above), InvalidArgument);
}

TEST(RbiProperty, InterpolatesEverySampledProfile) {
  const auto profiles = sample_profiles(42, 200, -2.0, 2.0, 25, 2.0);
  for (const auto& p : profiles) {
    const auto f = fit_rbi(p.control);
    for (std::size_t i = 0; i < 6; ++i) ASSERT_NEAR(f(p.control.times[i]), p.control.values[i], 1e-10);
  }
}

TEST(RbiProperty, AffineDataReproducedAtRandomPoints) {
  Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const double a = rng.uniform(-3, 3);
    const double b = rng.uniform(-3, 3);
    const double T = rng.uniform(0.5, 5.0);
    std::array<double, 6> v{};
    for (std::size_t i = 0; i < 6; ++i) v[i] = a + b * T * static_cast<double>(i) / 5.0;
    const auto f = fit_rbi(ControlPoints::uniform(T, v));
    for (int k = 0; k < 100; ++k) {
      const double t = rng.uniform(0.0, T);
      ASSERT_NEAR(f(t), a + b * t, 1e-9);
    }
  }
}

TEST(RbiSampling, DeterministicAndBounded) {
  const auto a = sample_profiles(9, 20, -5.5, 5.5, 40, 1.0);
  const auto b = sample_profiles(9, 20, -5.5, 5.5, 40, 1.0);
  ASSERT_EQ(a.size(), 20u);
  for (std::size_t k = 0; k < a.size(); ++k) {
    EXPECT_EQ(a[k].samples, b[k].samples);
    EXPECT_EQ(a[k].control.values, b[k].control.values);
    EXPECT_EQ(a[k].samples.size(), 40u);
    EXPECT_EQ(a[k].control.values[0], 0.0);
    for (std::size_t i = 1; i < 6; ++i) {
      EXPECT_GE(a[k].control.values[i], -5.5);
      EXPECT_LE(a[k].control.values[i], 5.5);
    }
  }
  const auto c = sample_profiles(10, 20, -5.5, 5.5, 40, 1.0);
  EXPECT_NE(a[0].control.values, c[0].control.values);
}

TEST(RbiSampling, SamplesAtSnapshotTimes) {
  const auto times = output_times(25, 2.0);
  ASSERT_EQ(times.size(), 25u);
  EXPECT_DOUBLE_EQ(times.front(), 0.08);
  EXPECT_DOUBLE_EQ(times.back(), 2.0);
  const auto p = sample_profiles(3, 1, -2, 2, 25, 2.0).front();
  const auto direct = eval_rbi(fit_rbi(p.control), times);
  EXPECT_EQ(p.samples, direct);
}

TEST(RbiSampling, PreconditionsChecked) {
  EXPECT_THROW(sample_profiles(1, 3, 2.0, -2.0, 25, 1.0), InvalidArgument);
  EXPECT_THROW(sample_profiles(1, 0, -2.0, 2.0, 25, 1.0), InvalidArgument);
}
