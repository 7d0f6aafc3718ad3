// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "sdon/error.hpp"
#include "sdon/metrics.hpp"

using namespace sdon;

using V = std::vector<double>;

TEST(Metrics, MseHandValues) {
  EXPECT_EQ(mse_loss(V{1, 2, 3}, V{1, 2, 3}), 0.0);
  EXPECT_NEAR(mse_loss(V{3, 4, 5}, V{1, 2, 3}), 4.0, 1e-12);
  EXPECT_THROW(mse_loss(V{1}, V{1, 2}), ShapeError);
}

TEST(Metrics, IdenticalInputs) {
  const V a{1.0, -2.0, 0.5};
  EXPECT_EQ(rel_l2(a, a), 0.0);
  EXPECT_EQ(mae(a, a), 0.0);
  EXPECT_EQ(r2(a, a), 1.0);
}

TEST(Metrics, HandValues) {
  EXPECT_NEAR(rel_l2(V{0, 0}, V{3, 4}), 100.0, 1e-12);
  EXPECT_NEAR(rel_l2(V{3, 4.5}, V{3, 4}), 100.0 * 0.5 / 5.0, 1e-12);
  EXPECT_NEAR(mae(V{1, 2, 4}, V{1, 2, 3}), 1.0 / 3.0, 1e-12);
  EXPECT_NEAR(r2(V{1, 2, 4}, V{1, 2, 3}), 0.5, 1e-12);
}

TEST(Metrics, ZeroReference) {
  EXPECT_THROW(rel_l2(V{1, 1}, V{0, 0}), InvalidArgument);
  EXPECT_TRUE(std::isnan(rel_l2_or_nan(V{1, 1}, V{0, 0})));
  EXPECT_NEAR(rel_l2_or_nan(V{0, 0}, V{3, 4}), 100.0, 1e-12);
}

TEST(Metrics, ConstantReferenceR2) {
  EXPECT_EQ(r2(V{2, 2}, V{2, 2}), 1.0);
  EXPECT_EQ(r2(V{2, 3}, V{2, 2}), 0.0);
}

TEST(Aggregate, HandValues) {
  const Aggregates a = aggregate_errors(Tensor({2, 2}, V{1, 3, 5, 7}));
  EXPECT_EQ(a.time_averaged, (V{2, 6}));
  EXPECT_EQ(a.case_averaged, (V{3, 5}));

  const Aggregates c = aggregate_errors(Tensor({3, 4}, 2.5));
  for (double x : c.time_averaged) EXPECT_EQ(x, 2.5);
  for (double x : c.case_averaged) EXPECT_EQ(x, 2.5);

  const Aggregates one = aggregate_errors(Tensor({1, 3}, V{1, 2, 6}));
  EXPECT_NEAR(one.time_averaged[0], 3.0, 1e-12);
  EXPECT_EQ(one.case_averaged, (V{1, 2, 6}));
}

TEST(Aggregate, SkipsUndefinedEntries) {
  const double nan = std::nan("");
  const Aggregates a = aggregate_errors(Tensor({2, 2}, V{nan, 3, nan, 7}));
  EXPECT_EQ(a.time_averaged, (V{3, 7}));
  EXPECT_TRUE(std::isnan(a.case_averaged[0]));
  EXPECT_EQ(a.case_averaged[1], 5.0);
}

TEST(Trend, ExactLine) {
  const V x{0, 1, 2, 3, 4};
  V y;
  for (double v : x) y.push_back(2.0 * v + 1.0);
  const Trend t = linear_trend(x, y);
  EXPECT_NEAR(t.slope, 2.0, 1e-12);
  EXPECT_NEAR(t.intercept, 1.0, 1e-12);
  EXPECT_NEAR(t.r2, 1.0, 1e-12);
}

TEST(Trend, ConstantY) {
  const Trend t = linear_trend(V{0, 1, 2}, V{4, 4, 4});
  EXPECT_EQ(t.slope, 0.0);
  EXPECT_EQ(t.intercept, 4.0);
  EXPECT_EQ(t.r2, 0.0);
}

TEST(Trend, NoisyLineMatchesNormalEquations) {
  V x, y;
  for (int i = 0; i < 10; ++i) {
    x.push_back(i);
    y.push_back(i + (i % 2 == 0 ? 1.0 : -1.0));
  }
  double sx = 0, sxx = 0, sy = 0, sxy = 0;
  for (int i = 0; i < 10; ++i) {
    sx += x[i];
    sxx += x[i] * x[i];
    sy += y[i];
    sxy += x[i] * y[i];
  }
  const V sol = oracle::solve_dense({{sxx, sx}, {sx, 10.0}}, {sxy, sy});
  const Trend t = linear_trend(x, y);
  EXPECT_NEAR(t.slope, sol[0], 1e-12);
  EXPECT_NEAR(t.intercept, sol[1], 1e-12);
  EXPECT_GT(t.r2, 0.0);
  EXPECT_LT(t.r2, 1.0);
}

TEST(Trend, DegenerateX) {
  EXPECT_THROW(linear_trend(V{1, 1, 1}, V{1, 2, 3}), InvalidArgument);
  EXPECT_THROW(linear_trend(V{1}, V{1}), InvalidArgument);
}

TEST(Evaluate, PerfectPredictionAndUndefinedSteps) {
  // 2 cases, 2 steps, 2 nodes, 1 component; case 0 step 0 has a zero reference.
  const Tensor ref({2, 2, 2, 1}, V{0, 0, 1, 2, 3, 4, 5, 6});
  const Tensor loads({2, 2}, V{0.5, -1.0, 2.0, 0.0});
  const EvalReport r = evaluate(ref, ref, loads, {"q"});
  ASSERT_EQ(r.components.size(), 1u);
  const ComponentMetrics& m = r.components[0];
  EXPECT_EQ(m.rel_l2, 0.0);
  EXPECT_EQ(m.mae, 0.0);
  EXPECT_EQ(m.r2, 1.0);
  EXPECT_EQ(m.undefined, 1u);
  EXPECT_EQ(r.load_magnitude, (V{1.0, 2.0}));
  ASSERT_TRUE(m.trend.has_value());
  EXPECT_EQ(m.trend->slope, 0.0);

  const nlohmann::json j = to_json(r);
  EXPECT_EQ(j["components"][0]["name"], "q");
  EXPECT_NE(to_csv(r).find("q"), std::string::npos);
}

TEST(Evaluate, PooledErrors) {
  const Tensor ref({1, 1, 2, 2}, V{3, 1, 4, 1});
  const Tensor pred({1, 1, 2, 2}, V{0, 1, 0, 2});
  const EvalReport r = evaluate(pred, ref, Tensor({1, 1}, V{1.0}), {"a", "b"});
  EXPECT_NEAR(r.components[0].rel_l2, 100.0, 1e-12);
  EXPECT_NEAR(r.components[0].mae, 3.5, 1e-12);
  EXPECT_NEAR(r.components[1].rel_l2, 100.0 / std::sqrt(2.0), 1e-12);
  EXPECT_FALSE(r.components[0].trend.has_value());  // one case, no trend
  EXPECT_THROW(evaluate(pred, ref, Tensor({1, 1}, V{1.0}), {"a"}), ShapeError);
}
