// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>

#include "sdon/error.hpp"
#include "sdon/inverse.hpp"

using namespace sdon;

namespace {

// Stand-in forward model: |load| scaled, like a stress magnitude.
PopulationMap synthetic_map(std::size_t steps) {
  return [steps](const std::vector<std::vector<double>>& pop) {
    std::vector<std::vector<double>> out;
    for (const auto& g : pop) {
      std::vector<double> h = genome_to_load(g, steps, 1.0);
      for (double& x : h) x = 40.0 * std::abs(x);
      out.push_back(std::move(h));
    }
    return out;
  };
}

std::vector<double> target_for(const std::vector<double>& genome, std::size_t steps) {
  return synthetic_map(steps)({genome}).front();
}

}  // namespace

TEST(MeanStress, HandValues) {
  // [N x S x C] with N = 2, S = 2, C = 2; component 1 holds stress.
  const Tensor f({2, 2, 2}, std::vector<double>{0, 1, 0, 5, 0, 3, 0, 7});
  EXPECT_EQ(mean_stress_history(f, 1), (std::vector<double>{2.0, 6.0}));
  const Tensor one({1, 3, 1}, std::vector<double>{4, 5, 6});
  EXPECT_EQ(mean_stress_history(one, 0), (std::vector<double>{4, 5, 6}));
  EXPECT_THROW(mean_stress_history(f, 2), InvalidArgument);
}

TEST(Fitness, GuardAndOffset) {
  const std::vector<double> t{1.0, 2.0, 3.0};
  EXPECT_NEAR(fitness_from_histories(t, t), 1e12, 1e-3);
  EXPECT_NEAR(fitness_from_histories(std::vector<double>{3.0, 4.0, 5.0}, t), 0.5, 1e-12);
  EXPECT_THROW(fitness_from_histories(std::vector<double>{1.0}, t), ShapeError);
}

TEST(GenomeToLoad, StartsAtZeroAndHitsControls) {
  const std::vector<double> g{1.0, -2.0, 3.0, 0.5, 4.0};
  const std::vector<double> load = genome_to_load(g, 5, 1.0);
  ASSERT_EQ(load.size(), 5u);
  // Snapshots at t = 0.2 k coincide with the control times.
  for (std::size_t k = 0; k < 5; ++k) EXPECT_NEAR(load[k], g[k], 1e-12);
  EXPECT_THROW(genome_to_load(std::vector<double>{1.0, 2.0}, 5, 1.0), InvalidArgument);
}

TEST(Ga, HistoryMonotoneBoundedAndSized) {
  GaConfig cfg;
  cfg.seed = 3;
  const std::vector<double> known{2.0, -1.0, 4.0, -3.0, 1.5};
  const GaResult r = run_ga(synthetic_map(20), target_for(known, 20), cfg);
  ASSERT_EQ(r.history.size(), 25u);
  for (std::size_t g = 1; g < r.history.size(); ++g) {
    EXPECT_GE(r.history[g].best, r.history[g - 1].best);
    EXPECT_LE(r.history[g].mean, r.history[g].best);
  }
  EXPECT_EQ(r.best_fitness, r.history.back().best);
  ASSERT_EQ(r.final_population.size(), 100u);
  for (const auto& genome : r.final_population) {
    ASSERT_EQ(genome.size(), kGenes);
    for (std::size_t i = 0; i < kGenes; ++i) {
      EXPECT_GE(genome[i], cfg.lo[i]);
      EXPECT_LE(genome[i], cfg.hi[i]);
    }
  }
}

TEST(Ga, RecoversStressHistory) {
  GaConfig cfg;
  cfg.seed = 4;
  const std::vector<double> known{2.0, -1.0, 4.0, -3.0, 1.5};
  const auto target = target_for(known, 20);
  const GaResult r = run_ga(synthetic_map(20), target, cfg);
  const auto best = synthetic_map(20)({r.best_genome}).front();
  double mae = 0.0, scale = 0.0;
  for (std::size_t s = 0; s < 20; ++s) {
    mae += std::abs(best[s] - target[s]) / 20.0;
    scale += std::abs(target[s]) / 20.0;
  }
  // Much better than the initial random population.
  EXPECT_LT(mae, 0.1 * scale);
  EXPECT_GT(r.best_fitness, 5.0 * r.history.front().best);
}

TEST(Ga, Deterministic) {
  GaConfig cfg;
  cfg.seed = 5;
  cfg.generations = 5;
  const auto target = target_for({1, 1, 1, 1, 1}, 10);
  const GaResult a = run_ga(synthetic_map(10), target, cfg);
  const GaResult b = run_ga(synthetic_map(10), target, cfg);
  EXPECT_EQ(a.best_genome, b.best_genome);
  EXPECT_EQ(a.best_fitness, b.best_fitness);
  EXPECT_EQ(a.final_population, b.final_population);
}

TEST(Ga, ConfigValidation) {
  GaConfig cfg;
  cfg.parents_mating = 1;
  EXPECT_THROW(cfg.validate(), InvalidArgument);
  cfg = GaConfig{};
  cfg.elitism = 100;
  EXPECT_THROW(cfg.validate(), InvalidArgument);
  cfg = GaConfig{};
  cfg.lo[2] = 6.0;
  EXPECT_THROW(cfg.validate(), InvalidArgument);
}
