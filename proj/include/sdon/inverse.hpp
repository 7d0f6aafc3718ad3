// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "sdon/rbi.hpp"
#include "sdon/surrogate.hpp"
#include "sdon/tensor.hpp"

namespace sdon {

inline constexpr std::size_t kGenes = kControlPoints - 1;  // first control value is fixed at 0
inline constexpr double kFitnessGuard = 1e-12;

struct GaConfig {
  std::size_t generations = 25;
  std::size_t population = 100;
  std::size_t parents_mating = 10;
  std::vector<double> lo = std::vector<double>(kGenes, -5.5);
  std::vector<double> hi = std::vector<double>(kGenes, 5.5);
  double mutation_fraction = 0.2;  // per-gene mutation probability
  double mutation_scale = 0.1;     // noise half-width as a fraction of (hi - lo)
  std::size_t elitism = 1;
  std::uint64_t seed = 0;

  void validate() const;
};

struct GaGeneration {
  std::size_t generation = 0;
  double best = 0.0;
  double mean = 0.0;
};

struct GaResult {
  std::vector<double> best_genome;
  double best_fitness = 0.0;
  std::vector<GaGeneration> history;  // one row per generation
  std::vector<std::vector<double>> final_population;
};

// sigma[s] = mean over nodes of fields[n, s, idx]; fields is [N x S x C].
std::vector<double> mean_stress_history(const Tensor& fields, std::size_t component);

// 1 / (MAE + guard).
double fitness_from_histories(std::span<const double> predicted, std::span<const double> target);

// Control values [0, g1..g5] on uniform times over [0, t_total], sampled at the S snapshot times.
std::vector<double> genome_to_load(std::span<const double> genome, std::size_t steps, double t_total);

/// Maps a population of genomes to their predicted stress histories.
using PopulationMap = std::function<std::vector<std::vector<double>>(const std::vector<std::vector<double>>&)>;

/// Forward map through a surrogate: loads from genomes, one batched
/// prediction, mean over nodes of `component`, physical units.
PopulationMap surrogate_map(const Surrogate& s, const Tensor& coords, std::size_t component);

double fitness(const Surrogate& s, const Tensor& coords, std::span<const double> genome,
               std::span<const double> target, std::size_t component);

/// Steady-state GA: top `parents_mating` parents, single-point crossover,
/// bounded uniform mutation, `elitism` best individuals carried over.
GaResult run_ga(const PopulationMap& forward, std::span<const double> target, const GaConfig& cfg);

}  // namespace sdon
