// SPDX-License-Identifier: Apache-2.0
#include "sdon/inverse.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sdon/error.hpp"
#include "sdon/metrics.hpp"
#include "sdon/random.hpp"

namespace sdon {

void GaConfig::validate() const {
  if (population < parents_mating || parents_mating < 2) {
    throw InvalidArgument("ga: need population >= parents_mating >= 2");
  }
  if (elitism >= population) throw InvalidArgument("ga: elitism must be smaller than the population");
  if (lo.size() != kGenes || hi.size() != kGenes) {
    throw InvalidArgument("ga: gene bounds must have " + std::to_string(kGenes) + " entries");
  }
  for (std::size_t g = 0; g < kGenes; ++g) {
    if (!(lo[g] <= hi[g])) throw InvalidArgument("ga: gene bound lo > hi");
  }
  if (!(mutation_fraction >= 0.0 && mutation_fraction <= 1.0)) {
    throw InvalidArgument("ga: mutation_fraction must lie in [0, 1]");
  }
  if (!(mutation_scale >= 0.0)) throw InvalidArgument("ga: mutation_scale must be non-negative");
}

std::vector<double> mean_stress_history(const Tensor& fields, std::size_t component) {
  if (fields.rank() != 3) throw ShapeError("mean_stress_history: expected [N x S x C]");
  if (component >= fields.dim(2)) throw InvalidArgument("mean_stress_history: component index out of range");
  const std::size_t n = fields.dim(0);
  const std::size_t steps = fields.dim(1);
  std::vector<double> out(steps, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t s = 0; s < steps; ++s) out[s] += fields.at({i, s, component});
  }
  for (double& v : out) v /= static_cast<double>(n);
  return out;
}

double fitness_from_histories(std::span<const double> predicted, std::span<const double> target) {
  return 1.0 / (mae(predicted, target) + kFitnessGuard);
}

std::vector<double> genome_to_load(std::span<const double> genome, std::size_t steps, double t_total) {
  if (genome.size() != kGenes) throw InvalidArgument("genome must have " + std::to_string(kGenes) + " genes");
  std::array<double, kControlPoints> values{};
  std::copy(genome.begin(), genome.end(), values.begin() + 1);
  return make_profile(ControlPoints::uniform(t_total, values), steps, t_total).samples;
}

PopulationMap surrogate_map(const Surrogate& s, const Tensor& coords, std::size_t component) {
  const std::size_t steps = s.model.config().steps;
  if (component >= s.model.config().components) throw InvalidArgument("ga: stress component out of range");
  return [&s, coords, component, steps](const std::vector<std::vector<double>>& genomes) {
    Tensor loads({genomes.size(), steps});
    for (std::size_t k = 0; k < genomes.size(); ++k) {
      const auto load = genome_to_load(genomes[k], steps, s.t_total);
      std::copy(load.begin(), load.end(), loads.data().begin() + static_cast<std::ptrdiff_t>(k * steps));
    }
    const Tensor pred = s.predict(loads, coords);  // [b x S x N x C]
    const std::size_t n = pred.dim(2);
    const std::size_t comps = pred.dim(3);
    std::vector<std::vector<double>> out(genomes.size(), std::vector<double>(steps, 0.0));
    for (std::size_t k = 0; k < genomes.size(); ++k) {
      for (std::size_t st = 0; st < steps; ++st) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) acc += pred[((k * steps + st) * n + i) * comps + component];
        out[k][st] = acc / static_cast<double>(n);
      }
    }
    return out;
  };
}

double fitness(const Surrogate& s, const Tensor& coords, std::span<const double> genome,
               std::span<const double> target, std::size_t component) {
  if (target.size() != s.model.config().steps) throw ShapeError("ga: target length does not match S");
  const auto pred = surrogate_map(s, coords, component)({std::vector<double>(genome.begin(), genome.end())});
  return fitness_from_histories(pred.front(), target);
}

namespace {

std::vector<double> evaluate(const PopulationMap& forward, const std::vector<std::vector<double>>& pop,
                             std::span<const double> target) {
  const auto histories = forward(pop);
  if (histories.size() != pop.size()) throw ShapeError("ga: forward map returned the wrong number of histories");
  std::vector<double> fit(pop.size());
  for (std::size_t k = 0; k < pop.size(); ++k) fit[k] = fitness_from_histories(histories[k], target);
  return fit;
}

// Indices sorted by descending fitness; ties keep population order.
std::vector<std::size_t> ranking(const std::vector<double>& fit) {
  std::vector<std::size_t> idx(fit.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return fit[a] > fit[b]; });
  return idx;
}

}  // namespace

GaResult run_ga(const PopulationMap& forward, std::span<const double> target, const GaConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  std::vector<std::vector<double>> pop(cfg.population, std::vector<double>(kGenes));
  for (auto& g : pop) {
    for (std::size_t j = 0; j < kGenes; ++j) g[j] = rng.uniform(cfg.lo[j], cfg.hi[j]);
  }
  std::vector<double> fit = evaluate(forward, pop, target);

  GaResult res;
  for (std::size_t gen = 1; gen <= cfg.generations; ++gen) {
    const auto order = ranking(fit);
    std::vector<std::vector<double>> next;
    next.reserve(cfg.population);
    std::vector<double> elite_fit;
    for (std::size_t e = 0; e < cfg.elitism; ++e) {
      next.push_back(pop[order[e]]);
      elite_fit.push_back(fit[order[e]]);
    }

    std::size_t pair = 0;
    while (next.size() < cfg.population) {
      const auto& a = pop[order[pair % cfg.parents_mating]];
      const auto& b = pop[order[(pair + 1) % cfg.parents_mating]];
      ++pair;
      const std::size_t cut = 1 + rng.index(kGenes - 1);
      std::vector<double> child(kGenes);
      for (std::size_t j = 0; j < kGenes; ++j) child[j] = j < cut ? a[j] : b[j];
      for (std::size_t j = 0; j < kGenes; ++j) {
        if (rng.uniform() >= cfg.mutation_fraction) continue;
        const double half = cfg.mutation_scale * (cfg.hi[j] - cfg.lo[j]);
        child[j] = std::clamp(child[j] + rng.uniform(-half, half), cfg.lo[j], cfg.hi[j]);
      }
      next.push_back(std::move(child));
    }
    // Elites keep their fitness; only the children are evaluated.
    std::vector<std::vector<double>> children(next.begin() + static_cast<std::ptrdiff_t>(cfg.elitism), next.end());
    fit = elite_fit;
    const auto child_fit = evaluate(forward, children, target);
    fit.insert(fit.end(), child_fit.begin(), child_fit.end());
    pop = std::move(next);

    const auto best = std::max_element(fit.begin(), fit.end());
    res.history.push_back({gen, *best, std::accumulate(fit.begin(), fit.end(), 0.0) / static_cast<double>(fit.size())});
  }

  const auto order = ranking(fit);
  res.best_genome = pop[order.front()];
  res.best_fitness = fit[order.front()];
  res.final_population = pop;
  return res;
}

}  // namespace sdon
