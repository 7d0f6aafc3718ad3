// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "sdon/dataset.hpp"
#include "sdon/nn.hpp"
#include "sdon/sdeeponet.hpp"
#include "sdon/surrogate.hpp"

namespace sdon {

/// One "epoch" is one optimizer step on one mini-batch.
struct TrainConfig {
  std::size_t epochs = 1000;
  std::size_t batch_size = 64;
  double lr = 1e-3;
  // Exponential decay from lr to lr * lr_final_factor over the run.
  double lr_final_factor = 1.0;
  std::uint64_t seed = 0;
  double split_fraction = 0.8;
  bool shuffle = true;

  void validate() const;
};

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

// Seeded permutation; the first round(fraction * n) indices train.
Split split_indices(std::size_t n_cases, std::uint64_t seed, double fraction);
std::pair<Dataset, Dataset> split_dataset(const Dataset& ds, std::uint64_t seed, double fraction);

/// Scaled, model-ready copy of a dataset.
struct TrainingSet {
  nn::Matrix loads;            // [cases x S]
  nn::Matrix coords;           // [N x 2]
  std::vector<double> fields;  // [cases x S x N x C]
  std::size_t cases = 0, steps = 0, nodes = 0, components = 0;

  // Per-component [b*S x N] targets for the given cases, rows (case, step).
  std::vector<nn::Matrix> targets(const std::vector<std::size_t>& idx) const;
  nn::Matrix load_rows(const std::vector<std::size_t>& idx) const;
};

TrainingSet make_training_set(const Surrogate& s, const Dataset& ds);

struct TrainResult {
  std::vector<double> loss_curve;  // mini-batch loss before each step
};

double learning_rate(const TrainConfig& cfg, std::size_t epoch);

using TrainCallback = std::function<void(std::size_t epoch, double loss)>;

/// Mini-batch Adam on the scaled MSE. Throws NumericalError on a non-finite
/// loss, naming the epoch.
TrainResult train(SDeepONet& model, const TrainingSet& data, const TrainConfig& cfg,
                  const TrainCallback& on_epoch = {});

}  // namespace sdon
