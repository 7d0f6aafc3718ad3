// SPDX-License-Identifier: Apache-2.0
#include "sdon/training.hpp"

#include <cmath>
#include <numeric>

#include "sdon/error.hpp"
#include "sdon/random.hpp"

namespace sdon {

void TrainConfig::validate() const {
  if (batch_size == 0) throw InvalidArgument("train: batch_size must be positive");
  if (!(lr > 0.0)) throw InvalidArgument("train: lr must be positive");
  if (!(lr_final_factor > 0.0 && lr_final_factor <= 1.0)) {
    throw InvalidArgument("train: lr_final_factor must lie in (0, 1]");
  }
  if (!(split_fraction > 0.0 && split_fraction < 1.0)) {
    throw InvalidArgument("train: split_fraction must lie in (0, 1)");
  }
}

Split split_indices(std::size_t n, std::uint64_t seed, double fraction) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw InvalidArgument("split: fraction must lie in (0, 1)");
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(perm);
  const auto n_train = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
  Split s;
  s.train.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_train));
  s.test.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_train), perm.end());
  return s;
}

std::pair<Dataset, Dataset> split_dataset(const Dataset& ds, std::uint64_t seed, double fraction) {
  const Split s = split_indices(ds.cases(), seed, fraction);
  return {ds.select(s.train), ds.select(s.test)};
}

TrainingSet make_training_set(const Surrogate& s, const Dataset& ds) {
  s.check_compatible(ds);
  TrainingSet t;
  t.cases = ds.cases();
  t.steps = ds.steps();
  t.nodes = ds.nodes();
  t.components = ds.components();
  t.loads = s.scaled_loads(ds.loads);
  t.coords = s.scaled_coords(ds.coords);
  t.fields = ds.fields.storage();
  apply_scaler(s.field_scaler, t.fields, t.nodes);
  return t;
}

std::vector<nn::Matrix> TrainingSet::targets(const std::vector<std::size_t>& idx) const {
  const auto rows = static_cast<Eigen::Index>(idx.size() * steps);
  std::vector<nn::Matrix> out(components, nn::Matrix(rows, static_cast<Eigen::Index>(nodes)));
  for (std::size_t i = 0; i < idx.size(); ++i) {
    for (std::size_t s = 0; s < steps; ++s) {
      const double* src = fields.data() + (idx[i] * steps + s) * nodes * components;
      const auto r = static_cast<Eigen::Index>(i * steps + s);
      for (std::size_t n = 0; n < nodes; ++n) {
        for (std::size_t c = 0; c < components; ++c) out[c](r, static_cast<Eigen::Index>(n)) = src[n * components + c];
      }
    }
  }
  return out;
}

nn::Matrix TrainingSet::load_rows(const std::vector<std::size_t>& idx) const {
  nn::Matrix out(static_cast<Eigen::Index>(idx.size()), loads.cols());
  for (std::size_t i = 0; i < idx.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = loads.row(static_cast<Eigen::Index>(idx[i]));
  return out;
}

double learning_rate(const TrainConfig& cfg, std::size_t epoch) {
  if (cfg.lr_final_factor == 1.0 || cfg.epochs < 2) return cfg.lr;
  const double frac = static_cast<double>(epoch) / static_cast<double>(cfg.epochs - 1);
  return cfg.lr * std::pow(cfg.lr_final_factor, frac);
}

TrainResult train(SDeepONet& model, const TrainingSet& data, const TrainConfig& cfg,
                  const TrainCallback& on_epoch) {
  cfg.validate();
  if (data.cases == 0) throw InvalidArgument("train: empty training set");
  Rng rng(cfg.seed);
  std::vector<std::size_t> order(data.cases);
  std::iota(order.begin(), order.end(), std::size_t{0});
  const std::size_t batch = std::min(cfg.batch_size, data.cases);
  std::size_t cursor = data.cases;  // forces a (re)shuffle on the first step

  SDeepONet grad(model.config());
  const auto params = nn::parameter_list(model);
  const auto grads = nn::parameter_list(grad);
  nn::AdamState adam;
  adam.config.lr = cfg.lr;

  // Full-batch training reuses the same assembled targets every step.
  const bool full = batch == data.cases;
  std::vector<std::size_t> idx;
  std::vector<nn::Matrix> targets;
  nn::Matrix loads;
  if (full) {
    idx = order;
    targets = data.targets(idx);
    loads = data.load_rows(idx);
  }

  TrainResult result;
  result.loss_curve.reserve(cfg.epochs);
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    if (!full) {
      if (cursor + batch > data.cases) {
        if (cfg.shuffle) rng.shuffle(order);
        cursor = 0;
      }
      idx.assign(order.begin() + static_cast<std::ptrdiff_t>(cursor),
                 order.begin() + static_cast<std::ptrdiff_t>(cursor + batch));
      cursor += batch;
      targets = data.targets(idx);
      loads = data.load_rows(idx);
    }
    grad.set_zero();
    const double loss = model.loss_and_grad(loads, data.coords, targets, grad);
    if (!std::isfinite(loss)) {
      throw NumericalError("train: non-finite loss at epoch " + std::to_string(epoch));
    }
    result.loss_curve.push_back(loss);
    if (on_epoch) on_epoch(epoch, loss);
    adam.config.lr = learning_rate(cfg, epoch);
    nn::adam_step(params, grads, adam);
  }
  return result;
}

}  // namespace sdon
