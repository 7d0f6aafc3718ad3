// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "sdon/tensor.hpp"

namespace sdon {

// Mean of squared differences over all entries.
double mse_loss(std::span<const double> pred, std::span<const double> target);

// ||ref - pred|| / ||ref|| in percent. Throws InvalidArgument for a zero-norm
// reference, where the ratio is undefined.
double rel_l2(std::span<const double> pred, std::span<const double> ref);
double mae(std::span<const double> pred, std::span<const double> ref);
// 1 - SS_res / SS_tot. A constant reference gives 1 when matched exactly and
// 0 otherwise.
double r2(std::span<const double> pred, std::span<const double> ref);

// Like rel_l2 but returns NaN for a (near) zero reference instead of throwing.
double rel_l2_or_nan(std::span<const double> pred, std::span<const double> ref,
                     double min_norm = 1e-12);

struct Aggregates {
  std::vector<double> time_averaged;  // per case (row means)
  std::vector<double> case_averaged;  // per step (column means)
};

/// Row and column means of a [cases x steps] error matrix. NaN entries are
/// skipped; a row or column that is all NaN yields NaN.
Aggregates aggregate_errors(const Tensor& errors);

struct Trend {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;  // 0 when y is constant
};

// Ordinary least squares. Throws for n < 2 or constant x.
Trend linear_trend(std::span<const double> x, std::span<const double> y);

struct ComponentMetrics {
  std::string name;
  double rel_l2 = 0.0;  // percent, pooled over the evaluated set
  double mae = 0.0;
  double r2 = 0.0;
  std::vector<double> time_averaged;  // per case, percent
  std::vector<double> case_averaged;  // per step, percent
  std::size_t undefined = 0;          // (case, step) pairs with a zero reference
  std::optional<Trend> trend;         // time-averaged error vs peak |load|
};

struct EvalReport {
  std::size_t cases = 0;
  std::size_t steps = 0;
  std::size_t nodes = 0;
  std::vector<double> load_magnitude;  // peak |load| per case
  std::vector<ComponentMetrics> components;
};

/// pred and ref in physical units, shape [cases x S x N x C]; loads [cases x S].
EvalReport evaluate(const Tensor& pred, const Tensor& ref, const Tensor& loads,
                    const std::vector<std::string>& component_names);

nlohmann::json to_json(const EvalReport& report);
// Long-format CSV: kind,component,index,value
std::string to_csv(const EvalReport& report);

}  // namespace sdon
