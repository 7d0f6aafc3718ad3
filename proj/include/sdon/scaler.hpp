// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "sdon/tensor.hpp"

namespace sdon {

enum class ScalerKind {
  kStepMaxAbs,  // scale[s,c] = max |field| over cases and nodes, output in [-1,1]
  kMaxAbs,      // scale[s,c] = max |field| over cases, steps and nodes, output in [-1,1]
  kMinMax,      // per component over everything, output in [0,1]
};

std::string_view to_string(ScalerKind kind);
ScalerKind scaler_kind_from_string(std::string_view name);

/// Output-field scaler. Operates on tensors whose trailing three axes are
/// [step, node, component].
struct FieldScaler {
  static constexpr double kEpsilon = 1e-8;

  ScalerKind kind = ScalerKind::kStepMaxAbs;
  std::size_t steps = 0;
  std::size_t components = 0;
  std::vector<double> scale;  // [S x C], max-abs kinds
  std::vector<double> lo;     // [C], min-max
  std::vector<double> hi;     // [C], min-max
  bool fitted = false;

  friend bool operator==(const FieldScaler&, const FieldScaler&) = default;
};

FieldScaler fit_scaler(const Tensor& fields, ScalerKind kind);
// Throws InvalidArgument for an unfitted scaler or mismatching trailing shape.
void apply_scaler(const FieldScaler& scaler, Tensor& fields);
void invert_scaler(const FieldScaler& scaler, Tensor& fields);

// Raw-buffer forms for [S x N x C] blocks (several blocks back to back).
void apply_scaler(const FieldScaler& scaler, std::span<double> data, std::size_t nodes);
void invert_scaler(const FieldScaler& scaler, std::span<double> data, std::size_t nodes);

/// Branch input scaling: one max-abs factor over all loads.
struct LoadScaler {
  double scale = 1.0;
  friend bool operator==(const LoadScaler&, const LoadScaler&) = default;
};

LoadScaler fit_load_scaler(std::span<const double> loads);

/// Trunk input scaling onto [-1, 1] per axis.
struct CoordBox {
  double lo[2] = {0.0, 0.0};
  double hi[2] = {1.0, 1.0};
  friend bool operator==(const CoordBox&, const CoordBox&) = default;
};

CoordBox fit_coord_box(const Tensor& coords);
Tensor normalize_coords(const CoordBox& box, const Tensor& coords);

}  // namespace sdon
