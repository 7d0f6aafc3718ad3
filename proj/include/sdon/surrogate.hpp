// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "sdon/dataset.hpp"
#include "sdon/scaler.hpp"
#include "sdon/sdeeponet.hpp"

namespace sdon {

/// A model together with the transforms that map physical data into its
/// input/output space.
struct Surrogate {
  SDeepONet model{ModelConfig{}};
  FieldScaler field_scaler;
  LoadScaler load_scaler;
  CoordBox coord_box;
  std::string problem = "external";
  std::vector<std::string> component_names;
  double t_total = 1.0;  // load-history duration, used to rebuild loads from control values

  // Fits the scalers on `train` and randomly initialises the model.
  static Surrogate fit(const Dataset& train, const ModelConfig& config, ScalerKind kind,
                       std::uint64_t seed);

  nn::Matrix scaled_loads(const Tensor& loads) const;    // [b x S] physical -> scaled
  nn::Matrix scaled_coords(const Tensor& coords) const;  // [N x 2] -> unit box

  /// Physical loads [b x S] and coords [N x 2] to physical fields [b x S x N x C].
  Tensor predict(const Tensor& loads, const Tensor& coords) const;

  // Throws ShapeError if the dataset does not fit this model.
  void check_compatible(const Dataset& ds) const;
};

// Checkpoint: manifest.json + params.bin in `dir`.
void write_checkpoint(const Surrogate& s, const std::filesystem::path& dir, DType dtype = DType::kF64);

/// With `as_f32`, parameters are rounded to single precision after loading
/// and a warning is appended to `warnings` (when given).
Surrogate read_checkpoint(const std::filesystem::path& dir, bool as_f32 = false,
                          std::vector<std::string>* warnings = nullptr);

nlohmann::json config_to_json(const ModelConfig& c);
ModelConfig config_from_json(const nlohmann::json& j);

}  // namespace sdon
