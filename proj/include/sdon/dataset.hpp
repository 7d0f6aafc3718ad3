// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sdon/scaler.hpp"
#include "sdon/tensor.hpp"

namespace sdon {

inline constexpr int kFormatVersion = 1;

enum class DType { kF64, kF32 };

std::string_view to_string(DType dtype);
DType dtype_from_string(std::string_view name);

/// In-memory dataset. Dimension order is [case, step, node, component].
struct Dataset {
  std::string problem = "external";  // cavity | bar1d | external
  std::vector<std::string> component_names;
  Tensor coords;    // [N x 2]
  Tensor loads;     // [cases x S], physical units
  Tensor fields;    // [cases x S x N x C], physical units
  Tensor controls;  // [cases x 6] control values, or empty
  std::optional<FieldScaler> field_scaler;
  std::optional<LoadScaler> load_scaler;
  std::uint64_t seed = 0;
  nlohmann::json generation = nlohmann::json::object();

  std::size_t cases() const { return fields.rank() == 4 ? fields.dim(0) : 0; }
  std::size_t steps() const { return fields.rank() == 4 ? fields.dim(1) : 0; }
  std::size_t nodes() const { return fields.rank() == 4 ? fields.dim(2) : 0; }
  std::size_t components() const { return fields.rank() == 4 ? fields.dim(3) : 0; }

  // Throws ShapeError when the arrays disagree with each other.
  void validate() const;
  Dataset select(const std::vector<std::size_t>& cases) const;
};

nlohmann::json scaler_to_json(const FieldScaler& s);
FieldScaler scaler_from_json(const nlohmann::json& j);

// Little-endian raw array + CRC-32 helpers shared with the checkpoint format.
std::vector<unsigned char> encode_array(std::span<const double> data, DType dtype);
std::vector<double> decode_array(std::span<const unsigned char> bytes, DType dtype);
std::uint32_t crc32_of(std::span<const unsigned char> bytes);

void write_bytes(const std::filesystem::path& path, std::span<const unsigned char> bytes);
std::vector<unsigned char> read_bytes(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

// Full-cell decimal parse (surrounding blanks allowed), subnormals included.
// Throws DataError.
double parse_number(std::string_view cell);

/// Directory layout: manifest.json plus one .bin per array. Existing files
/// of the same names are overwritten.
void write_dataset(const Dataset& ds, const std::filesystem::path& dir, DType dtype = DType::kF64);

/// Validates version, shapes, byte lengths and checksums. Throws DataError.
Dataset read_dataset(const std::filesystem::path& dir);

/// CSV exchange:
///   coords.csv  node,x,y
///   loads.csv   case,step,value
///   fields.csv  case,node,step,component,value
void export_csv(const Dataset& ds, const std::filesystem::path& dir);
Dataset import_csv(const std::filesystem::path& dir, const std::vector<std::string>& component_names = {});

}  // namespace sdon
