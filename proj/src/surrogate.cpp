// SPDX-License-Identifier: Apache-2.0
#include "sdon/surrogate.hpp"

#include <cmath>
#include <map>

#include "sdon/error.hpp"

namespace sdon {

namespace fs = std::filesystem;
using nlohmann::json;

Surrogate Surrogate::fit(const Dataset& train, const ModelConfig& config, ScalerKind kind,
                         std::uint64_t seed) {
  train.validate();
  Surrogate s;
  s.model = SDeepONet::random(config, seed);
  s.problem = train.problem;
  s.component_names = train.component_names;
  s.t_total = train.generation.value("t_total", 1.0);
  s.check_compatible(train);
  s.field_scaler = fit_scaler(train.fields, kind);
  s.load_scaler = fit_load_scaler(train.loads.data());
  s.coord_box = fit_coord_box(train.coords);
  return s;
}

void Surrogate::check_compatible(const Dataset& ds) const {
  ds.validate();
  const ModelConfig& c = model.config();
  if (ds.steps() != c.steps || ds.components() != c.components) {
    throw ShapeError("dataset has S=" + std::to_string(ds.steps()) + ", C=" + std::to_string(ds.components()) +
                     " but the model expects S=" + std::to_string(c.steps) + ", C=" +
                     std::to_string(c.components));
  }
}

nn::Matrix Surrogate::scaled_loads(const Tensor& loads) const {
  if (loads.rank() != 2) throw ShapeError("loads must be [b x S]");
  nn::Matrix m = to_matrix(loads);
  m /= load_scaler.scale;
  return m;
}

nn::Matrix Surrogate::scaled_coords(const Tensor& coords) const {
  return to_matrix(normalize_coords(coord_box, coords));
}

Tensor Surrogate::predict(const Tensor& loads, const Tensor& coords) const {
  const ModelConfig& c = model.config();
  if (loads.rank() != 2 || loads.dim(1) != c.steps) {
    throw ShapeError("predict: loads " + shape_string(loads.shape()) + " do not have S = " +
                     std::to_string(c.steps) + " columns");
  }
  const nn::Matrix trunk = model.trunk_matrix(scaled_coords(coords));
  Tensor out({loads.dim(0), c.steps, coords.dim(0), c.components},
             model.predict_batch(scaled_loads(loads), trunk));
  invert_scaler(field_scaler, out);
  return out;
}

json config_to_json(const ModelConfig& c) {
  return {{"hd", c.hd},
          {"steps", c.steps},
          {"components", c.components},
          {"branch_hidden", c.branch_hidden},
          {"trunk_widths", c.trunk_widths},
          {"trunk_activation", std::string(nn::to_string(c.trunk_activation))}};
}

ModelConfig config_from_json(const json& j) {
  ModelConfig c;
  try {
    c.hd = j.at("hd").get<std::size_t>();
    c.steps = j.at("steps").get<std::size_t>();
    c.components = j.at("components").get<std::size_t>();
    c.branch_hidden = j.at("branch_hidden").get<std::vector<std::size_t>>();
    c.trunk_widths = j.at("trunk_widths").get<std::vector<std::size_t>>();
    c.trunk_activation = nn::activation_from_string(j.value("trunk_activation", "tanh"));
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed model config: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw DataError(std::string("malformed model config: ") + e.what());
  }
  try {
    c.validate();
  } catch (const InvalidArgument& e) {
    throw DataError(std::string("invalid model config: ") + e.what());
  }
  return c;
}

void write_checkpoint(const Surrogate& s, const fs::path& dir, DType dtype) {
  fs::create_directories(dir);
  SDeepONet& model = const_cast<SDeepONet&>(s.model);  // visit is non-const; nothing is modified
  std::vector<double> flat;
  json params = json::array();
  model.visit("", [&](const std::string& name, nn::Matrix& m) {
    params.push_back({{"name", name}, {"shape", {m.rows(), m.cols()}}, {"offset", flat.size()}});
    flat.insert(flat.end(), m.data(), m.data() + m.size());
  });
  const auto bytes = encode_array(flat, dtype);
  write_bytes(dir / "params.bin", bytes);

  json m;
  m["format_version"] = kFormatVersion;
  m["kind"] = "checkpoint";
  m["convention"] = std::string(nn::kGruConvention);
  m["dtype"] = std::string(to_string(dtype));
  m["endianness"] = "little";
  m["problem"] = s.problem;
  m["component_names"] = s.component_names;
  m["t_total"] = s.t_total;
  m["config"] = config_to_json(s.model.config());
  m["scalers"] = {{"fields", scaler_to_json(s.field_scaler)}, {"loads", {{"scale", s.load_scaler.scale}}}};
  m["coord_box"] = {{"lo", {s.coord_box.lo[0], s.coord_box.lo[1]}}, {"hi", {s.coord_box.hi[0], s.coord_box.hi[1]}}};
  m["params"] = params;
  m["arrays"]["params"] = {{"file", "params.bin"}, {"shape", {flat.size()}}, {"offset", 0},
                           {"bytes", bytes.size()}, {"crc32", crc32_of(bytes)}};
  write_text(dir / "manifest.json", m.dump(2) + "\n");
}

Surrogate read_checkpoint(const fs::path& dir, bool as_f32, std::vector<std::string>* warnings) {
  const fs::path mpath = dir / "manifest.json";
  if (!fs::exists(mpath)) throw DataError("missing manifest: " + mpath.string());
  json m;
  try {
    m = json::parse(read_text(mpath));
  } catch (const json::exception& e) {
    throw DataError("checkpoint manifest is not valid JSON: " + std::string(e.what()));
  }
  try {
    const int version = m.at("format_version").get<int>();
    if (version != kFormatVersion) throw DataError("unsupported checkpoint format_version " + std::to_string(version));
    if (m.at("kind").get<std::string>() != "checkpoint") throw DataError("manifest does not describe a checkpoint");
    const std::string conv = m.at("convention").get<std::string>();
    if (conv != nn::kGruConvention) {
      throw DataError("checkpoint GRU convention '" + conv + "' differs from this build's '" +
                      std::string(nn::kGruConvention) + "'; refusing to load");
    }
    if (m.at("endianness").get<std::string>() != "little") throw DataError("only little-endian data is supported");
    const DType dtype = dtype_from_string(m.at("dtype").get<std::string>());

    Surrogate s;
    s.model = SDeepONet(config_from_json(m.at("config")));
    s.problem = m.at("problem").get<std::string>();
    s.component_names = m.at("component_names").get<std::vector<std::string>>();
    s.t_total = m.at("t_total").get<double>();
    s.field_scaler = scaler_from_json(m.at("scalers").at("fields"));
    s.load_scaler.scale = m.at("scalers").at("loads").at("scale").get<double>();
    for (int a = 0; a < 2; ++a) {
      s.coord_box.lo[a] = m.at("coord_box").at("lo").at(a).get<double>();
      s.coord_box.hi[a] = m.at("coord_box").at("hi").at(a).get<double>();
    }

    const json& entry = m.at("arrays").at("params");
    const auto bytes = read_bytes(dir / entry.at("file").get<std::string>());
    const std::size_t count = entry.at("shape").at(0).get<std::size_t>();
    const std::size_t width = dtype == DType::kF64 ? 8 : 4;
    if (bytes.size() != count * width) {
      throw DataError("params.bin has " + std::to_string(bytes.size()) + " bytes, expected " +
                      std::to_string(count * width));
    }
    if (crc32_of(bytes) != entry.at("crc32").get<std::uint32_t>()) {
      throw DataError("array 'params': checksum mismatch (corrupted data)");
    }
    const std::vector<double> flat = decode_array(bytes, dtype);

    std::map<std::string, json> index;
    for (const json& p : m.at("params")) index[p.at("name").get<std::string>()] = p;
    std::size_t used = 0;
    s.model.visit("", [&](const std::string& name, nn::Matrix& mat) {
      auto it = index.find(name);
      if (it == index.end()) throw DataError("checkpoint lacks parameter '" + name + "'");
      const auto shape = it->second.at("shape").get<std::vector<Eigen::Index>>();
      const std::size_t off = it->second.at("offset").get<std::size_t>();
      if (shape.size() != 2 || shape[0] != mat.rows() || shape[1] != mat.cols()) {
        throw DataError("parameter '" + name + "' has the wrong shape for the stored config");
      }
      if (off + static_cast<std::size_t>(mat.size()) > flat.size()) {
        throw DataError("parameter '" + name + "' runs past the end of params.bin");
      }
      std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(off), mat.size(), mat.data());
      used += static_cast<std::size_t>(mat.size());
    });
    if (used != flat.size()) throw DataError("params.bin holds parameters the config does not account for");
    if (as_f32) {
      s.model.visit("", [](const std::string&, nn::Matrix& mat) {
        for (Eigen::Index i = 0; i < mat.size(); ++i) mat.data()[i] = static_cast<float>(mat.data()[i]);
      });
      if (warnings != nullptr && dtype == DType::kF64) {
        warnings->push_back("f64 checkpoint downcast to f32 parameters; outputs deviate at single-precision level");
      }
    }
    return s;
  } catch (const json::exception& e) {
    throw DataError("malformed checkpoint manifest: " + std::string(e.what()));
  }
}

}  // namespace sdon
