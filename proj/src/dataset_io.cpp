// SPDX-License-Identifier: Apache-2.0
#include "sdon/dataset.hpp"

#include <zlib.h>

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "sdon/error.hpp"

namespace sdon {

namespace fs = std::filesystem;
using nlohmann::json;

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

std::string_view to_string(DType dtype) { return dtype == DType::kF64 ? "f64" : "f32"; }

DType dtype_from_string(std::string_view name) {
  if (name == "f64") return DType::kF64;
  if (name == "f32") return DType::kF32;
  throw DataError("unknown dtype '" + std::string(name) + "'");
}

std::vector<unsigned char> encode_array(std::span<const double> data, DType dtype) {
  const std::size_t width = dtype == DType::kF64 ? 8 : 4;
  std::vector<unsigned char> out(data.size() * width);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const std::uint64_t bits = dtype == DType::kF64
                                   ? std::bit_cast<std::uint64_t>(data[i])
                                   : std::bit_cast<std::uint32_t>(static_cast<float>(data[i]));
    for (std::size_t b = 0; b < width; ++b) out[i * width + b] = static_cast<unsigned char>(bits >> (8 * b));
  }
  return out;
}

std::vector<double> decode_array(std::span<const unsigned char> bytes, DType dtype) {
  const std::size_t width = dtype == DType::kF64 ? 8 : 4;
  if (bytes.size() % width != 0) throw DataError("array byte length is not a multiple of the element size");
  std::vector<double> out(bytes.size() / width);
  for (std::size_t i = 0; i < out.size(); ++i) {
    std::uint64_t bits = 0;
    for (std::size_t b = 0; b < width; ++b) bits |= std::uint64_t{bytes[i * width + b]} << (8 * b);
    out[i] = dtype == DType::kF64 ? std::bit_cast<double>(bits)
                                  : static_cast<double>(std::bit_cast<float>(static_cast<std::uint32_t>(bits)));
  }
  return out;
}

std::uint32_t crc32_of(std::span<const unsigned char> bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  std::size_t done = 0;
  // zlib takes a uInt length, so feed large buffers in chunks.
  while (done < bytes.size()) {
    const std::size_t n = std::min<std::size_t>(bytes.size() - done, 1u << 30);
    crc = crc32(crc, bytes.data() + done, static_cast<uInt>(n));
    done += n;
  }
  return static_cast<std::uint32_t>(crc);
}

void write_bytes(const fs::path& path, std::span<const unsigned char> bytes) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error("cannot open " + path.string() + " for writing");
  os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!os) throw Error("write failed for " + path.string());
}

std::vector<unsigned char> read_bytes(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw Error("cannot open " + path.string() + " for writing");
  os << text;
  if (!os) throw Error("write failed for " + path.string());
}

std::string read_text(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw DataError("cannot open " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

json scaler_to_json(const FieldScaler& s) {
  return {{"kind", std::string(to_string(s.kind))},
          {"steps", s.steps},
          {"components", s.components},
          {"scale", s.scale},
          {"lo", s.lo},
          {"hi", s.hi}};
}

FieldScaler scaler_from_json(const json& j) {
  FieldScaler s;
  try {
    s.kind = scaler_kind_from_string(j.at("kind").get<std::string>());
    s.steps = j.at("steps").get<std::size_t>();
    s.components = j.at("components").get<std::size_t>();
    s.scale = j.at("scale").get<std::vector<double>>();
    s.lo = j.at("lo").get<std::vector<double>>();
    s.hi = j.at("hi").get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed scaler record: ") + e.what());
  }
  const bool ok = s.kind != ScalerKind::kMinMax
                      ? s.scale.size() == s.steps * s.components
                      : s.lo.size() == s.components && s.hi.size() == s.components;
  if (!ok) throw DataError("scaler record has inconsistent sizes");
  s.fitted = true;
  return s;
}

void Dataset::validate() const {
  if (fields.rank() != 4) throw ShapeError("dataset: fields must be [cases x S x N x C]");
  const std::size_t n = cases();
  if (coords.rank() != 2 || coords.dim(1) != 2 || coords.dim(0) != nodes()) {
    throw ShapeError("dataset: coords " + shape_string(coords.shape()) + " do not match N = " +
                     std::to_string(nodes()));
  }
  if (loads.rank() != 2 || loads.dim(0) != n || loads.dim(1) != steps()) {
    throw ShapeError("dataset: loads " + shape_string(loads.shape()) + " do not match [cases x S]");
  }
  if (controls.size() != 0 && (controls.rank() != 2 || controls.dim(0) != n)) {
    throw ShapeError("dataset: controls must have one row per case");
  }
  if (component_names.size() != components()) {
    throw ShapeError("dataset: " + std::to_string(component_names.size()) + " component names for C = " +
                     std::to_string(components()));
  }
}

Dataset Dataset::select(const std::vector<std::size_t>& idx) const {
  validate();
  Dataset out = *this;
  const std::size_t s = steps();
  const std::size_t block = s * nodes() * components();
  out.loads = Tensor({idx.size(), s});
  out.fields = Tensor({idx.size(), s, nodes(), components()});
  const std::size_t nc = controls.size() == 0 ? 0 : controls.dim(1);
  out.controls = nc == 0 ? Tensor() : Tensor({idx.size(), nc});
  for (std::size_t k = 0; k < idx.size(); ++k) {
    const std::size_t src = idx[k];
    if (src >= cases()) throw InvalidArgument("dataset: case index out of range");
    std::copy_n(loads.data().begin() + static_cast<std::ptrdiff_t>(src * s), s,
                out.loads.data().begin() + static_cast<std::ptrdiff_t>(k * s));
    std::copy_n(fields.data().begin() + static_cast<std::ptrdiff_t>(src * block), block,
                out.fields.data().begin() + static_cast<std::ptrdiff_t>(k * block));
    if (nc > 0) {
      std::copy_n(controls.data().begin() + static_cast<std::ptrdiff_t>(src * nc), nc,
                  out.controls.data().begin() + static_cast<std::ptrdiff_t>(k * nc));
    }
  }
  return out;
}

namespace {

json write_array(const fs::path& dir, const std::string& name, const Tensor& t, DType dtype) {
  const auto bytes = encode_array(t.data(), dtype);
  const std::string file = name + ".bin";
  write_bytes(dir / file, bytes);
  return {{"file", file}, {"shape", t.shape()}, {"offset", 0}, {"bytes", bytes.size()}, {"crc32", crc32_of(bytes)}};
}

Tensor read_array(const fs::path& dir, const std::string& name, const json& entry, DType dtype) {
  Shape shape;
  std::string file;
  std::size_t offset = 0;
  std::uint32_t crc = 0;
  try {
    shape = entry.at("shape").get<Shape>();
    file = entry.at("file").get<std::string>();
    offset = entry.at("offset").get<std::size_t>();
    crc = entry.at("crc32").get<std::uint32_t>();
  } catch (const json::exception& e) {
    throw DataError("array '" + name + "': malformed manifest entry: " + e.what());
  }
  const auto bytes = read_bytes(dir / file);
  const std::size_t width = dtype == DType::kF64 ? 8 : 4;
  const std::size_t expected = shape_size(shape) * width;
  if (bytes.size() < offset + expected) {
    throw DataError("array '" + name + "': file " + file + " is truncated (" + std::to_string(bytes.size()) +
                    " bytes, expected " + std::to_string(offset + expected) + ")");
  }
  if (bytes.size() > offset + expected) {
    throw DataError("array '" + name + "': file " + file + " has " + std::to_string(bytes.size()) +
                    " bytes, expected " + std::to_string(offset + expected));
  }
  const std::span<const unsigned char> payload(bytes.data() + offset, expected);
  if (crc32_of(payload) != crc) throw DataError("array '" + name + "': checksum mismatch (corrupted data)");
  return Tensor(std::move(shape), decode_array(payload, dtype));
}

}  // namespace

double parse_number(std::string_view cell) {
  const auto blank = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!cell.empty() && blank(cell.front())) cell.remove_prefix(1);
  while (!cell.empty() && blank(cell.back())) cell.remove_suffix(1);
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size()) {
    throw DataError("not a number: '" + std::string(cell) + "'");
  }
  return v;
}

void write_dataset(const Dataset& ds, const fs::path& dir, DType dtype) {
  ds.validate();
  fs::create_directories(dir);
  json m;
  m["format_version"] = kFormatVersion;
  m["kind"] = "dataset";
  m["problem"] = ds.problem;
  m["counts"] = {{"n_cases", ds.cases()}, {"S", ds.steps()}, {"N", ds.nodes()}, {"C", ds.components()}};
  m["component_names"] = ds.component_names;
  m["dtype"] = std::string(to_string(dtype));
  m["endianness"] = "little";
  m["arrays"]["coords"] = write_array(dir, "coords", ds.coords, dtype);
  m["arrays"]["loads"] = write_array(dir, "loads", ds.loads, dtype);
  m["arrays"]["fields"] = write_array(dir, "fields", ds.fields, dtype);
  if (ds.controls.size() > 0) m["arrays"]["controls"] = write_array(dir, "controls", ds.controls, dtype);
  m["scalers"] = json::object();
  if (ds.field_scaler) m["scalers"]["fields"] = scaler_to_json(*ds.field_scaler);
  if (ds.load_scaler) m["scalers"]["loads"] = {{"scale", ds.load_scaler->scale}};
  m["generation"] = {{"seed", ds.seed}, {"params", ds.generation}};
  write_text(dir / "manifest.json", m.dump(2) + "\n");
}

Dataset read_dataset(const fs::path& dir) {
  const fs::path mpath = dir / "manifest.json";
  if (!fs::exists(mpath)) throw DataError("missing manifest: " + mpath.string());
  json m;
  try {
    m = json::parse(read_text(mpath));
  } catch (const json::exception& e) {
    throw DataError("manifest is not valid JSON: " + std::string(e.what()));
  }
  Dataset ds;
  try {
    const int version = m.at("format_version").get<int>();
    if (version != kFormatVersion) {
      throw DataError("unsupported format_version " + std::to_string(version) + " (expected " +
                      std::to_string(kFormatVersion) + ")");
    }
    if (m.value("kind", "dataset") != "dataset") throw DataError("manifest does not describe a dataset");
    if (m.at("endianness").get<std::string>() != "little") throw DataError("only little-endian data is supported");
    const DType dtype = dtype_from_string(m.at("dtype").get<std::string>());
    ds.problem = m.at("problem").get<std::string>();
    ds.component_names = m.at("component_names").get<std::vector<std::string>>();
    const json& arrays = m.at("arrays");
    ds.coords = read_array(dir, "coords", arrays.at("coords"), dtype);
    ds.loads = read_array(dir, "loads", arrays.at("loads"), dtype);
    ds.fields = read_array(dir, "fields", arrays.at("fields"), dtype);
    if (arrays.contains("controls")) ds.controls = read_array(dir, "controls", arrays.at("controls"), dtype);
    const json& sc = m.at("scalers");
    if (sc.contains("fields")) ds.field_scaler = scaler_from_json(sc.at("fields"));
    if (sc.contains("loads")) ds.load_scaler = LoadScaler{sc.at("loads").at("scale").get<double>()};
    ds.seed = m.at("generation").at("seed").get<std::uint64_t>();
    ds.generation = m.at("generation").at("params");
    const json& counts = m.at("counts");
    const bool counts_ok = counts.at("n_cases").get<std::size_t>() == ds.fields.dim(0) &&
                           counts.at("S").get<std::size_t>() == ds.fields.dim(1) &&
                           counts.at("N").get<std::size_t>() == ds.fields.dim(2) &&
                           counts.at("C").get<std::size_t>() == ds.fields.dim(3);
    if (!counts_ok) throw DataError("manifest counts disagree with the array shapes");
  } catch (const json::exception& e) {
    throw DataError("malformed manifest: " + std::string(e.what()));
  } catch (const ShapeError& e) {
    throw DataError(std::string("inconsistent dataset: ") + e.what());
  }
  try {
    ds.validate();
  } catch (const ShapeError& e) {
    throw DataError(std::string("inconsistent dataset: ") + e.what());
  }
  return ds;
}

void export_csv(const Dataset& ds, const fs::path& dir) {
  ds.validate();
  fs::create_directories(dir);
  std::ostringstream c;
  c.precision(17);
  c << "node,x,y\n";
  for (std::size_t n = 0; n < ds.nodes(); ++n) c << n << "," << ds.coords.at({n, 0}) << "," << ds.coords.at({n, 1}) << "\n";
  write_text(dir / "coords.csv", c.str());
  std::ostringstream l;
  l.precision(17);
  l << "case,step,value\n";
  for (std::size_t k = 0; k < ds.cases(); ++k) {
    for (std::size_t s = 0; s < ds.steps(); ++s) l << k << "," << s << "," << ds.loads.at({k, s}) << "\n";
  }
  write_text(dir / "loads.csv", l.str());
  std::ofstream f(dir / "fields.csv");
  if (!f) throw Error("cannot open " + (dir / "fields.csv").string());
  f.precision(17);
  f << "case,node,step,component,value\n";
  for (std::size_t k = 0; k < ds.cases(); ++k) {
    for (std::size_t n = 0; n < ds.nodes(); ++n) {
      for (std::size_t s = 0; s < ds.steps(); ++s) {
        for (std::size_t cc = 0; cc < ds.components(); ++cc) {
          f << k << "," << n << "," << s << "," << cc << "," << ds.fields.at({k, s, n, cc}) << "\n";
        }
      }
    }
  }
}

namespace {

// Rows of numbers from a CSV file with a header line.
std::vector<std::vector<double>> read_csv_rows(const fs::path& path, std::size_t columns) {
  std::ifstream is(path);
  if (!is) throw DataError("cannot open " + path.string());
  std::string line;
  std::getline(is, line);
  std::vector<std::vector<double>> rows;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(parse_number(cell));
      } catch (const DataError& e) {
        throw DataError(path.filename().string() + ":" + std::to_string(lineno) + ": " + e.what());
      }
    }
    if (row.size() != columns) {
      throw DataError(path.filename().string() + ":" + std::to_string(lineno) + ": expected " +
                      std::to_string(columns) + " columns");
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::size_t as_index(double v, const std::string& what) {
  if (!(v >= 0.0) || v != static_cast<double>(static_cast<std::size_t>(v))) {
    throw DataError("invalid " + what + " index " + std::to_string(v));
  }
  return static_cast<std::size_t>(v);
}

}  // namespace

Dataset import_csv(const fs::path& dir, const std::vector<std::string>& names) {
  const auto crow = read_csv_rows(dir / "coords.csv", 3);
  const auto lrow = read_csv_rows(dir / "loads.csv", 3);
  const auto frow = read_csv_rows(dir / "fields.csv", 5);
  std::size_t n_nodes = 0, n_cases = 0, n_steps = 0, n_comps = 0;
  for (const auto& r : crow) n_nodes = std::max(n_nodes, as_index(r[0], "node") + 1);
  for (const auto& r : lrow) {
    n_cases = std::max(n_cases, as_index(r[0], "case") + 1);
    n_steps = std::max(n_steps, as_index(r[1], "step") + 1);
  }
  for (const auto& r : frow) n_comps = std::max(n_comps, as_index(r[3], "component") + 1);
  if (crow.size() != n_nodes || lrow.size() != n_cases * n_steps ||
      frow.size() != n_cases * n_nodes * n_steps * n_comps) {
    throw DataError("CSV import: tables are incomplete or contain duplicate rows");
  }
  Dataset ds;
  ds.problem = "external";
  ds.coords = Tensor({n_nodes, 2});
  ds.loads = Tensor({n_cases, n_steps});
  ds.fields = Tensor({n_cases, n_steps, n_nodes, n_comps});
  std::vector<char> seen(ds.fields.size(), 0);
  for (const auto& r : crow) {
    const std::size_t n = as_index(r[0], "node");
    ds.coords.at({n, 0}) = r[1];
    ds.coords.at({n, 1}) = r[2];
  }
  for (const auto& r : lrow) ds.loads.at({as_index(r[0], "case"), as_index(r[1], "step")}) = r[2];
  for (const auto& r : frow) {
    const std::size_t k = as_index(r[0], "case");
    const std::size_t n = as_index(r[1], "node");
    const std::size_t s = as_index(r[2], "step");
    const std::size_t c = as_index(r[3], "component");
    if (k >= n_cases || n >= n_nodes || s >= n_steps) throw DataError("CSV import: field row outside table bounds");
    const std::size_t flat = ((k * n_steps + s) * n_nodes + n) * n_comps + c;
    if (seen[flat]++) throw DataError("CSV import: duplicate field row");
    ds.fields[flat] = r[4];
  }
  if (names.empty()) {
    for (std::size_t c = 0; c < n_comps; ++c) ds.component_names.push_back("c" + std::to_string(c));
  } else {
    ds.component_names = names;
  }
  try {
    ds.validate();
  } catch (const ShapeError& e) {
    throw DataError(std::string("CSV import: ") + e.what());
  }
  return ds;
}

}  // namespace sdon
