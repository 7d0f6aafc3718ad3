// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cstring>
#include <fstream>

#include "sdon/dataset.hpp"
#include "sdon/error.hpp"
#include "sdon/generate.hpp"
#include "sdon/random.hpp"
#include "sdon/surrogate.hpp"
#include "temp_dir.hpp"

using namespace sdon;
namespace fs = std::filesystem;

namespace {

Dataset toy_dataset() {
  Dataset ds;
  ds.problem = "external";
  ds.component_names = {"a", "b"};
  Rng rng(3);
  ds.coords = Tensor({4, 2});
  ds.loads = Tensor({2, 3});
  ds.fields = Tensor({2, 3, 4, 2});
  ds.controls = Tensor({2, 6});
  for (Tensor* t : {&ds.coords, &ds.loads, &ds.fields, &ds.controls}) {
    for (double& x : t->data()) x = rng.normal();
  }
  ds.fields[5] = -0.0;
  ds.fields[6] = 1e-310;  // subnormal
  ds.field_scaler = fit_scaler(ds.fields, ScalerKind::kStepMaxAbs);
  ds.load_scaler = fit_load_scaler(ds.loads.data());
  ds.seed = 99;
  ds.generation = {{"note", "toy"}, {"t_total", 1.5}};
  return ds;
}

bool bitwise_equal(const Tensor& a, const Tensor& b) {
  return a.shape() == b.shape() &&
         std::memcmp(a.data().data(), b.data().data(), a.data().size() * sizeof(double)) == 0;
}

void flip_byte(const fs::path& file, std::size_t offset) {
  std::fstream f(file, std::ios::in | std::ios::out | std::ios::binary);
  f.seekg(static_cast<std::streamoff>(offset));
  char c = 0;
  f.read(&c, 1);
  c = static_cast<char>(c ^ 0x01);
  f.seekp(static_cast<std::streamoff>(offset));
  f.write(&c, 1);
}

Surrogate toy_surrogate(const Dataset& ds) {
  Surrogate s = Surrogate::fit(ds, ModelConfig::make(4, 3, 2, {5, 3}, {6}), ScalerKind::kStepMaxAbs, 8);
  s.model.set_beta(0.125);
  return s;
}

}  // namespace

TEST(DatasetIo, RoundTripIsBitwise) {
  TempDir dir;
  const Dataset ds = toy_dataset();
  write_dataset(ds, dir.path());
  const Dataset back = read_dataset(dir.path());
  EXPECT_TRUE(bitwise_equal(back.coords, ds.coords));
  EXPECT_TRUE(bitwise_equal(back.loads, ds.loads));
  EXPECT_TRUE(bitwise_equal(back.fields, ds.fields));
  EXPECT_TRUE(bitwise_equal(back.controls, ds.controls));
  EXPECT_EQ(back.problem, ds.problem);
  EXPECT_EQ(back.component_names, ds.component_names);
  EXPECT_EQ(back.field_scaler, ds.field_scaler);
  EXPECT_EQ(back.load_scaler, ds.load_scaler);
  EXPECT_EQ(back.seed, ds.seed);
  EXPECT_EQ(back.generation, ds.generation);
}

TEST(DatasetIo, FieldFileSize) {
  TempDir dir;
  write_dataset(toy_dataset(), dir.path());
  EXPECT_EQ(fs::file_size(dir / "fields.bin"), 2u * 3 * 4 * 2 * 8);
  EXPECT_EQ(fs::file_size(dir / "fields.bin"), 384u);
}

TEST(DatasetIo, F32RoundTripRoundsOnce) {
  TempDir dir;
  const Dataset ds = toy_dataset();
  write_dataset(ds, dir.path(), DType::kF32);
  EXPECT_EQ(fs::file_size(dir / "fields.bin"), 192u);
  const Dataset back = read_dataset(dir.path());
  for (std::size_t i = 0; i < ds.fields.data().size(); ++i) {
    EXPECT_EQ(back.fields[i], static_cast<double>(static_cast<float>(ds.fields[i])));
  }
}

TEST(DatasetIo, SingleByteFlipDetected) {
  TempDir dir;
  for (const std::string name : {"coords", "loads", "fields", "controls"}) {
    const fs::path sub = dir / name;
    write_dataset(toy_dataset(), sub);
    flip_byte(sub / (name + ".bin"), 7);
    try {
      read_dataset(sub);
      ADD_FAILURE() << name << ": corruption not detected";
    } catch (const DataError& e) {
      EXPECT_NE(std::string(e.what()).find(name), std::string::npos);
      EXPECT_NE(std::string(e.what()).find("checksum"), std::string::npos);
    }
  }
}

TEST(DatasetIo, TruncatedFileDetected) {
  TempDir dir;
  write_dataset(toy_dataset(), dir.path());
  fs::resize_file(dir / "fields.bin", 380);
  EXPECT_THROW(read_dataset(dir.path()), DataError);
}

TEST(DatasetIo, MissingManifest) {
  TempDir dir;
  write_dataset(toy_dataset(), dir.path());
  fs::remove(dir / "manifest.json");
  try {
    read_dataset(dir.path());
    ADD_FAILURE();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("missing manifest"), std::string::npos);
  }
}

TEST(DatasetIo, UnknownVersion) {
  TempDir dir;
  write_dataset(toy_dataset(), dir.path());
  auto m = nlohmann::json::parse(read_text(dir / "manifest.json"));
  m["format_version"] = 99;
  write_text(dir / "manifest.json", m.dump());
  try {
    read_dataset(dir.path());
    ADD_FAILURE();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("format_version"), std::string::npos);
  }
}

TEST(DatasetIo, ManifestShapeIsAuthoritative) {
  TempDir dir;
  write_dataset(toy_dataset(), dir.path());
  auto m = nlohmann::json::parse(read_text(dir / "manifest.json"));
  m["arrays"]["fields"]["shape"] = {2, 3, 2, 4};
  write_text(dir / "manifest.json", m.dump());
  EXPECT_THROW(read_dataset(dir.path()), DataError);
}

TEST(DatasetIo, ManifestContents) {
  TempDir dir;
  write_dataset(toy_dataset(), dir.path());
  const auto m = nlohmann::json::parse(read_text(dir / "manifest.json"));
  EXPECT_EQ(m["format_version"], kFormatVersion);
  EXPECT_EQ(m["endianness"], "little");
  EXPECT_EQ(m["dtype"], "f64");
  EXPECT_EQ(m["counts"]["n_cases"], 2);
  EXPECT_EQ(m["counts"]["S"], 3);
  EXPECT_EQ(m["counts"]["N"], 4);
  EXPECT_EQ(m["counts"]["C"], 2);
  EXPECT_EQ(m["arrays"]["fields"]["bytes"], 384);
}

TEST(DatasetIo, SelectAndValidate) {
  const Dataset ds = toy_dataset();
  const Dataset one = ds.select({1});
  EXPECT_EQ(one.cases(), 1u);
  EXPECT_EQ(one.fields.at({0, 2, 3, 1}), ds.fields.at({1, 2, 3, 1}));
  EXPECT_EQ(one.controls.at({0, 4}), ds.controls.at({1, 4}));
  EXPECT_THROW(ds.select({2}), InvalidArgument);
  Dataset bad = ds;
  bad.coords = Tensor({3, 2});
  EXPECT_THROW(bad.validate(), ShapeError);
}

TEST(DatasetIo, CsvExportImportRoundTrip) {
  TempDir dir;
  Dataset ds = toy_dataset();
  export_csv(ds, dir.path());
  const Dataset back = import_csv(dir.path(), ds.component_names);
  EXPECT_TRUE(bitwise_equal(back.coords, ds.coords));
  EXPECT_TRUE(bitwise_equal(back.loads, ds.loads));
  EXPECT_TRUE(bitwise_equal(back.fields, ds.fields));
  EXPECT_EQ(back.component_names, ds.component_names);
}

TEST(DatasetIo, CsvImportRejectsIncompleteTable) {
  TempDir dir;
  export_csv(toy_dataset(), dir.path());
  std::string text = read_text(dir / "fields.csv");
  text.erase(text.rfind('\n', text.size() - 2) + 1);  // drop the last row
  write_text(dir / "fields.csv", text);
  EXPECT_THROW(import_csv(dir.path()), DataError);
}

TEST(Checkpoint, ReloadGivesIdenticalForward) {
  TempDir dir;
  const Dataset ds = toy_dataset();
  const Surrogate s = toy_surrogate(ds);
  write_checkpoint(s, dir.path());
  const Surrogate back = read_checkpoint(dir.path());
  const Tensor a = s.predict(ds.loads, ds.coords);
  const Tensor b = back.predict(ds.loads, ds.coords);
  EXPECT_TRUE(bitwise_equal(a, b));
  EXPECT_EQ(back.model.config(), s.model.config());
  EXPECT_EQ(back.field_scaler, s.field_scaler);
  EXPECT_EQ(back.coord_box, s.coord_box);
  EXPECT_EQ(back.t_total, 1.5);
}

TEST(Checkpoint, DowncastWarnsAndStaysClose) {
  TempDir dir;
  const Dataset ds = toy_dataset();
  const Surrogate s = toy_surrogate(ds);
  write_checkpoint(s, dir.path());
  std::vector<std::string> warnings;
  const Surrogate f = read_checkpoint(dir.path(), true, &warnings);
  ASSERT_EQ(warnings.size(), 1u);
  const Tensor a = s.predict(ds.loads, ds.coords);
  const Tensor b = f.predict(ds.loads, ds.coords);
  double worst = 0.0, peak = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) {
    worst = std::max(worst, std::abs(a[i] - b[i]));
    peak = std::max(peak, std::abs(a[i]));
  }
  EXPECT_LE(worst, 1e-6 * std::max(1.0, peak));
}

TEST(Checkpoint, ConventionMismatchRefused) {
  TempDir dir;
  write_checkpoint(toy_surrogate(toy_dataset()), dir.path());
  auto m = nlohmann::json::parse(read_text(dir / "manifest.json"));
  m["convention"] = "gru:mix=z*h+(1-z)c;reset=after-matmul;bias=double";
  write_text(dir / "manifest.json", m.dump());
  EXPECT_THROW(read_checkpoint(dir.path()), DataError);
}

TEST(Checkpoint, CorruptionDetected) {
  TempDir dir;
  write_checkpoint(toy_surrogate(toy_dataset()), dir.path());
  flip_byte(dir / "params.bin", 100);
  EXPECT_THROW(read_checkpoint(dir.path()), DataError);
}

TEST(Checkpoint, ComponentMismatchWithDataset) {
  const Surrogate s = toy_surrogate(toy_dataset());
  Dataset other = toy_dataset();
  other.fields = Tensor({2, 3, 4, 1});
  other.component_names = {"a"};
  other.field_scaler.reset();
  EXPECT_THROW(s.check_compatible(other), ShapeError);
}

TEST(ParseNumber, Cells) {
  EXPECT_EQ(parse_number(" 2.5\r"), 2.5);
  EXPECT_EQ(parse_number("+3"), 3.0);
  EXPECT_EQ(parse_number("9.9999999999999694e-311"), 9.9999999999999694e-311);
  EXPECT_TRUE(std::signbit(parse_number("-0")));
  EXPECT_THROW(parse_number(""), DataError);
  EXPECT_THROW(parse_number("1.5x"), DataError);
  EXPECT_THROW(parse_number("1e400"), DataError);
}
