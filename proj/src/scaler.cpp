// SPDX-License-Identifier: Apache-2.0
#include "sdon/scaler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "sdon/error.hpp"

namespace sdon {

std::string_view to_string(ScalerKind kind) {
  switch (kind) {
    case ScalerKind::kStepMaxAbs:
      return "step-maxabs";
    case ScalerKind::kMaxAbs:
      return "maxabs";
    case ScalerKind::kMinMax:
      break;
  }
  return "minmax";
}

ScalerKind scaler_kind_from_string(std::string_view name) {
  if (name == "step-maxabs") return ScalerKind::kStepMaxAbs;
  if (name == "maxabs") return ScalerKind::kMaxAbs;
  if (name == "minmax") return ScalerKind::kMinMax;
  throw InvalidArgument("unknown scaler kind '" + std::string(name) + "'");
}

namespace {

struct Layout {
  std::size_t blocks, steps, nodes, comps;
};

Layout trailing_layout(const Tensor& t) {
  if (t.rank() < 3) throw ShapeError("scaler: expected [..., S, N, C], got " + shape_string(t.shape()));
  const Shape& s = t.shape();
  const std::size_t r = s.size();
  const std::size_t block = s[r - 3] * s[r - 2] * s[r - 1];
  return {block == 0 ? 0 : t.size() / block, s[r - 3], s[r - 2], s[r - 1]};
}

void check_fitted(const FieldScaler& sc, std::size_t total, std::size_t nodes) {
  if (!sc.fitted) throw InvalidArgument("scaler used before fitting");
  const std::size_t block = sc.steps * nodes * sc.components;
  if (block == 0 || total % block != 0) {
    throw ShapeError("scaler: data does not match fitted steps/components");
  }
}

}  // namespace

FieldScaler fit_scaler(const Tensor& fields, ScalerKind kind) {
  const Layout l = trailing_layout(fields);
  FieldScaler sc;
  sc.kind = kind;
  sc.steps = l.steps;
  sc.components = l.comps;
  const auto d = fields.data();
  if (kind != ScalerKind::kMinMax) {
    sc.scale.assign(l.steps * l.comps, 0.0);
    for (std::size_t b = 0; b < l.blocks; ++b) {
      for (std::size_t s = 0; s < l.steps; ++s) {
        for (std::size_t n = 0; n < l.nodes; ++n) {
          const double* row = d.data() + ((b * l.steps + s) * l.nodes + n) * l.comps;
          for (std::size_t c = 0; c < l.comps; ++c) {
            double& m = sc.scale[s * l.comps + c];
            m = std::max(m, std::abs(row[c]));
          }
        }
      }
    }
    if (kind == ScalerKind::kMaxAbs) {
      for (std::size_t c = 0; c < l.comps; ++c) {
        double m = 0.0;
        for (std::size_t st = 0; st < l.steps; ++st) m = std::max(m, sc.scale[st * l.comps + c]);
        for (std::size_t st = 0; st < l.steps; ++st) sc.scale[st * l.comps + c] = m;
      }
    }
    for (double& m : sc.scale) m = std::max(m, FieldScaler::kEpsilon);
  } else {
    sc.lo.assign(l.comps, std::numeric_limits<double>::infinity());
    sc.hi.assign(l.comps, -std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < fields.size(); ++i) {
      const std::size_t c = i % l.comps;
      sc.lo[c] = std::min(sc.lo[c], d[i]);
      sc.hi[c] = std::max(sc.hi[c], d[i]);
    }
    for (std::size_t c = 0; c < l.comps; ++c) {
      if (!std::isfinite(sc.lo[c])) sc.lo[c] = sc.hi[c] = 0.0;
    }
  }
  sc.fitted = true;
  return sc;
}

void apply_scaler(const FieldScaler& sc, std::span<double> data, std::size_t nodes) {
  check_fitted(sc, data.size(), nodes);
  const std::size_t comps = sc.components;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const std::size_t c = i % comps;
    if (sc.kind != ScalerKind::kMinMax) {
      const std::size_t s = (i / (comps * nodes)) % sc.steps;
      data[i] /= sc.scale[s * comps + c];
    } else {
      data[i] = (data[i] - sc.lo[c]) / std::max(sc.hi[c] - sc.lo[c], FieldScaler::kEpsilon);
    }
  }
}

void invert_scaler(const FieldScaler& sc, std::span<double> data, std::size_t nodes) {
  check_fitted(sc, data.size(), nodes);
  const std::size_t comps = sc.components;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const std::size_t c = i % comps;
    if (sc.kind != ScalerKind::kMinMax) {
      const std::size_t s = (i / (comps * nodes)) % sc.steps;
      data[i] *= sc.scale[s * comps + c];
    } else {
      data[i] = data[i] * std::max(sc.hi[c] - sc.lo[c], FieldScaler::kEpsilon) + sc.lo[c];
    }
  }
}

void apply_scaler(const FieldScaler& sc, Tensor& fields) {
  const Layout l = trailing_layout(fields);
  if (l.steps != sc.steps || l.comps != sc.components) {
    throw ShapeError("scaler: fitted for S=" + std::to_string(sc.steps) + ", C=" +
                     std::to_string(sc.components) + " but data is " + shape_string(fields.shape()));
  }
  apply_scaler(sc, fields.data(), l.nodes);
}

void invert_scaler(const FieldScaler& sc, Tensor& fields) {
  const Layout l = trailing_layout(fields);
  if (l.steps != sc.steps || l.comps != sc.components) {
    throw ShapeError("scaler: fitted for S=" + std::to_string(sc.steps) + ", C=" +
                     std::to_string(sc.components) + " but data is " + shape_string(fields.shape()));
  }
  invert_scaler(sc, fields.data(), l.nodes);
}

LoadScaler fit_load_scaler(std::span<const double> loads) {
  double m = 0.0;
  for (double x : loads) m = std::max(m, std::abs(x));
  return {std::max(m, FieldScaler::kEpsilon)};
}

CoordBox fit_coord_box(const Tensor& coords) {
  if (coords.rank() != 2 || coords.dim(1) != 2) throw ShapeError("coords must be [N x 2]");
  CoordBox box;
  for (int a = 0; a < 2; ++a) {
    box.lo[a] = std::numeric_limits<double>::infinity();
    box.hi[a] = -std::numeric_limits<double>::infinity();
  }
  for (std::size_t n = 0; n < coords.dim(0); ++n) {
    for (int a = 0; a < 2; ++a) {
      box.lo[a] = std::min(box.lo[a], coords[2 * n + a]);
      box.hi[a] = std::max(box.hi[a], coords[2 * n + a]);
    }
  }
  for (int a = 0; a < 2; ++a) {
    // A degenerate axis (single node) maps to the box centre.
    if (!(box.hi[a] > box.lo[a])) {
      box.lo[a] -= 0.5;
      box.hi[a] = box.lo[a] + 1.0;
    }
  }
  return box;
}

Tensor normalize_coords(const CoordBox& box, const Tensor& coords) {
  if (coords.rank() != 2 || coords.dim(1) != 2) throw ShapeError("coords must be [N x 2]");
  Tensor out = coords;
  for (std::size_t n = 0; n < coords.dim(0); ++n) {
    for (int a = 0; a < 2; ++a) {
      out[2 * n + a] = 2.0 * (coords[2 * n + a] - box.lo[a]) / (box.hi[a] - box.lo[a]) - 1.0;
    }
  }
  return out;
}

}  // namespace sdon
