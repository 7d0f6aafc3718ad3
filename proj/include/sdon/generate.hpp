// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "sdon/cavity.hpp"
#include "sdon/dataset.hpp"
#include "sdon/plasticity.hpp"

namespace sdon {

struct CavityGenConfig {
  std::size_t cases = 8;
  std::uint64_t seed = 0;
  cavity::Params params;
  double lo = -2.0;  // lid velocity sampling bounds
  double hi = 2.0;
  std::size_t threads = 1;
};

struct CaseDiagnostics {
  std::size_t case_index = 0;
  std::vector<cavity::StepDiagnostics> steps;
};

/// Samples lid histories and runs one simulation per case. Failures are
/// rethrown with the offending case index. Results do not depend on the
/// thread count.
Dataset generate_cavity(const CavityGenConfig& cfg, std::vector<CaseDiagnostics>* diagnostics = nullptr);

struct BarGenConfig {
  std::size_t cases = 200;
  std::uint64_t seed = 0;
  std::size_t steps = 40;
  double lo = -5.5;  // end displacement bounds, mm
  double hi = 5.5;
  double t_total = 1.0;
  plasticity::Material material;
  plasticity::BarGeometry geometry;
  plasticity::BarOptions options;
  std::size_t threads = 1;
};

Dataset generate_bar(const BarGenConfig& cfg);

}  // namespace sdon
