// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>

#include "sdon/rbi.hpp"
#include "sdon/tensor.hpp"

namespace sdon::plasticity {

/// Elastic-plastic material with linear isotropic hardening
/// sigma_y = sigma_y0 + H * eqps. Defaults are a structural steel (MPa).
struct Material {
  double youngs = 2.09e5;
  double poisson = 0.3;
  double sigma_y0 = 235.0;
  double hardening = 800.0;

  double flow_stress(double eqps) const { return sigma_y0 + hardening * eqps; }
  void validate() const;
};

struct PlasticState {
  double eps_p = 0.0;      // signed plastic strain
  double eqps = 0.0;       // equivalent plastic strain, non-decreasing
  double sigma = 0.0;      // axial stress
};

struct BarGeometry {
  double length = 110.0;  // mm
};

struct BarOptions {
  std::size_t substeps = 10;  // per snapshot interval
  std::size_t nodes = 1;      // replicated pseudo-nodes in the output
};

// sqrt(s11^2 + s22^2 + s11*s22 + 3*s12^2), the form used for the data labels.
double von_mises_plane_stress(double s11, double s22, double s12);

/// Elastic predictor / plastic corrector for one strain increment. Exact for
/// a monotone increment under linear hardening.
PlasticState return_map(const PlasticState& state, double d_eps,
                        const Material& mat);

/// Integrates the bar along the piecewise-linear strain path through
/// (0, 0), (t_k, disp_k / length). Output is [S x N x 2] with components
/// (von Mises stress, equivalent plastic strain).
Tensor run_bar_case(const LoadProfile& profile, const Material& mat,
                    const BarGeometry& geom, const BarOptions& opts = {});

// Synthetic pseudo-node coordinates on a square lattice inside [0,1]^2.
Tensor pseudo_coordinates(std::size_t nodes);

}  // namespace sdon::plasticity
