// SPDX-License-Identifier: Apache-2.0
#include "sdon/plasticity.hpp"

#include <cmath>

#include "sdon/error.hpp"

namespace sdon::plasticity {

void Material::validate() const {
  if (!(youngs > 0.0)) throw InvalidArgument("material: E must be positive");
  if (!(poisson >= 0.0 && poisson < 0.5)) throw InvalidArgument("material: nu must be in [0, 0.5)");
  if (!(sigma_y0 > 0.0)) throw InvalidArgument("material: initial yield must be positive");
  if (!(hardening >= 0.0)) throw InvalidArgument("material: H must be non-negative");
}

double von_mises_plane_stress(double s11, double s22, double s12) {
  const double radicand = s11 * s11 + s22 * s22 + s11 * s22 + 3.0 * s12 * s12;
  if (!(radicand >= 0.0)) throw InvalidArgument("von Mises: negative radicand");
  return std::sqrt(radicand);
}

PlasticState return_map(const PlasticState& state, double d_eps,
                        const Material& mat) {
  const double trial = state.sigma + mat.youngs * d_eps;
  const double yield = mat.flow_stress(state.eqps);
  PlasticState next = state;
  if (std::abs(trial) <= yield) {
    next.sigma = trial;
    return next;
  }
  const double sign = trial > 0.0 ? 1.0 : -1.0;
  const double d_gamma = (std::abs(trial) - yield) / (mat.youngs + mat.hardening);
  next.sigma = trial - sign * mat.youngs * d_gamma;
  next.eps_p += sign * d_gamma;
  next.eqps += d_gamma;
  return next;
}

Tensor run_bar_case(const LoadProfile& profile, const Material& mat,
                    const BarGeometry& geom, const BarOptions& opts) {
  mat.validate();
  if (!(geom.length > 0.0)) throw InvalidArgument("bar: length must be positive");
  if (opts.substeps == 0 || opts.nodes == 0) {
    throw InvalidArgument("bar: substeps and nodes must be positive");
  }
  const std::size_t steps = profile.samples.size();
  const std::size_t nodes = opts.nodes;
  Tensor out({steps, nodes, 2});

  PlasticState state;
  double eps_prev = 0.0;
  for (std::size_t s = 0; s < steps; ++s) {
    const double eps = profile.samples[s] / geom.length;
    const double d_eps = (eps - eps_prev) / static_cast<double>(opts.substeps);
    for (std::size_t k = 0; k < opts.substeps; ++k) state = return_map(state, d_eps, mat);
    eps_prev = eps;

    const double vm = von_mises_plane_stress(state.sigma, 0.0, 0.0);
    for (std::size_t n = 0; n < nodes; ++n) {
      out.at({s, n, 0}) = vm;
      out.at({s, n, 1}) = state.eqps;
    }
  }
  return out;
}

Tensor pseudo_coordinates(std::size_t nodes) {
  Tensor c({nodes, 2});
  if (nodes == 1) {
    c[0] = 0.5;
    c[1] = 0.5;
    return c;
  }
  const auto side = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(nodes))));
  for (std::size_t n = 0; n < nodes; ++n) {
    const std::size_t i = n % side;
    const std::size_t j = n / side;
    c[2 * n] = (static_cast<double>(i) + 0.5) / static_cast<double>(side);
    c[2 * n + 1] = (static_cast<double>(j) + 0.5) / static_cast<double>(side);
  }
  return c;
}

}  // namespace sdon::plasticity
