// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace sdon {

inline constexpr std::size_t kControlPoints = 6;

/// Six control points of a load history. Generated profiles use uniformly
/// spaced times over [0, T] and start from a zero load.
struct ControlPoints {
  std::array<double, kControlPoints> times{};
  std::array<double, kControlPoints> values{};

  static ControlPoints uniform(double t_total,
                               const std::array<double, kControlPoints>& values);
};

/// Cubic radial basis interpolant with a linear polynomial tail:
///   s(t) = sum_i w_i |t - t_i|^3 + a + b t
/// with sum_i w_i = 0 and sum_i w_i t_i = 0.
struct RbiInterpolant {
  std::array<double, kControlPoints> centers{};
  std::array<double, kControlPoints> rbf_weights{};
  std::array<double, 2> poly_coeffs{};  // a, b

  double operator()(double t) const;
};

// Throws InvalidArgument for unsorted or duplicate times.
RbiInterpolant fit_rbi(const ControlPoints& cp);

// Throws InvalidArgument for any t outside [centers.front(), centers.back()].
std::vector<double> eval_rbi(const RbiInterpolant& interp,
                             std::span<const double> ts);

/// A load history sampled at the snapshot times k * T / S, k = 1..S.
struct LoadProfile {
  std::vector<double> samples;
  ControlPoints control;
  double t_total = 1.0;
};

// Snapshot times k * t_total / steps for k = 1..steps (t = 0 excluded).
std::vector<double> output_times(std::size_t steps, double t_total);

LoadProfile make_profile(const ControlPoints& cp, std::size_t steps,
                         double t_total);

/// values[0] = 0, values[1..5] i.i.d. uniform in [lo, hi].
std::vector<LoadProfile> sample_profiles(std::uint64_t seed,
                                         std::size_t n_cases, double lo,
                                         double hi, std::size_t steps,
                                         double t_total);

}  // namespace sdon
