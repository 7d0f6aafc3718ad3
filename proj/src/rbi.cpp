// SPDX-License-Identifier: Apache-2.0
#include "sdon/rbi.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "sdon/error.hpp"
#include "sdon/random.hpp"

namespace sdon {

namespace {

constexpr std::size_t kSystem = kControlPoints + 2;

double cubic(double r) { return r * r * r; }

}  // namespace

ControlPoints ControlPoints::uniform(
    double t_total, const std::array<double, kControlPoints>& values) {
  if (!(t_total > 0.0)) throw InvalidArgument("t_total must be positive");
  ControlPoints cp;
  for (std::size_t i = 0; i < kControlPoints; ++i) {
    cp.times[i] = t_total * static_cast<double>(i) /
                  static_cast<double>(kControlPoints - 1);
  }
  cp.values = values;
  return cp;
}

double RbiInterpolant::operator()(double t) const {
  double s = poly_coeffs[0] + poly_coeffs[1] * t;
  for (std::size_t i = 0; i < kControlPoints; ++i) {
    s += rbf_weights[i] * cubic(std::abs(t - centers[i]));
  }
  return s;
}

RbiInterpolant fit_rbi(const ControlPoints& cp) {
  for (std::size_t i = 1; i < kControlPoints; ++i) {
    if (!(cp.times[i] > cp.times[i - 1])) {
      throw InvalidArgument(
          "rbi: control times must be strictly increasing (singular system)");
    }
  }

  Eigen::Matrix<double, kSystem, kSystem> a =
      Eigen::Matrix<double, kSystem, kSystem>::Zero();
  Eigen::Matrix<double, kSystem, 1> rhs = Eigen::Matrix<double, kSystem, 1>::Zero();
  for (std::size_t i = 0; i < kControlPoints; ++i) {
    for (std::size_t j = 0; j < kControlPoints; ++j) {
      a(i, j) = cubic(std::abs(cp.times[i] - cp.times[j]));
    }
    a(i, kControlPoints) = 1.0;
    a(i, kControlPoints + 1) = cp.times[i];
    a(kControlPoints, i) = 1.0;
    a(kControlPoints + 1, i) = cp.times[i];
    rhs(i) = cp.values[i];
  }

  Eigen::FullPivLU<Eigen::Matrix<double, kSystem, kSystem>> lu(a);
  if (lu.rank() < static_cast<Eigen::Index>(kSystem)) {
    throw InvalidArgument("rbi: augmented interpolation system is singular");
  }
  const Eigen::Matrix<double, kSystem, 1> sol = lu.solve(rhs);

  RbiInterpolant interp;
  interp.centers = cp.times;
  for (std::size_t i = 0; i < kControlPoints; ++i) interp.rbf_weights[i] = sol(i);
  interp.poly_coeffs = {sol(kControlPoints), sol(kControlPoints + 1)};
  return interp;
}

std::vector<double> eval_rbi(const RbiInterpolant& interp,
                             std::span<const double> ts) {
  const double lo = interp.centers.front();
  const double hi = interp.centers.back();
  // Snapshot times are computed as k*T/S and can miss the end by an ulp.
  const double slack = 1e-12 * std::max(1.0, hi - lo);
  std::vector<double> out;
  out.reserve(ts.size());
  for (double t : ts) {
    if (!(t >= lo - slack && t <= hi + slack)) {
      throw InvalidArgument("rbi: evaluation time " + std::to_string(t) +
                            " outside [" + std::to_string(lo) + ", " +
                            std::to_string(hi) + "]");
    }
    out.push_back(interp(t));
  }
  return out;
}

std::vector<double> output_times(std::size_t steps, double t_total) {
  std::vector<double> ts(steps);
  for (std::size_t k = 0; k < steps; ++k) {
    ts[k] = t_total * static_cast<double>(k + 1) / static_cast<double>(steps);
  }
  return ts;
}

LoadProfile make_profile(const ControlPoints& cp, std::size_t steps,
                         double t_total) {
  if (steps == 0) throw InvalidArgument("profile needs at least one step");
  LoadProfile profile;
  profile.control = cp;
  profile.t_total = t_total;
  profile.samples = eval_rbi(fit_rbi(cp), output_times(steps, t_total));
  return profile;
}

std::vector<LoadProfile> sample_profiles(std::uint64_t seed,
                                         std::size_t n_cases, double lo,
                                         double hi, std::size_t steps,
                                         double t_total) {
  if (!(lo < hi)) throw InvalidArgument("sample_profiles: need lo < hi");
  if (n_cases == 0) throw InvalidArgument("sample_profiles: n_cases >= 1");
  Rng rng(seed);
  std::vector<LoadProfile> out;
  out.reserve(n_cases);
  for (std::size_t c = 0; c < n_cases; ++c) {
    std::array<double, kControlPoints> values{};
    for (std::size_t i = 1; i < kControlPoints; ++i) values[i] = rng.uniform(lo, hi);
    out.push_back(
        make_profile(ControlPoints::uniform(t_total, values), steps, t_total));
  }
  return out;
}

}  // namespace sdon
