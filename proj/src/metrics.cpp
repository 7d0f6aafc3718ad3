// SPDX-License-Identifier: Apache-2.0
#include "sdon/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "sdon/error.hpp"

namespace sdon {

namespace {

void check_same(std::span<const double> a, std::span<const double> b, const char* what) {
  if (a.size() != b.size()) {
    throw ShapeError(std::string(what) + ": length mismatch " + std::to_string(a.size()) + " vs " +
                     std::to_string(b.size()));
  }
  if (a.empty()) throw InvalidArgument(std::string(what) + ": empty input");
}

double nan_mean(const std::vector<double>& v) {
  double sum = 0.0;
  std::size_t n = 0;
  for (double x : v) {
    if (std::isnan(x)) continue;
    sum += x;
    ++n;
  }
  return n == 0 ? std::numeric_limits<double>::quiet_NaN() : sum / static_cast<double>(n);
}

}  // namespace

double mse_loss(std::span<const double> pred, std::span<const double> target) {
  check_same(pred, target, "mse_loss");
  double s = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) s += (pred[i] - target[i]) * (pred[i] - target[i]);
  return s / static_cast<double>(pred.size());
}

double rel_l2(std::span<const double> pred, std::span<const double> ref) {
  check_same(pred, ref, "rel_l2");
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    num += (ref[i] - pred[i]) * (ref[i] - pred[i]);
    den += ref[i] * ref[i];
  }
  if (den == 0.0) throw InvalidArgument("rel_l2: reference has zero norm");
  return std::sqrt(num / den) * 100.0;
}

double rel_l2_or_nan(std::span<const double> pred, std::span<const double> ref, double min_norm) {
  check_same(pred, ref, "rel_l2");
  double den = 0.0;
  for (double r : ref) den += r * r;
  if (std::sqrt(den) <= min_norm) return std::numeric_limits<double>::quiet_NaN();
  return rel_l2(pred, ref);
}

double mae(std::span<const double> pred, std::span<const double> ref) {
  check_same(pred, ref, "mae");
  double s = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) s += std::abs(ref[i] - pred[i]);
  return s / static_cast<double>(pred.size());
}

double r2(std::span<const double> pred, std::span<const double> ref) {
  check_same(pred, ref, "r2");
  double mean = 0.0;
  for (double r : ref) mean += r;
  mean /= static_cast<double>(ref.size());
  double ss_res = 0.0;
  double ss_tot = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    ss_res += (ref[i] - pred[i]) * (ref[i] - pred[i]);
    ss_tot += (ref[i] - mean) * (ref[i] - mean);
  }
  if (ss_tot == 0.0) return ss_res == 0.0 ? 1.0 : 0.0;
  return 1.0 - ss_res / ss_tot;
}

Aggregates aggregate_errors(const Tensor& errors) {
  if (errors.rank() != 2) throw ShapeError("aggregate_errors: expected [cases x steps]");
  const std::size_t rows = errors.dim(0);
  const std::size_t cols = errors.dim(1);
  Aggregates a;
  std::vector<double> buf;
  for (std::size_t i = 0; i < rows; ++i) {
    buf.assign(errors.data().begin() + static_cast<std::ptrdiff_t>(i * cols),
               errors.data().begin() + static_cast<std::ptrdiff_t>((i + 1) * cols));
    a.time_averaged.push_back(nan_mean(buf));
  }
  for (std::size_t j = 0; j < cols; ++j) {
    buf.clear();
    for (std::size_t i = 0; i < rows; ++i) buf.push_back(errors[i * cols + j]);
    a.case_averaged.push_back(nan_mean(buf));
  }
  return a;
}

Trend linear_trend(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ShapeError("linear_trend: length mismatch");
  if (x.size() < 2) throw InvalidArgument("linear_trend: need at least two points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw InvalidArgument("linear_trend: x values are all equal");
  Trend t;
  t.slope = sxy / sxx;
  t.intercept = my - t.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - (t.intercept + t.slope * x[i]);
    ss_res += e * e;
  }
  t.r2 = syy == 0.0 ? 0.0 : 1.0 - ss_res / syy;
  return t;
}

EvalReport evaluate(const Tensor& pred, const Tensor& ref, const Tensor& loads,
                    const std::vector<std::string>& component_names) {
  if (pred.shape() != ref.shape() || ref.rank() != 4) {
    throw ShapeError("evaluate: prediction " + shape_string(pred.shape()) + " vs reference " +
                     shape_string(ref.shape()));
  }
  EvalReport rep;
  rep.cases = ref.dim(0);
  rep.steps = ref.dim(1);
  rep.nodes = ref.dim(2);
  const std::size_t comps = ref.dim(3);
  if (component_names.size() != comps) throw ShapeError("evaluate: component name count mismatch");
  if (loads.rank() != 2 || loads.dim(0) != rep.cases) throw ShapeError("evaluate: loads must be [cases x S]");

  for (std::size_t k = 0; k < rep.cases; ++k) {
    double m = 0.0;
    for (std::size_t s = 0; s < loads.dim(1); ++s) m = std::max(m, std::abs(loads.at({k, s})));
    rep.load_magnitude.push_back(m);
  }

  std::vector<double> p_all;
  std::vector<double> r_all;
  std::vector<double> p_step(rep.nodes);
  std::vector<double> r_step(rep.nodes);
  for (std::size_t c = 0; c < comps; ++c) {
    ComponentMetrics cm;
    cm.name = component_names[c];
    p_all.clear();
    r_all.clear();
    Tensor per({rep.cases, rep.steps});
    for (std::size_t k = 0; k < rep.cases; ++k) {
      for (std::size_t s = 0; s < rep.steps; ++s) {
        for (std::size_t n = 0; n < rep.nodes; ++n) {
          p_step[n] = pred.at({k, s, n, c});
          r_step[n] = ref.at({k, s, n, c});
        }
        p_all.insert(p_all.end(), p_step.begin(), p_step.end());
        r_all.insert(r_all.end(), r_step.begin(), r_step.end());
        const double e = rel_l2_or_nan(p_step, r_step);
        if (std::isnan(e)) ++cm.undefined;
        per.at({k, s}) = e;
      }
    }
    cm.rel_l2 = rel_l2_or_nan(p_all, r_all);
    cm.mae = mae(p_all, r_all);
    cm.r2 = r2(p_all, r_all);
    Aggregates agg = aggregate_errors(per);
    cm.time_averaged = std::move(agg.time_averaged);
    cm.case_averaged = std::move(agg.case_averaged);

    std::vector<double> x;
    std::vector<double> y;
    for (std::size_t k = 0; k < rep.cases; ++k) {
      if (std::isnan(cm.time_averaged[k])) continue;
      x.push_back(rep.load_magnitude[k]);
      y.push_back(cm.time_averaged[k]);
    }
    if (x.size() >= 2 && std::any_of(x.begin(), x.end(), [&](double v) { return v != x.front(); })) {
      cm.trend = linear_trend(x, y);
    }
    rep.components.push_back(std::move(cm));
  }
  return rep;
}

namespace {

// JSON has no NaN; undefined values become null.
nlohmann::json num(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

nlohmann::json nums(const std::vector<double>& v) {
  nlohmann::json a = nlohmann::json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

}  // namespace

nlohmann::json to_json(const EvalReport& r) {
  nlohmann::json j;
  j["cases"] = r.cases;
  j["steps"] = r.steps;
  j["nodes"] = r.nodes;
  j["load_magnitude"] = nums(r.load_magnitude);
  for (const auto& c : r.components) {
    nlohmann::json jc;
    jc["name"] = c.name;
    jc["rel_l2_percent"] = num(c.rel_l2);
    jc["mae"] = num(c.mae);
    jc["r2"] = num(c.r2);
    jc["undefined_rel_l2"] = c.undefined;
    jc["time_averaged_rel_l2"] = nums(c.time_averaged);
    jc["case_averaged_rel_l2"] = nums(c.case_averaged);
    if (c.trend) {
      jc["trend"] = {{"slope", c.trend->slope}, {"intercept", c.trend->intercept}, {"r2", c.trend->r2}};
    } else {
      jc["trend"] = nullptr;
    }
    j["components"].push_back(jc);
  }
  return j;
}

std::string to_csv(const EvalReport& r) {
  std::ostringstream os;
  os.precision(17);
  os << "kind,component,index,value\n";
  for (const auto& c : r.components) {
    os << "rel_l2," << c.name << ",," << c.rel_l2 << "\n";
    os << "mae," << c.name << ",," << c.mae << "\n";
    os << "r2," << c.name << ",," << c.r2 << "\n";
    for (std::size_t k = 0; k < c.time_averaged.size(); ++k) {
      os << "time_averaged," << c.name << "," << k << "," << c.time_averaged[k] << "\n";
    }
    for (std::size_t s = 0; s < c.case_averaged.size(); ++s) {
      os << "case_averaged," << c.name << "," << s << "," << c.case_averaged[s] << "\n";
    }
    if (c.trend) {
      os << "trend_slope," << c.name << ",," << c.trend->slope << "\n";
      os << "trend_intercept," << c.name << ",," << c.trend->intercept << "\n";
      os << "trend_r2," << c.name << ",," << c.trend->r2 << "\n";
    }
  }
  for (std::size_t k = 0; k < r.load_magnitude.size(); ++k) {
    os << "load_magnitude,," << k << "," << r.load_magnitude[k] << "\n";
  }
  return os.str();
}

}  // namespace sdon
