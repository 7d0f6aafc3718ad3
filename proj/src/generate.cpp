// SPDX-License-Identifier: Apache-2.0
#include "sdon/generate.hpp"

#include <atomic>
#include <exception>
#include <functional>
#include <thread>

#include "sdon/error.hpp"
#include "sdon/rbi.hpp"

namespace sdon {

using nlohmann::json;

namespace {

// Runs job(k) for k in [0, n) on up to `threads` workers. Each job writes its
// own slot, so the outcome is independent of scheduling.
void for_each_case(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& job) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < n; k = next++) {
      try {
        job(k);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const std::size_t w = std::max<std::size_t>(1, std::min(threads, n));
  if (w == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < w; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (std::size_t k = 0; k < n; ++k) {
    if (!errors[k]) continue;
    try {
      std::rethrow_exception(errors[k]);
    } catch (const NumericalError& e) {
      throw NumericalError("case " + std::to_string(k) + ": " + e.what());
    }
  }
}

Tensor control_table(const std::vector<LoadProfile>& profiles) {
  Tensor t({profiles.size(), kControlPoints});
  for (std::size_t k = 0; k < profiles.size(); ++k) {
    for (std::size_t j = 0; j < kControlPoints; ++j) t.at({k, j}) = profiles[k].control.values[j];
  }
  return t;
}

Tensor load_table(const std::vector<LoadProfile>& profiles, std::size_t steps) {
  Tensor t({profiles.size(), steps});
  for (std::size_t k = 0; k < profiles.size(); ++k) {
    std::copy(profiles[k].samples.begin(), profiles[k].samples.end(),
              t.data().begin() + static_cast<std::ptrdiff_t>(k * steps));
  }
  return t;
}

}  // namespace

Dataset generate_cavity(const CavityGenConfig& cfg, std::vector<CaseDiagnostics>* diagnostics) {
  const cavity::Params& p = cfg.params;
  p.validate();
  const std::size_t steps = p.n_snapshots;
  const auto profiles = sample_profiles(cfg.seed, cfg.cases, cfg.lo, cfg.hi, steps, p.t_total());
  const std::size_t n = p.grid.nodes();

  Dataset ds;
  ds.problem = "cavity";
  ds.component_names = {"P", "u", "v"};
  ds.coords = cavity::coordinates(p.grid);
  ds.loads = load_table(profiles, steps);
  ds.controls = control_table(profiles);
  ds.fields = Tensor({cfg.cases, steps, n, 3});
  std::vector<CaseDiagnostics> diag(cfg.cases);
  const std::size_t block = steps * n * 3;
  for_each_case(cfg.cases, cfg.threads, [&](std::size_t k) {
    cavity::CaseResult r = cavity::run_cavity_case(profiles[k], p);
    std::copy(r.snapshots.data().begin(), r.snapshots.data().end(),
              ds.fields.data().begin() + static_cast<std::ptrdiff_t>(k * block));
    diag[k] = {k, std::move(r.diagnostics)};
  });
  if (diagnostics != nullptr) *diagnostics = std::move(diag);

  ds.seed = cfg.seed;
  ds.generation = {{"generator", "cavity"},
                   {"nx", p.grid.nx},
                   {"ny", p.grid.ny},
                   {"lx", p.grid.lx},
                   {"ly", p.grid.ly},
                   {"rho", p.rho},
                   {"mu", p.mu},
                   {"dt", p.dt},
                   {"n_steps", p.n_steps},
                   {"snapshots", steps},
                   {"poisson_mode", p.poisson.kind == cavity::PoissonMode::Kind::kFixed ? "fixed" : "tolerance"},
                   {"poisson_iterations", p.poisson.iterations},
                   {"poisson_tolerance", p.poisson.tolerance},
                   {"load_bounds", {cfg.lo, cfg.hi}},
                   {"t_total", p.t_total()}};
  return ds;
}

Dataset generate_bar(const BarGenConfig& cfg) {
  cfg.material.validate();
  const auto profiles = sample_profiles(cfg.seed, cfg.cases, cfg.lo, cfg.hi, cfg.steps, cfg.t_total);
  const std::size_t n = cfg.options.nodes;

  Dataset ds;
  ds.problem = "bar1d";
  ds.component_names = {"von_mises", "eqps"};
  ds.coords = plasticity::pseudo_coordinates(n);
  ds.loads = load_table(profiles, cfg.steps);
  ds.controls = control_table(profiles);
  ds.fields = Tensor({cfg.cases, cfg.steps, n, 2});
  const std::size_t block = cfg.steps * n * 2;
  for_each_case(cfg.cases, cfg.threads, [&](std::size_t k) {
    const Tensor r = plasticity::run_bar_case(profiles[k], cfg.material, cfg.geometry, cfg.options);
    std::copy(r.data().begin(), r.data().end(), ds.fields.data().begin() + static_cast<std::ptrdiff_t>(k * block));
  });

  ds.seed = cfg.seed;
  ds.generation = {{"generator", "bar1d"},
                   {"snapshots", cfg.steps},
                   {"youngs", cfg.material.youngs},
                   {"poisson", cfg.material.poisson},
                   {"sigma_y0", cfg.material.sigma_y0},
                   {"hardening", cfg.material.hardening},
                   {"length", cfg.geometry.length},
                   {"substeps", cfg.options.substeps},
                   {"nodes", n},
                   {"load_bounds", {cfg.lo, cfg.hi}},
                   {"t_total", cfg.t_total}};
  return ds;
}

}  // namespace sdon
