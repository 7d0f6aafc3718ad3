// SPDX-License-Identifier: Apache-2.0
// Command-line driver: data generation, training, evaluation, inference,
// inversion and CSV exchange.
#include <CLI11.hpp>
#include <json.hpp>

#include <Eigen/Core>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "sdon/dataset.hpp"
#include "sdon/error.hpp"
#include "sdon/generate.hpp"
#include "sdon/inverse.hpp"
#include "sdon/metrics.hpp"
#include "sdon/surrogate.hpp"
#include "sdon/training.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace sdon;

namespace {

constexpr const char* kVersion = "0.1.0";

enum ExitCode { kOk = 0, kFailure = 1, kUsage = 2, kData = 3, kNumerical = 4 };

struct Options {
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  std::string out;
  std::string dtype = "f64";

  // gen-cavity
  std::size_t cases = 8;
  std::string grid = "61x21";
  std::size_t steps = 2000;
  std::size_t snapshots = 25;
  double t_total = 2.0;
  double dt = 0.0;  // 0: t_total / steps
  double rho = 1.0;
  double mu = 0.1;
  std::string poisson_mode = "fixed";
  std::size_t poisson_iterations = 50;
  double poisson_tol = 1e-6;
  std::size_t poisson_max = 200000;
  std::vector<double> bounds;

  // gen-bar
  std::size_t bar_snapshots = 40;
  std::size_t substeps = 10;
  std::size_t nodes = 1;

  // train
  std::string data;
  std::size_t epochs = 1000;
  std::size_t batch_size = 64;
  double lr = 1e-3;
  double lr_final_factor = 1.0;
  double split = 0.8;
  std::size_t hd = 32;
  std::vector<std::size_t> branch_hidden{64, 32, 32, 64};
  std::vector<std::size_t> trunk_hidden{101, 101, 101, 101, 101};
  std::string trunk_activation = "tanh";
  std::string scaler;  // default by problem
  std::size_t log_every = 0;

  // eval / infer / invert
  std::string model;
  std::string report;
  std::string split_file;
  std::string subset = "all";
  std::string load_csv;
  std::string coords;
  std::string target_csv;
  std::string reference_load_csv;
  std::string ga_config;
  std::size_t generations = 25;
  std::size_t population = 100;
  std::size_t parents = 10;
  std::size_t component = 0;
  bool as_f32 = false;

  // import/export
  std::string csv_dir;
  std::vector<std::string> component_names;
  std::string problem = "external";
};

void write_record(const CLI::App& app, const CLI::App& sub, const fs::path& out, const json& extra) {
  fs::create_directories(out);
  json rec;
  rec["subcommand"] = sub.get_name();
  rec["resolved_config"] = app.config_to_str(true, false);
  rec["versions"] = {{"sdon", kVersion},
                     {"format_version", kFormatVersion},
                     {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                   std::to_string(EIGEN_MINOR_VERSION)},
                     {"compiler", __VERSION__},
                     {"gru_convention", std::string(nn::kGruConvention)}};
  rec["details"] = extra;
  write_text(out / "run_record.json", rec.dump(2) + "\n");
}

std::pair<std::size_t, std::size_t> parse_grid(const std::string& g) {
  const auto x = g.find('x');
  if (x == std::string::npos) throw InvalidArgument("grid must look like NXxNY, got '" + g + "'");
  try {
    return {std::stoul(g.substr(0, x)), std::stoul(g.substr(x + 1))};
  } catch (const std::exception&) {
    throw InvalidArgument("grid must look like NXxNY, got '" + g + "'");
  }
}

// Two-column numeric CSV with a header line.
std::pair<std::vector<double>, std::vector<double>> read_xy_csv(const fs::path& path) {
  std::istringstream is(read_text(path));
  std::string line;
  std::getline(is, line);
  std::vector<double> x, y;
  while (std::getline(is, line)) {
    if (line.empty() || line == "\r") continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw DataError(path.string() + ": expected two columns");
    try {
      x.push_back(parse_number(std::string_view(line).substr(0, comma)));
      y.push_back(parse_number(std::string_view(line).substr(comma + 1)));
    } catch (const DataError& e) {
      throw DataError(path.string() + ": " + e.what() + " in line '" + line + "'");
    }
  }
  if (x.empty()) throw DataError(path.string() + ": no data rows");
  return {x, y};
}

// Piecewise-linear resampling of (t, v) onto `ts`; ts must lie inside the table.
std::vector<double> resample(const std::vector<double>& t, const std::vector<double>& v,
                             const std::vector<double>& ts) {
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (!(t[i] > t[i - 1])) throw DataError("CSV times must be strictly increasing");
  }
  std::vector<double> out;
  for (double q : ts) {
    const double slack = 1e-9 * std::max(1.0, std::abs(t.back()));
    if (q < t.front() - slack || q > t.back() + slack) {
      throw DataError("CSV does not cover t = " + std::to_string(q));
    }
    if (t.size() == 1) {
      out.push_back(v.front());
      continue;
    }
    std::size_t j = 1;
    while (j + 1 < t.size() && t[j] < q) ++j;
    const double w = std::clamp((q - t[j - 1]) / (t[j] - t[j - 1]), 0.0, 1.0);
    out.push_back(v[j - 1] + w * (v[j] - v[j - 1]));
  }
  return out;
}

Tensor read_coords_csv(const fs::path& path) {
  std::istringstream is(read_text(path));
  std::string line;
  std::getline(is, line);
  std::vector<double> xy;
  while (std::getline(is, line)) {
    if (line.empty() || line == "\r") continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(parse_number(cell));
    if (row.size() < 2) throw DataError(path.string() + ": expected x,y or node,x,y");
    xy.push_back(row[row.size() - 2]);
    xy.push_back(row[row.size() - 1]);
  }
  return Tensor({xy.size() / 2, 2}, xy);
}

// Coordinates from a dataset directory or a CSV file.
Tensor load_coords(const std::string& spec) {
  if (spec.empty()) throw InvalidArgument("--coords is required");
  if (fs::is_directory(spec)) return read_dataset(spec).coords;
  return read_coords_csv(spec);
}

int run_gen_cavity(const CLI::App& app, const CLI::App& sub, const Options& o) {
  CavityGenConfig cfg;
  cfg.cases = o.cases;
  cfg.seed = o.seed;
  cfg.threads = o.threads;
  const auto [nx, ny] = parse_grid(o.grid);
  cfg.params.grid = cavity::Grid{nx, ny, 3.0, 1.0};
  cfg.params.rho = o.rho;
  cfg.params.mu = o.mu;
  cfg.params.n_steps = o.steps;
  cfg.params.dt = o.dt > 0.0 ? o.dt : o.t_total / static_cast<double>(o.steps);
  cfg.params.n_snapshots = o.snapshots;
  if (o.poisson_mode == "fixed") {
    cfg.params.poisson = cavity::PoissonMode::fixed(o.poisson_iterations);
  } else if (o.poisson_mode == "tolerance") {
    cfg.params.poisson = cavity::PoissonMode::until(o.poisson_tol, o.poisson_max);
  } else {
    throw InvalidArgument("--poisson-mode must be fixed or tolerance");
  }
  if (!o.bounds.empty()) {
    if (o.bounds.size() != 2) throw InvalidArgument("--bounds takes two values");
    cfg.lo = o.bounds[0];
    cfg.hi = o.bounds[1];
  }
  std::vector<CaseDiagnostics> diag;
  const Dataset ds = generate_cavity(cfg, &diag);
  const fs::path out = o.out;
  write_dataset(ds, out, dtype_from_string(o.dtype));
  std::ostringstream csv;
  csv.precision(17);
  csv << "case,step,cfl,divergence,poisson_residual\n";
  for (const auto& d : diag) {
    for (const auto& s : d.steps) {
      csv << d.case_index << "," << s.step << "," << s.cfl << "," << s.divergence << "," << s.poisson_residual << "\n";
    }
  }
  write_text(out / "diagnostics.csv", csv.str());
  write_record(app, sub, out, {{"seed", o.seed}, {"generation", ds.generation}});
  std::cout << "wrote " << ds.cases() << " cavity cases to " << out << "\n";
  return kOk;
}

int run_gen_bar(const CLI::App& app, const CLI::App& sub, const Options& o) {
  BarGenConfig cfg;
  cfg.cases = o.cases;
  cfg.seed = o.seed;
  cfg.steps = o.bar_snapshots;
  cfg.options.substeps = o.substeps;
  cfg.options.nodes = o.nodes;
  cfg.threads = o.threads;
  if (!o.bounds.empty()) {
    if (o.bounds.size() != 2) throw InvalidArgument("--bounds takes two values");
    cfg.lo = o.bounds[0];
    cfg.hi = o.bounds[1];
  }
  const Dataset ds = generate_bar(cfg);
  write_dataset(ds, o.out, dtype_from_string(o.dtype));
  write_record(app, sub, o.out, {{"seed", o.seed}, {"generation", ds.generation}});
  std::cout << "wrote " << ds.cases() << " bar cases to " << o.out << "\n";
  return kOk;
}

int run_train(const CLI::App& app, const CLI::App& sub, const Options& o) {
  const Dataset ds = read_dataset(o.data);
  const ModelConfig mc = [&] {
    ModelConfig c = ModelConfig::make(o.hd, ds.steps(), ds.components(), o.branch_hidden, o.trunk_hidden);
    c.trunk_activation = nn::activation_from_string(o.trunk_activation);
    return c;
  }();
  TrainConfig tc;
  tc.epochs = o.epochs;
  tc.batch_size = o.batch_size;
  tc.lr = o.lr;
  tc.lr_final_factor = o.lr_final_factor;
  tc.seed = o.seed;
  tc.split_fraction = o.split;
  tc.validate();

  const Split split = split_indices(ds.cases(), o.seed, o.split);
  const Dataset train_set = ds.select(split.train);
  const std::string scaler = o.scaler.empty() ? (ds.problem == "bar1d" ? "minmax" : "step-maxabs") : o.scaler;
  Surrogate s = Surrogate::fit(train_set, mc, scaler_kind_from_string(scaler), o.seed);
  const TrainingSet ts = make_training_set(s, train_set);
  const TrainResult tr = train(s.model, ts, tc, [&](std::size_t epoch, double loss) {
    if (o.log_every > 0 && epoch % o.log_every == 0) std::cerr << "epoch " << epoch << " loss " << loss << "\n";
  });

  const fs::path out = o.out;
  write_checkpoint(s, out / "model", dtype_from_string(o.dtype));
  std::ostringstream csv;
  csv.precision(17);
  csv << "epoch,loss\n";
  for (std::size_t e = 0; e < tr.loss_curve.size(); ++e) csv << e << "," << tr.loss_curve[e] << "\n";
  write_text(out / "loss.csv", csv.str());
  write_text(out / "split.json", json{{"seed", o.seed}, {"fraction", o.split}, {"train", split.train}, {"test", split.test}}.dump(2) + "\n");
  write_record(app, sub, out,
               {{"seed", o.seed}, {"params", count_params(mc)}, {"scaler", scaler},
                {"final_loss", tr.loss_curve.empty() ? json(nullptr) : json(tr.loss_curve.back())}});
  std::cout << "trained " << count_params(mc) << " parameters for " << o.epochs << " epochs; model at "
            << (out / "model") << "\n";
  return kOk;
}

int run_eval(const CLI::App& app, const CLI::App& sub, const Options& o) {
  Dataset ds = read_dataset(o.data);
  const Surrogate s = read_checkpoint(o.model);
  s.check_compatible(ds);
  if (o.subset != "all") {
    if (o.split_file.empty()) throw InvalidArgument("--subset " + o.subset + " needs --split-file");
    const json split = json::parse(read_text(o.split_file));
    if (o.subset != "train" && o.subset != "test") throw InvalidArgument("--subset must be all, train or test");
    ds = ds.select(split.at(o.subset).get<std::vector<std::size_t>>());
  }
  const Tensor pred = s.predict(ds.loads, ds.coords);
  const EvalReport rep = evaluate(pred, ds.fields, ds.loads, ds.component_names);
  const fs::path out = o.report;
  fs::create_directories(out);
  write_text(out / "report.json", to_json(rep).dump(2) + "\n");
  write_text(out / "report.csv", to_csv(rep));
  write_record(app, sub, out, {{"cases", ds.cases()}, {"subset", o.subset}});
  for (const auto& c : rep.components) {
    std::printf("%-10s rel_l2 %8.4f%%  mae %.6g  r2 %.6f\n", c.name.c_str(), c.rel_l2, c.mae, c.r2);
  }
  return kOk;
}

int run_infer(const CLI::App& app, const CLI::App& sub, const Options& o) {
  std::vector<std::string> warnings;
  const Surrogate s = read_checkpoint(o.model, o.as_f32, &warnings);
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
  const std::size_t steps = s.model.config().steps;
  const auto [t, v] = read_xy_csv(o.load_csv);
  const auto times = output_times(steps, s.t_total);
  const std::vector<double> load = resample(t, v, times);
  const Tensor coords = load_coords(o.coords);
  const Tensor pred = s.predict(Tensor({1, steps}, load), coords);

  const fs::path out = o.out;
  fs::create_directories(out);
  std::ofstream os(out / "prediction.csv");
  if (!os) throw Error("cannot write " + (out / "prediction.csv").string());
  os.precision(17);
  os << "node,x,y,step,t";
  for (const auto& n : s.component_names) os << "," << n;
  os << "\n";
  const std::size_t n_nodes = coords.dim(0);
  const std::size_t comps = s.model.config().components;
  for (std::size_t n = 0; n < n_nodes; ++n) {
    for (std::size_t st = 0; st < steps; ++st) {
      os << n << "," << coords.at({n, 0}) << "," << coords.at({n, 1}) << "," << st << "," << times[st];
      for (std::size_t c = 0; c < comps; ++c) os << "," << pred.at({0, st, n, c});
      os << "\n";
    }
  }
  write_record(app, sub, out, {{"nodes", n_nodes}, {"steps", steps}, {"warnings", warnings}});
  return kOk;
}

GaConfig ga_config(const Options& o) {
  GaConfig g;
  g.generations = o.generations;
  g.population = o.population;
  g.parents_mating = o.parents;
  g.seed = o.seed;
  if (!o.ga_config.empty()) {
    const json j = json::parse(read_text(o.ga_config));
    g.generations = j.value("generations", g.generations);
    g.population = j.value("population", g.population);
    g.parents_mating = j.value("parents_mating", g.parents_mating);
    g.mutation_fraction = j.value("mutation_fraction", g.mutation_fraction);
    g.mutation_scale = j.value("mutation_scale", g.mutation_scale);
    g.elitism = j.value("elitism", g.elitism);
    g.seed = j.value("seed", g.seed);
    if (j.contains("lo")) g.lo = j.at("lo").get<std::vector<double>>();
    if (j.contains("hi")) g.hi = j.at("hi").get<std::vector<double>>();
  }
  g.validate();
  return g;
}

int run_invert(const CLI::App& app, const CLI::App& sub, const Options& o) {
  const Surrogate s = read_checkpoint(o.model);
  const std::size_t steps = s.model.config().steps;
  const auto times = output_times(steps, s.t_total);
  const auto [t, sig] = read_xy_csv(o.target_csv);
  const std::vector<double> target = resample(t, sig, times);
  const Tensor coords = load_coords(o.coords);
  const GaConfig cfg = ga_config(o);

  const PopulationMap forward = surrogate_map(s, coords, o.component);
  const GaResult res = run_ga(forward, target, cfg);
  const std::vector<double> best_load = genome_to_load(res.best_genome, steps, s.t_total);
  const std::vector<double> best_stress = forward({res.best_genome}).front();
  std::vector<double> ref_load;
  if (!o.reference_load_csv.empty()) {
    const auto [rt, rv] = read_xy_csv(o.reference_load_csv);
    ref_load = resample(rt, rv, times);
  }

  const fs::path out = o.out;
  fs::create_directories(out);
  std::ostringstream h;
  h.precision(17);
  h << "generation,best,mean\n";
  for (const auto& g : res.history) h << g.generation << "," << g.best << "," << g.mean << "\n";
  write_text(out / "ga_history.csv", h.str());
  std::ostringstream c;
  c.precision(17);
  c << "t,identified_load,reference_load,identified_stress,reference_stress\n";
  for (std::size_t st = 0; st < steps; ++st) {
    c << times[st] << "," << best_load[st] << "," << (ref_load.empty() ? std::string() : std::to_string(ref_load[st]))
      << "," << best_stress[st] << "," << target[st] << "\n";
  }
  write_text(out / "comparison.csv", c.str());
  write_record(app, sub, out,
               {{"seed", cfg.seed},
                {"best_genome", res.best_genome},
                {"best_fitness", res.best_fitness},
                {"mae", mae(best_stress, target)}});
  std::printf("best fitness %.6g  MAE %.6g\n", res.best_fitness, mae(best_stress, target));
  return kOk;
}

int run_export(const CLI::App& app, const CLI::App& sub, const Options& o) {
  const Dataset ds = read_dataset(o.data);
  export_csv(ds, o.out);
  write_record(app, sub, o.out, {{"cases", ds.cases()}});
  return kOk;
}

int run_import(const CLI::App& app, const CLI::App& sub, const Options& o) {
  Dataset ds = import_csv(o.csv_dir, o.component_names);
  ds.problem = o.problem;
  write_dataset(ds, o.out, dtype_from_string(o.dtype));
  write_record(app, sub, o.out, {{"cases", ds.cases()}});
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sequential DeepONet surrogate toolkit"};
  app.set_config("--config", "", "TOML/INI config file; command-line flags take precedence");
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* s, bool with_out = true) {
    s->add_option("--seed", o.seed, "RNG seed")->capture_default_str();
    s->add_option("--threads", o.threads, "worker threads")->capture_default_str();
    if (with_out) s->add_option("--out", o.out, "output directory")->required();
  };

  auto* gc = app.add_subcommand("gen-cavity", "simulate lid-driven cavity cases");
  common(gc);
  gc->add_option("--cases", o.cases)->capture_default_str();
  gc->add_option("--grid", o.grid, "NXxNY")->capture_default_str();
  gc->add_option("--steps", o.steps, "time steps per case")->capture_default_str();
  gc->add_option("--snapshots", o.snapshots)->capture_default_str();
  gc->add_option("--t-total", o.t_total, "simulated time (dt = t_total / steps)")->capture_default_str();
  gc->add_option("--dt", o.dt, "explicit time step, overrides --t-total")->capture_default_str();
  gc->add_option("--rho", o.rho)->capture_default_str();
  gc->add_option("--mu", o.mu)->capture_default_str();
  gc->add_option("--poisson-mode", o.poisson_mode, "fixed | tolerance")->capture_default_str();
  gc->add_option("--poisson-iterations", o.poisson_iterations)->capture_default_str();
  gc->add_option("--poisson-tol", o.poisson_tol)->capture_default_str();
  gc->add_option("--poisson-max", o.poisson_max)->capture_default_str();
  gc->add_option("--bounds", o.bounds, "lid velocity bounds lo hi")->expected(2);
  gc->add_option("--dtype", o.dtype, "f64 | f32")->capture_default_str();

  auto* gb = app.add_subcommand("gen-bar", "simulate 1D elastic-plastic bar cases");
  common(gb);
  gb->add_option("--cases", o.cases)->capture_default_str();
  gb->add_option("--snapshots", o.bar_snapshots)->capture_default_str();
  gb->add_option("--substeps", o.substeps)->capture_default_str();
  gb->add_option("--nodes", o.nodes, "replicated pseudo-nodes")->capture_default_str();
  gb->add_option("--bounds", o.bounds, "end displacement bounds lo hi (mm)")->expected(2);
  gb->add_option("--dtype", o.dtype, "f64 | f32")->capture_default_str();

  auto* tr = app.add_subcommand("train", "fit a model to a dataset");
  common(tr);
  tr->add_option("--data", o.data)->required();
  tr->add_option("--epochs", o.epochs, "optimizer steps")->capture_default_str();
  tr->add_option("--batch-size", o.batch_size)->capture_default_str();
  tr->add_option("--lr", o.lr)->capture_default_str();
  tr->add_option("--lr-final-factor", o.lr_final_factor, "exponential decay to lr * factor")->capture_default_str();
  tr->add_option("--split", o.split, "training fraction")->capture_default_str();
  tr->add_option("--hd", o.hd)->capture_default_str();
  tr->add_option("--branch-hidden", o.branch_hidden)->capture_default_str();
  tr->add_option("--trunk-hidden", o.trunk_hidden)->capture_default_str();
  tr->add_option("--trunk-activation", o.trunk_activation, "tanh | relu | linear")->capture_default_str();
  tr->add_option("--scaler", o.scaler, "step-maxabs | maxabs | minmax (default by problem)");
  tr->add_option("--log-every", o.log_every)->capture_default_str();
  tr->add_option("--dtype", o.dtype, "checkpoint dtype f64 | f32")->capture_default_str();

  auto* ev = app.add_subcommand("eval", "evaluate a model on a dataset");
  common(ev, false);
  ev->add_option("--data", o.data)->required();
  ev->add_option("--model", o.model)->required();
  ev->add_option("--report", o.report, "report directory")->required();
  ev->add_option("--split-file", o.split_file, "split.json written by train");
  ev->add_option("--subset", o.subset, "all | train | test")->capture_default_str();

  auto* in = app.add_subcommand("infer", "predict fields for one load history");
  common(in);
  in->add_option("--model", o.model)->required();
  in->add_option("--load-csv", o.load_csv, "CSV t,value")->required();
  in->add_option("--coords", o.coords, "CSV node,x,y or a dataset directory")->required();
  in->add_flag("--f32", o.as_f32, "downcast parameters to single precision");

  auto* iv = app.add_subcommand("invert", "identify a load history from a target stress history");
  common(iv);
  iv->add_option("--model", o.model)->required();
  iv->add_option("--target-csv", o.target_csv, "CSV t,sigma")->required();
  iv->add_option("--coords", o.coords, "CSV node,x,y or a dataset directory")->required();
  iv->add_option("--ga-config", o.ga_config, "JSON GA settings");
  iv->add_option("--reference-load-csv", o.reference_load_csv, "CSV t,value for the comparison table");
  iv->add_option("--generations", o.generations)->capture_default_str();
  iv->add_option("--population", o.population)->capture_default_str();
  iv->add_option("--parents", o.parents)->capture_default_str();
  iv->add_option("--component", o.component, "stress component index")->capture_default_str();

  auto* ex = app.add_subcommand("export", "write a dataset as CSV tables");
  common(ex);
  ex->add_option("--data", o.data)->required();

  auto* im = app.add_subcommand("import", "build a dataset from CSV tables");
  common(im);
  im->add_option("--csv-dir", o.csv_dir)->required();
  im->add_option("--components", o.component_names, "component names")->delimiter(',');
  im->add_option("--problem", o.problem)->capture_default_str();
  im->add_option("--dtype", o.dtype, "f64 | f32")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*gc) return run_gen_cavity(app, *gc, o);
    if (*gb) return run_gen_bar(app, *gb, o);
    if (*tr) return run_train(app, *tr, o);
    if (*ev) return run_eval(app, *ev, o);
    if (*in) return run_infer(app, *in, o);
    if (*iv) return run_invert(app, *iv, o);
    if (*ex) return run_export(app, *ex, o);
    if (*im) return run_import(app, *im, o);
  } catch (const ShapeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kData;
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kData;
  } catch (const NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumerical;
  } catch (const json::exception& e) {
    std::cerr << "error: malformed JSON input: " << e.what() << "\n";
    return kData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kUsage;
}
