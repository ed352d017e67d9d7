// gripdist command line: fit grip densities, fuse probability rasters into
// grip summaries, generate synthetic scenes, and run the benchmark suite.
//
// Exit codes: 0 success, 2 input/validation error, 3 numerical failure.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <iostream>
#include <sstream>

#include "gripdist/bench.hpp"
#include "gripdist/config.hpp"
#include "gripdist/csv_io.hpp"
#include "gripdist/manifest.hpp"
#include "gripdist/raster.hpp"
#include "gripdist/version.hpp"

namespace fs = std::filesystem;
using namespace grip;

namespace {

double ms_since(std::chrono::steady_clock::time_point t0) {
  const auto dt = std::chrono::steady_clock::now() - t0;
  return std::chrono::duration<double, std::milli>(dt).count();
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

RunManifest make_manifest(const std::string &subcommand, uint64_t seed) {
  RunManifest m;
  m.tool_version = GRIPDIST_VERSION;
  m.subcommand = subcommand;
  m.seed = seed;
  return m;
}

int cmd_fit(const std::string &hist_path, int intervals,
            const std::string &out_path) {
  if (intervals < 2)
    throw std::invalid_argument("--intervals must be at least 2");
  const auto hists = load_histogram_csv(hist_path);
  std::vector<PiecewiseLinearDensity> densities;
  for (const auto &h : hists) {
    FitDiagnostics diag;
    densities.push_back(fit_from_histogram(h, intervals, {}, &diag));
    std::printf("fit %-8s mse %.6g (start %.6g, %d evaluations)\n",
                h.class_name.c_str(), diag.objective_final,
                diag.objective_initial, diag.evaluations);
  }
  write_density_csv(out_path, densities);

  RunManifest m = make_manifest("fit", 0);
  m.config["intervals"] = std::to_string(intervals);
  m.config["out"] = fs::path(out_path).filename().string();
  m.add_input(hist_path);
  m.write(out_path + ".manifest.json");
  return 0;
}

int cmd_fuse(const std::string &densities_path, const std::string &probs_path,
             const std::string &out_path, int threads) {
  auto t0 = std::chrono::steady_clock::now();
  const auto header = peek_grr1_header(probs_path);
  if (header.dtype != kGrr1DtypeF32 || header.channels != kNumSurfaceStates)
    throw std::invalid_argument(
        "probability raster must be float32 with 5 channels");
  const auto densities = load_density_csv(densities_path);
  const auto table = MixtureTable::build(densities);
  const auto probs = load_grr1_f32(probs_path);
  const double load_ms = ms_since(t0);

  t0 = std::chrono::steady_clock::now();
  FuseOptions opts;
  opts.threads = threads;
  const auto summary = fuse_raster(table, probs, opts);
  const double fuse_ms = ms_since(t0);

  t0 = std::chrono::steady_clock::now();
  save_grr1(out_path, summary_to_raster(summary));
  const double save_ms = ms_since(t0);

  std::printf("fused %ux%u pixels: load %.1f ms, fuse %.1f ms, write %.1f ms\n",
              probs.height, probs.width, load_ms, fuse_ms, save_ms);

  RunManifest m = make_manifest("fuse", 0);
  m.config["threads"] = std::to_string(threads);
  m.config["out"] = fs::path(out_path).filename().string();
  m.add_input(densities_path);
  m.add_input(probs_path);
  m.write(out_path + ".manifest.json");
  return 0;
}

SceneConfig scene_from_config(const KeyValueConfig &cfg) {
  SceneConfig scene;
  scene.height = cfg.get_u32("height", scene.height);
  scene.width = cfg.get_u32("width", scene.width);
  scene.horizon = cfg.get_u32("horizon", scene.horizon);
  scene.layout = parse_layout(cfg.get_string(
      "layout", "dry:0.35,wet:0.2,snowy:0.2,icy:0.15,slushy:0.1"));
  return scene;
}

SimulatorConfig sim_from_config(const KeyValueConfig &cfg) {
  SimulatorConfig sim;
  sim.accuracy = cfg.get_double("accuracy", sim.accuracy);
  sim.temperature = cfg.get_double("temperature", sim.temperature);
  sim.noise_sigma = cfg.get_double("noise_sigma", sim.noise_sigma);
  sim.miscalibration = cfg.get_double("miscalibration", sim.miscalibration);
  sim.ensemble_size = cfg.get_int("ensemble_size", sim.ensemble_size);
  sim.dropout_samples = cfg.get_int("dropout_samples", sim.dropout_samples);
  return sim;
}

void copy_config(const KeyValueConfig &cfg, RunManifest &m) {
  for (const auto &[k, v] : cfg.values())
    m.config[k] = v;
}

int cmd_synth(const std::string &config_path, uint64_t seed,
              const std::string &out_dir) {
  const auto cfg = KeyValueConfig::parse_file(config_path);
  cfg.require_known_keys(
      {"height", "width", "horizon", "layout", "accuracy", "temperature"});
  const SceneConfig scene_cfg = scene_from_config(cfg);
  SimulatorConfig sim;
  sim.accuracy = cfg.get_double("accuracy", 1.0);
  sim.temperature = cfg.get_double("temperature", 0.25);

  const auto gen = default_class_densities();
  const Scene scene = generate_scene(scene_cfg, gen, seed, "scene_000000");
  const auto probs = simulate_classifier(scene.labels, sim, seed);

  fs::create_directories(out_dir);
  const fs::path dir(out_dir);
  save_grr1(dir / "labels.grr1", scene.labels);
  save_grr1(dir / "probs.grr1", probs);
  write_ground_truth_csv(dir / "ground_truth.csv", scene.gt);

  RunManifest m = make_manifest("synth", seed);
  copy_config(cfg, m);
  m.add_input(config_path);
  m.write(dir / "manifest.json");
  std::printf("scene %ux%u with %zu ground-truth pixels written to %s\n",
              scene_cfg.height, scene_cfg.width, scene.gt.pixels.size(),
              out_dir.c_str());
  return 0;
}

int cmd_bench(const std::string &config_path, uint64_t seed,
              const std::string &out_dir, int threads) {
  const auto cfg = KeyValueConfig::parse_file(config_path);
  cfg.require_known_keys({"scenes", "height", "width", "horizon", "layout",
                          "accuracy", "temperature", "noise_sigma",
                          "miscalibration", "ensemble_size", "dropout_samples",
                          "methods", "clamp", "weighted_coverage",
                          "violation_mode", "densities"});
  BenchConfig bench;
  bench.scenes = cfg.get_int("scenes", 200);
  bench.scene = scene_from_config(cfg);
  bench.sim = sim_from_config(cfg);
  bench.methods = cfg.get_list(
      "methods", "ensemble,mc_dropout,gaussian,quantile,gvrs,ideal_gvrs");
  bench.eval.clamp = cfg.get_bool("clamp", true);
  bench.eval.weighted_coverage = cfg.get_bool("weighted_coverage", true);
  const std::string vmode = cfg.get_string("violation_mode", "per_sample");
  if (vmode == "per_sample")
    bench.violation_mode = ViolationMode::PerSampleAverage;
  else if (vmode == "pooled")
    bench.violation_mode = ViolationMode::Pooled;
  else
    throw std::invalid_argument(
        "bench: violation_mode must be per_sample or pooled");
  bench.threads = threads;
  RunManifest m = make_manifest("bench", seed);
  if (cfg.has("densities")) {
    const fs::path dpath =
        fs::path(config_path).parent_path() / cfg.get_string("densities", "");
    bench.densities = load_density_csv(dpath);
    m.add_input(dpath);
  }

  const BenchResult result = run_bench(bench, seed);

  fs::create_directories(out_dir);
  const fs::path dir(out_dir);
  write_report_csv(dir / "report.csv", result.reports);
  for (const auto &[method, points] : result.scatter) {
    std::ostringstream out;
    out << "sample_id,gt_grip_mean,p05_mean\n";
    for (const auto &p : points)
      out << p.sample_id << ',' << fmt(p.gt_grip_mean) << ','
          << fmt(p.p05_mean) << '\n';
    write_file_atomic(dir / ("scatter_" + method + ".csv"), out.str());
  }
  copy_config(cfg, m);
  m.config["threads"] = std::to_string(threads);
  m.add_input(config_path);
  m.write(dir / "manifest.json");

  std::printf("%d scenes, %zu ground-truth pixels\n", bench.scenes,
              result.ground_truth_pixels);
  print_report_table(std::cout, result.reports);
  return 0;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"grip distribution toolkit"};
  app.set_version_flag("--version", GRIPDIST_VERSION);
  app.require_subcommand(1);

  std::string hist_path, densities_path, probs_path, config_path, out_path;
  int intervals = 20;
  int threads = 1;
  uint64_t seed = 0;

  auto *fit = app.add_subcommand("fit", "fit class grip densities to histograms");
  fit->add_option("histograms", hist_path, "histogram csv")->required();
  fit->add_option("--intervals", intervals, "piecewise-linear intervals");
  fit->add_option("--out", out_path, "output density csv")->required();

  auto *fuse =
      app.add_subcommand("fuse", "fuse class probabilities into grip summaries");
  fuse->add_option("densities", densities_path, "density csv")->required();
  fuse->add_option("probs", probs_path, "probability raster (GRR1)")->required();
  fuse->add_option("--out", out_path, "output summary raster")->required();
  fuse->add_option("--threads", threads, "worker threads");

  auto *synth = app.add_subcommand("synth", "generate a synthetic scene");
  synth->add_option("--config", config_path, "scene config")->required();
  synth->add_option("--seed", seed, "random seed");
  synth->add_option("--out", out_path, "output directory")->required();

  auto *bench = app.add_subcommand("bench", "run the synthetic benchmark");
  bench->add_option("--config", config_path, "bench config")->required();
  bench->add_option("--seed", seed, "random seed");
  bench->add_option("--out", out_path, "output directory")->required();
  bench->add_option("--threads", threads, "worker threads");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (fit->parsed())
      return cmd_fit(hist_path, intervals, out_path);
    if (fuse->parsed())
      return cmd_fuse(densities_path, probs_path, out_path, threads);
    if (synth->parsed())
      return cmd_synth(config_path, seed, out_path);
    return cmd_bench(config_path, seed, out_path, threads);
  } catch (const std::invalid_argument &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception &e) {
    std::cerr << "failure: " << e.what() << "\n";
    return 3;
  }
}
