#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gripdist/metrics.hpp"
#include "gripdist/synth.hpp"

namespace grip {

inline const std::vector<std::string> kBenchMethods = {
    "ensemble", "mc_dropout", "gaussian", "quantile", "gvrs", "ideal_gvrs"};

struct BenchConfig {
  int scenes = 200;
  SceneConfig scene;
  SimulatorConfig sim;
  std::vector<std::string> methods = kBenchMethods;
  EvalOptions eval;
  ViolationMode violation_mode = ViolationMode::PerSampleAverage;
  int threads = 1;
  /// Class densities used both to draw ground truth and as the fusion
  /// tables; empty means the built-in defaults.
  std::vector<PiecewiseLinearDensity> densities;
  void validate() const;
};

struct ScatterPoint {
  std::string sample_id;
  double gt_grip_mean = 0.0;
  double p05_mean = 0.0;
};

struct BenchResult {
  std::vector<std::pair<std::string, MetricReport>> reports;
  std::map<std::string, std::vector<ScatterPoint>> scatter;
  size_t ground_truth_pixels = 0;
};

/// Full synthetic benchmark: scene generation, model stand-ins, per-method
/// summaries, and test-set aggregation. Deterministic in (config, seed).
BenchResult run_bench(const BenchConfig &cfg, uint64_t seed);

} // namespace grip
