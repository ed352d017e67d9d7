#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "gripdist/metrics.hpp"
#include "gripdist/mixture.hpp"
#include "gripdist/raster.hpp"

namespace grip {

/// Per-class sampling distributions for synthetic grip ground truth.
struct ClassGripGenerator {
  std::array<PiecewiseLinearDensity, kNumSurfaceStates> densities;
  const PiecewiseLinearDensity &for_state(SurfaceState s) const {
    return densities[static_cast<size_t>(s)];
  }
};

/// Built-in class densities: dry concentrated near the top of the grip
/// scale, snowy with its bulk in [0.3, 0.4], icy lowest, wet widest. The
/// same knot tables ship as data/class_densities_v1.csv.
ClassGripGenerator default_class_densities();

struct SceneConfig {
  uint32_t height = 120;
  uint32_t width = 64;
  uint32_t horizon = 40;
  /// Contiguous row bands below the horizon, top to bottom; fractions must
  /// sum to 1 within 1e-9.
  std::vector<std::pair<SurfaceState, double>> layout;
  void validate() const;
};

struct Scene {
  Raster<uint8_t> labels;
  GroundTruthSample gt;
};

/// Deterministic scene: banded labels below the horizon and one ground-truth
/// pixel per row on the centerline, its grip drawn by inverse CDF from the
/// row's class density on the stream keyed by (seed, row).
Scene generate_scene(const SceneConfig &cfg, const ClassGripGenerator &gen,
                     uint64_t seed, std::string sample_id = "scene");

struct SimulatorConfig {
  double accuracy = 1.0;       ///< probability the emitted argmax is correct
  double temperature = 0.25;   ///< softmax temperature on the unit logit gap
  double noise_sigma = 0.0;    ///< stddev of the mean-prediction noise
  double miscalibration = 1.0; ///< reported sigma = true sigma / this factor
  int ensemble_size = 5;
  int dropout_samples = 10;
  void validate() const;
};

/// Softmax class probabilities whose argmax equals the true label with
/// probability cfg.accuracy (uniform choice among the other classes
/// otherwise).
Raster<float> simulate_classifier(const Raster<uint8_t> &labels,
                                  const SimulatorConfig &cfg, uint64_t seed);

struct RegressorOutputs {
  Raster<float> normal;   ///< channels (mu, s)
  Raster<float> quantile; ///< channels (q_low, q_high)
  Raster<float> ensemble; ///< ensemble_size channels
  Raster<float> dropout;  ///< dropout_samples channels
};

/// Stand-ins for the regression heads, driven by each ground-truth pixel's
/// class density: the reported spread is the analytic spread divided by the
/// miscalibration factor, which reproduces overconfident intervals for
/// factors above one. Rows without ground truth get the dry-class values.
RegressorOutputs simulate_regressors(const GroundTruthSample &sample,
                                     uint32_t image_width,
                                     const ClassGripGenerator &gen,
                                     const SimulatorConfig &cfg, uint64_t seed);

} // namespace grip
