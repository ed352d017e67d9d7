#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "gripdist/mixture.hpp"

namespace grip {

struct GroundTruthPixel {
  uint32_t row = 0;
  uint32_t col = 0;
  double grip = 0.0;
  SurfaceState state = SurfaceState::Dry;
};

struct GroundTruthSample {
  std::string id;
  std::vector<GroundTruthPixel> pixels;
  uint32_t image_height = 0;
  uint32_t horizon_row = 0;
};

/// Per-pixel loss weights: linear in the row index from the horizon down to
/// the bottom edge (floored at 1e-3), then rescaled so the mean over the
/// sample's ground-truth pixels is exactly one.
std::vector<double> pixel_weights(const GroundTruthSample &sample);

/// Evaluation clamping of a confidence interval: the lower bound is clamped
/// to [0.1, 0.81]; upper bounds above 0.81 are rounded up to 0.82, others
/// clamped to [0.1, 0.81].
std::pair<double, double> clamp_interval_for_eval(double p05, double p95);

struct EvalOptions {
  bool clamp = true;
  bool weighted_coverage = true;
};

struct SampleMetrics {
  std::string sample_id;
  double wmse_mean = 0.0;
  double wmse_median = 0.0;
  bool has_median = true;
  double frac_sigma = 0.0;
  bool has_sigma = true;
  double frac_90 = 0.0;
  double frac_over_p5 = 0.0;
  double mean_interval_len = 0.0;
  double mean_p5 = 0.0;
  std::vector<double> violations; ///< P5 - g for pixels with g < P5, unweighted
};

SampleMetrics sample_metrics(const GripSummaryRaster &summary,
                             const GroundTruthSample &sample,
                             const EvalOptions &opts = {});

enum class ViolationMode { PerSampleAverage, Pooled };

struct MetricReport {
  std::optional<double> rmse_mean, rmse_median;
  std::optional<double> f_sigma, f_90, f_over_p5; ///< percentages
  std::optional<double> mean_interval_len, mean_p5;
  std::optional<double> viol_p50, viol_p70, viol_p90;
};

/// Test-set aggregation: per-sample metrics first, then averaged. Records are
/// processed in sample-id order with compensated summation, so the result
/// does not depend on input ordering.
MetricReport aggregate(std::vector<SampleMetrics> records,
                       ViolationMode mode = ViolationMode::PerSampleAverage);

/// Percentile with linear interpolation between order statistics.
double linear_percentile(std::vector<double> values, double p);

void write_report_csv(const std::filesystem::path &path,
                      const std::vector<std::pair<std::string, MetricReport>> &rows);
void print_report_table(std::ostream &os,
                        const std::vector<std::pair<std::string, MetricReport>> &rows);

} // namespace grip
