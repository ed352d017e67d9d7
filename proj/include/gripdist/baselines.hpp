#pragma once

#include <span>
#include <vector>

#include "gripdist/mixture.hpp"
#include "gripdist/raster.hpp"

namespace grip {

/// Inverse standard normal CDF, |Phi(z) - p| <= 1e-12 on (0,1).
double normal_quantile(double p);

struct MeanVarField {
  uint32_t height = 0;
  uint32_t width = 0;
  std::vector<double> mean;
  std::vector<double> variance;
};

/// Per-pixel mean and population variance over the M stack members.
MeanVarField ensemble_stats(const Raster<float> &stack);

/// Summary of per-pixel Gaussians given as (mu, s = log sigma^2) channels.
/// s is capped to [-60, 60] before exponentiation.
GripSummaryRaster gaussian_summary(const Raster<float> &mu_s);

/// Gaussian summarization of an M-member prediction stack. The MC dropout
/// combiner is identical; the two names exist so reports can attribute the
/// provenance of a stack.
GripSummaryRaster ensemble_summary(const Raster<float> &stack);
GripSummaryRaster mc_dropout_summary(const Raster<float> &stack);

struct QuantileSummaryResult {
  GripSummaryRaster summary; ///< has_median/has_sigma are false
  std::vector<uint8_t> crossed;
  size_t crossed_count = 0;
};

/// Summary of raw (q_low, q_high) channel pairs. Crossed pairs are swapped
/// and flagged rather than rejected.
QuantileSummaryResult quantile_summary(const Raster<float> &quantiles);

// ---- training losses, each with its analytic gradient ----

struct LossGrad {
  double loss = 0.0;
  std::vector<double> grad;
};

LossGrad weighted_mse_loss(std::span<const double> y, std::span<const double> f,
                           std::span<const double> w);

struct GaussianLossGrad {
  double loss = 0.0;
  std::vector<double> grad_mu;
  std::vector<double> grad_s;
};

/// Negative log-likelihood with the variance parameterized as s = log sigma^2.
GaussianLossGrad gaussian_nll_loss(std::span<const double> y,
                                   std::span<const double> mu,
                                   std::span<const double> s,
                                   std::span<const double> w);

/// alpha*(y-yhat) when y > yhat, else (1-alpha)*(yhat-y).
double pinball(double y, double yhat, double alpha);

struct QuantileLossGrad {
  double loss = 0.0;
  std::vector<double> grad_low;
  std::vector<double> grad_high;
};

QuantileLossGrad quantile_loss(std::span<const double> y,
                               std::span<const double> q_low,
                               std::span<const double> q_high,
                               std::span<const double> w,
                               double alpha_low = 0.05,
                               double alpha_high = 0.95);

struct FocalLossGrad {
  double loss = 0.0;
  double grad_py = 0.0;
};

/// Focal term for one pixel; p_y is floored at 1e-12 before the log.
FocalLossGrad focal_loss(std::span<const double> class_probs, int y,
                         double gamma, double w);

} // namespace grip
