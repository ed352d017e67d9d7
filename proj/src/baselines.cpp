#include "gripdist/baselines.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace grip {

// Wichura's PPND16 rational approximations; relative error below 1e-15.
double normal_quantile(double p) {
  if (!(p > 0.0) || !(p < 1.0))
    throw std::invalid_argument("normal_quantile: p must be in (0,1)");
  const double q = p - 0.5;
  if (std::fabs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    const double num =
        (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
              6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
            1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
          1.3314166789178437745e2) * r + 3.3871328727963666080e0);
    const double den =
        (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
              3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
            5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
          4.2313330701600911252e1) * r + 1.0);
    return q * num / den;
  }
  double r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double z;
  if (r <= 5.0) {
    r -= 1.6;
    const double num =
        (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
              2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
            3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
          4.63033784615654529590e0) * r + 1.42343711074968357734e0);
    const double den =
        (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
              1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
            6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
          2.05319162663775882187e0) * r + 1.0);
    z = num / den;
  } else {
    r -= 5.0;
    const double num =
        (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
              1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
            2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
          5.46378491116411436990e0) * r + 6.65790464350110377720e0);
    const double den =
        (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
              1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
            1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
          5.99832206555887937690e-1) * r + 1.0);
    z = num / den;
  }
  return q < 0.0 ? -z : z;
}

MeanVarField ensemble_stats(const Raster<float> &stack) {
  if (stack.channels < 2)
    throw std::invalid_argument("ensemble_stats: need at least 2 members");
  const int M = stack.channels;
  MeanVarField out;
  out.height = stack.height;
  out.width = stack.width;
  const size_t n = stack.pixel_count();
  out.mean.resize(n);
  out.variance.resize(n);
  for (size_t i = 0; i < n; ++i) {
    const float *px = stack.data.data() + i * size_t(M);
    double mu = 0.0;
    for (int m = 0; m < M; ++m)
      mu += double(px[m]);
    mu /= M;
    double var = 0.0;
    for (int m = 0; m < M; ++m) {
      const double d = mu - double(px[m]);
      var += d * d;
    }
    var /= M;
    out.mean[i] = mu;
    out.variance[i] = var;
  }
  return out;
}

namespace {

const double kZ05 = normal_quantile(0.05);
const double kZ95 = normal_quantile(0.95);

SummaryRecord gaussian_record(double mu, double sigma) {
  SummaryRecord r;
  r.mean = mu;
  r.median = mu;
  r.p05 = mu + kZ05 * sigma;
  r.p95 = mu + kZ95 * sigma;
  r.sigma_low = mu - sigma;
  r.sigma_high = mu + sigma;
  return r;
}

} // namespace

GripSummaryRaster gaussian_summary(const Raster<float> &mu_s) {
  if (mu_s.channels != 2)
    throw std::invalid_argument("gaussian_summary: expected (mu, s) channels");
  GripSummaryRaster out(mu_s.height, mu_s.width);
  for (size_t i = 0; i < out.pixels.size(); ++i) {
    const double mu = double(mu_s.data[i * 2]);
    double s = double(mu_s.data[i * 2 + 1]);
    if (!std::isfinite(mu) || !std::isfinite(s))
      throw std::invalid_argument("gaussian_summary: non-finite prediction");
    if (s < -60.0)
      s = -60.0;
    if (s > 60.0)
      s = 60.0;
    out.pixels[i] = gaussian_record(mu, std::exp(0.5 * s));
  }
  return out;
}

GripSummaryRaster ensemble_summary(const Raster<float> &stack) {
  const MeanVarField st = ensemble_stats(stack);
  GripSummaryRaster out(stack.height, stack.width);
  for (size_t i = 0; i < out.pixels.size(); ++i)
    out.pixels[i] = gaussian_record(st.mean[i], std::sqrt(st.variance[i]));
  return out;
}

GripSummaryRaster mc_dropout_summary(const Raster<float> &stack) {
  return ensemble_summary(stack);
}

QuantileSummaryResult quantile_summary(const Raster<float> &quantiles) {
  if (quantiles.channels != 2)
    throw std::invalid_argument("quantile_summary: expected (q_low, q_high) channels");
  QuantileSummaryResult res;
  res.summary = GripSummaryRaster(quantiles.height, quantiles.width);
  res.summary.has_median = false;
  res.summary.has_sigma = false;
  res.crossed.assign(res.summary.pixels.size(), 0);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (size_t i = 0; i < res.summary.pixels.size(); ++i) {
    double lo = double(quantiles.data[i * 2]);
    double hi = double(quantiles.data[i * 2 + 1]);
    if (!std::isfinite(lo) || !std::isfinite(hi))
      throw std::invalid_argument("quantile_summary: non-finite prediction");
    if (lo > hi) {
      std::swap(lo, hi);
      res.crossed[i] = 1;
      ++res.crossed_count;
    }
    SummaryRecord &r = res.summary.pixels[i];
    r.mean = (lo + hi) / 2.0;
    r.median = nan;
    r.p05 = lo;
    r.p95 = hi;
    r.sigma_low = nan;
    r.sigma_high = nan;
  }
  return res;
}

namespace {

void check_lengths(size_t n, std::initializer_list<size_t> sizes,
                   std::span<const double> w) {
  if (n == 0)
    throw std::invalid_argument("loss: empty input");
  for (size_t s : sizes)
    if (s != n)
      throw std::invalid_argument("loss: input length mismatch");
  for (double v : w)
    if (!(v >= 0.0))
      throw std::invalid_argument("loss: negative weight");
}

} // namespace

LossGrad weighted_mse_loss(std::span<const double> y, std::span<const double> f,
                           std::span<const double> w) {
  const size_t n = y.size();
  check_lengths(n, {f.size(), w.size()}, w);
  LossGrad out;
  out.grad.resize(n);
  for (size_t i = 0; i < n; ++i) {
    const double d = y[i] - f[i];
    out.loss += w[i] * d * d;
    out.grad[i] = -(2.0 / double(n)) * w[i] * d;
  }
  out.loss /= double(n);
  return out;
}

GaussianLossGrad gaussian_nll_loss(std::span<const double> y,
                                   std::span<const double> mu,
                                   std::span<const double> s,
                                   std::span<const double> w) {
  const size_t n = y.size();
  check_lengths(n, {mu.size(), s.size(), w.size()}, w);
  GaussianLossGrad out;
  out.grad_mu.resize(n);
  out.grad_s.resize(n);
  for (size_t i = 0; i < n; ++i) {
    const double inv_var = std::exp(-s[i]);
    const double d = y[i] - mu[i];
    out.loss += w[i] * (0.5 * inv_var * d * d + 0.5 * s[i]);
    out.grad_mu[i] = -(w[i] / double(n)) * inv_var * d;
    out.grad_s[i] = (w[i] / double(n)) * (-0.5 * inv_var * d * d + 0.5);
  }
  out.loss /= double(n);
  return out;
}

double pinball(double y, double yhat, double alpha) {
  if (!(alpha > 0.0) || !(alpha < 1.0))
    throw std::invalid_argument("pinball: alpha must be in (0,1)");
  const double d = y - yhat;
  return d > 0.0 ? alpha * d : (1.0 - alpha) * (-d);
}

QuantileLossGrad quantile_loss(std::span<const double> y,
                               std::span<const double> q_low,
                               std::span<const double> q_high,
                               std::span<const double> w, double alpha_low,
                               double alpha_high) {
  const size_t n = y.size();
  check_lengths(n, {q_low.size(), q_high.size(), w.size()}, w);
  QuantileLossGrad out;
  out.grad_low.resize(n);
  out.grad_high.resize(n);
  for (size_t i = 0; i < n; ++i) {
    out.loss += w[i] * (pinball(y[i], q_low[i], alpha_low) +
                        pinball(y[i], q_high[i], alpha_high));
    // d rho / d qhat: -alpha above the prediction, (1-alpha) at or below
    const double gl = y[i] - q_low[i] > 0.0 ? -alpha_low : 1.0 - alpha_low;
    const double gh = y[i] - q_high[i] > 0.0 ? -alpha_high : 1.0 - alpha_high;
    out.grad_low[i] = (w[i] / double(n)) * gl;
    out.grad_high[i] = (w[i] / double(n)) * gh;
  }
  out.loss /= double(n);
  return out;
}

FocalLossGrad focal_loss(std::span<const double> class_probs, int y,
                         double gamma, double w) {
  if (y < 0 || size_t(y) >= class_probs.size())
    throw std::invalid_argument("focal_loss: class index out of range");
  if (!(gamma >= 0.0))
    throw std::invalid_argument("focal_loss: gamma must be >= 0");
  double p = class_probs[size_t(y)];
  if (!(p >= 0.0) || !(p <= 1.0))
    throw std::invalid_argument("focal_loss: probability outside [0,1]");
  if (p < 1e-12)
    p = 1e-12;
  const double u = 1.0 - p;
  FocalLossGrad out;
  if (u <= 0.0) {
    out.loss = 0.0;
    out.grad_py = gamma == 0.0 ? -w / p : 0.0;
    return out;
  }
  const double logp = std::log(p);
  const double ug = std::pow(u, gamma);
  out.loss = w * (-ug * logp);
  const double term1 =
      gamma > 0.0 ? gamma * std::pow(u, gamma - 1.0) * logp : 0.0;
  out.grad_py = w * (term1 - ug / p);
  return out;
}

} // namespace grip
