#include "gripdist/pl_density.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gripdist/segment_math.hpp"

namespace grip {

void GripHistogram::validate() const {
  if (edges.size() < 2)
    throw std::invalid_argument("histogram: need at least one bin");
  if (counts.size() + 1 != edges.size())
    throw std::invalid_argument("histogram: counts/edges size mismatch");
  for (size_t i = 0; i + 1 < edges.size(); ++i)
    if (!(edges[i] < edges[i + 1]))
      throw std::invalid_argument("histogram: edges must be strictly increasing");
  double t = 0.0;
  for (double c : counts) {
    if (!(c >= 0.0) || !std::isfinite(c))
      throw std::invalid_argument("histogram: negative or non-finite count");
    t += c;
  }
  if (!(t > 0.0))
    throw std::invalid_argument("histogram: total count must be positive");
}

double GripHistogram::total() const {
  double t = 0.0;
  for (double c : counts)
    t += c;
  return t;
}

namespace {

double trapezoid_integral(const std::vector<double> &knots,
                          const std::vector<double> &values) {
  double s = 0.0;
  for (size_t i = 0; i + 1 < knots.size(); ++i)
    s += 0.5 * (values[i] + values[i + 1]) * (knots[i + 1] - knots[i]);
  return s;
}

} // namespace

PiecewiseLinearDensity PiecewiseLinearDensity::build(std::string class_name,
                                                     std::vector<double> knots,
                                                     std::vector<double> densities,
                                                     bool auto_normalize) {
  if (knots.size() != densities.size() || knots.size() < 2)
    throw std::invalid_argument("density: need matching knot/density vectors of length >= 2");
  bool any_positive = false;
  for (size_t i = 0; i < knots.size(); ++i) {
    if (!std::isfinite(knots[i]) || !std::isfinite(densities[i]))
      throw std::invalid_argument("density: non-finite input");
    if (i + 1 < knots.size() && !(knots[i] < knots[i + 1]))
      throw std::invalid_argument("density: knots must be strictly increasing");
    if (densities[i] < 0.0)
      throw std::invalid_argument("density: negative density value");
    if (densities[i] > 0.0)
      any_positive = true;
  }
  if (!any_positive)
    throw std::invalid_argument("density: all density values are zero");

  const double integral = trapezoid_integral(knots, densities);
  if (auto_normalize) {
    const double scale = 1.0 / integral;
    for (double &v : densities)
      v *= scale;
  } else if (std::fabs(integral - 1.0) > 1e-6) {
    throw std::invalid_argument("density: integral deviates from 1 beyond 1e-6");
  }

  PiecewiseLinearDensity d;
  d.class_name_ = std::move(class_name);
  d.knots_ = std::move(knots);
  d.values_ = std::move(densities);
  const size_t n = d.knots_.size() - 1;
  d.seg_h_.resize(n);
  d.seg_a_.resize(n);
  d.seg_b_.resize(n);
  d.cum_.resize(n + 1);
  d.cum_[0] = 0.0;
  for (size_t j = 0; j < n; ++j) {
    d.seg_h_[j] = d.knots_[j + 1] - d.knots_[j];
    d.seg_a_[j] = d.values_[j];
    d.seg_b_[j] = d.values_[j + 1];
    d.cum_[j + 1] = d.cum_[j] + 0.5 * (d.seg_a_[j] + d.seg_b_[j]) * d.seg_h_[j];
  }
  return d;
}

PiecewiseLinearDensity PiecewiseLinearDensity::from_parts(
    std::string class_name, std::vector<double> knots,
    std::vector<double> values, std::vector<double> seg_a,
    std::vector<double> seg_b, std::vector<double> cum) {
  PiecewiseLinearDensity d;
  d.class_name_ = std::move(class_name);
  d.knots_ = std::move(knots);
  d.values_ = std::move(values);
  d.seg_a_ = std::move(seg_a);
  d.seg_b_ = std::move(seg_b);
  d.cum_ = std::move(cum);
  const size_t n = d.knots_.size() - 1;
  d.seg_h_.resize(n);
  for (size_t j = 0; j < n; ++j)
    d.seg_h_[j] = d.knots_[j + 1] - d.knots_[j];
  return d;
}

double PiecewiseLinearDensity::pdf(double g) const {
  if (!(g >= knots_.front()) || !(g <= knots_.back()))
    return 0.0;
  if (g == knots_.back())
    return values_.back();
  const size_t i =
      size_t(std::upper_bound(knots_.begin(), knots_.end(), g) - knots_.begin()) - 1;
  if (g == knots_[i])
    return values_[i];
  const double m = detail::segment_slope(seg_a_[i], seg_b_[i], seg_h_[i]);
  return seg_a_[i] + m * (g - knots_[i]);
}

double PiecewiseLinearDensity::cdf(double g) const {
  if (!(g > knots_.front()))
    return 0.0;
  if (g > knots_.back())
    return 1.0;
  if (g == knots_.back())
    return cum_.back();
  const size_t i =
      size_t(std::upper_bound(knots_.begin(), knots_.end(), g) - knots_.begin()) - 1;
  const double m = detail::segment_slope(seg_a_[i], seg_b_[i], seg_h_[i]);
  return cum_[i] + detail::segment_cdf_inc(seg_a_[i], m, g - knots_[i]);
}

double PiecewiseLinearDensity::quantile(double p) const {
  if (!(p >= 0.0) || !(p <= 1.0))
    throw std::invalid_argument("quantile: p must be in [0,1]");
  return detail::quantile_from_tables(p, segments(), knots_.data(),
                                      seg_h_.data(), cum_.data(), 1,
                                      seg_a_.data(), 1, seg_b_.data(), 1);
}

PiecewiseLinearDensity::MeanMedian PiecewiseLinearDensity::moments() const {
  return {mean(), quantile(0.5)};
}

double PiecewiseLinearDensity::mean() const {
  double acc = 0.0;
  for (size_t j = 0; j < seg_h_.size(); ++j) {
    const double m = detail::segment_slope(seg_a_[j], seg_b_[j], seg_h_[j]);
    acc += detail::segment_mean_term(knots_[j], seg_a_[j], m, seg_h_[j]);
  }
  return acc;
}

double PiecewiseLinearDensity::variance() const {
  double second = 0.0;
  for (size_t j = 0; j < seg_h_.size(); ++j) {
    const double m = detail::segment_slope(seg_a_[j], seg_b_[j], seg_h_[j]);
    second += detail::segment_second_moment_term(knots_[j], seg_a_[j], m, seg_h_[j]);
  }
  const double mu = mean();
  const double var = second - mu * mu;
  return var > 0.0 ? var : 0.0;
}

// ---------------------------------------------------------------------------
// Histogram fitting
// ---------------------------------------------------------------------------

namespace {

struct FitLayout {
  double lo = 0.0, hi = 0.0;     // pinned support
  std::vector<double> centers;   // bin centers, ascending
  std::vector<double> hist_pdf;  // count / (total * width) per bin
  int n_intervals = 0;
  static constexpr double kIncrementFloor = 1e-6;

  int dim() const { return 2 * n_intervals; }

  // params = [z_1..z_{n-1}, q_0..q_n]; knot gaps are z^2 + floor with an
  // implicit final gap of 1, densities are q^2.
  void decode(std::span<const double> params, std::vector<double> &knots,
              std::vector<double> &values) const {
    const int n = n_intervals;
    knots.resize(size_t(n) + 1);
    values.resize(size_t(n) + 1);
    double cumsum = 0.0;
    std::vector<double> cums(size_t(n) - 1);
    for (int i = 0; i < n - 1; ++i) {
      const double z = params[size_t(i)];
      cumsum += z * z + kIncrementFloor;
      cums[size_t(i)] = cumsum;
    }
    const double total = cumsum + 1.0;
    knots[0] = lo;
    for (int i = 1; i < n; ++i)
      knots[size_t(i)] = lo + (hi - lo) * (cums[size_t(i) - 1] / total);
    knots[size_t(n)] = hi;
    for (int i = 0; i <= n; ++i) {
      const double q = params[size_t(n) - 1 + size_t(i)];
      values[size_t(i)] = q * q;
    }
  }

  // MSE between histogram density and the candidate function at bin centers.
  double objective(std::span<const double> params) const {
    std::vector<double> knots, values;
    decode(params, knots, values);
    double sse = 0.0;
    size_t j = 0;
    for (size_t k = 0; k < centers.size(); ++k) {
      const double c = centers[k];
      double fitted = 0.0;
      if (c >= knots.front() && c <= knots.back()) {
        while (j + 2 < knots.size() && knots[j + 1] < c)
          ++j;
        const double h = knots[j + 1] - knots[j];
        const double m = (values[j + 1] - values[j]) / h;
        fitted = values[j] + m * (c - knots[j]);
      }
      const double diff = hist_pdf[k] - fitted;
      sse += diff * diff;
    }
    return sse / double(centers.size());
  }
};

} // namespace

PiecewiseLinearDensity fit_from_histogram(const GripHistogram &hist,
                                          int n_intervals,
                                          const SimplexOptions &nm_opts,
                                          FitDiagnostics *diag) {
  hist.validate();
  if (n_intervals < 2)
    throw std::invalid_argument("fit: n_intervals must be >= 2");
  const size_t bins = hist.counts.size();
  if (int(bins) < n_intervals + 1)
    throw std::invalid_argument("fit: need at least n_intervals+1 histogram bins");

  size_t first = bins, last = bins;
  for (size_t k = 0; k < bins; ++k)
    if (hist.counts[k] > 0.0) {
      if (first == bins)
        first = k;
      last = k;
    }
  FitLayout lay;
  lay.lo = hist.edges[first];
  lay.hi = hist.edges[last + 1];
  if (!(lay.hi - lay.lo > 1e-12))
    throw std::invalid_argument("fit: degenerate histogram support");
  lay.n_intervals = n_intervals;

  const double total = hist.total();
  lay.centers.resize(bins);
  lay.hist_pdf.resize(bins);
  for (size_t k = 0; k < bins; ++k) {
    lay.centers[k] = 0.5 * (hist.edges[k] + hist.edges[k + 1]);
    lay.hist_pdf[k] = hist.counts[k] / (total * (hist.edges[k + 1] - hist.edges[k]));
  }

  // Deterministic start: equally spaced knots, densities read off the
  // histogram at each knot.
  std::vector<double> x0(size_t(lay.dim()));
  const double z_unit = std::sqrt(1.0 - FitLayout::kIncrementFloor);
  for (int i = 0; i < n_intervals - 1; ++i)
    x0[size_t(i)] = z_unit;
  auto hist_pdf_at = [&](double g) {
    size_t k = size_t(std::upper_bound(hist.edges.begin(), hist.edges.end(), g) -
                      hist.edges.begin());
    if (k == 0)
      return lay.hist_pdf.front();
    if (k >= hist.edges.size())
      return lay.hist_pdf.back();
    return lay.hist_pdf[k - 1];
  };
  for (int i = 0; i <= n_intervals; ++i) {
    const double k = lay.lo + (lay.hi - lay.lo) * (double(i) / n_intervals);
    x0[size_t(n_intervals) - 1 + size_t(i)] = std::sqrt(hist_pdf_at(k));
  }

  ObjectiveSpec obj;
  obj.dimension = lay.dim();
  obj.evaluate = [&lay](std::span<const double> p) { return lay.objective(p); };

  const MinimizeResult res = minimize(obj, x0, nm_opts);
  if (diag) {
    diag->objective_initial = lay.objective(x0);
    diag->objective_final = res.best_value;
    diag->evaluations = res.evaluations;
  }
  if (!std::isfinite(res.best_value))
    throw std::runtime_error("fit: optimizer returned a non-finite objective");

  std::vector<double> knots, values;
  lay.decode(res.best_point, knots, values);
  bool any = false;
  for (double v : values)
    any = any || v > 0.0;
  if (!any)
    throw std::runtime_error("fit: optimizer collapsed to an all-zero density");
  return PiecewiseLinearDensity::build(hist.class_name, std::move(knots),
                                       std::move(values), /*auto_normalize=*/true);
}

} // namespace grip
