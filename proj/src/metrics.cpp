#include "gripdist/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace grip {

namespace {

struct NeumaierSum {
  double s = 0.0, c = 0.0;
  void add(double v) {
    const double t = s + v;
    if (std::fabs(s) >= std::fabs(v))
      c += (s - t) + v;
    else
      c += (v - t) + s;
    s = t;
  }
  double value() const { return s + c; }
};

void validate_sample(const GroundTruthSample &sample) {
  if (sample.pixels.empty())
    throw std::invalid_argument("sample: no ground-truth pixels");
  if (sample.image_height == 0 || sample.horizon_row >= sample.image_height)
    throw std::invalid_argument("sample: horizon row must lie above the image bottom");
  for (const auto &p : sample.pixels)
    if (p.row >= sample.image_height)
      throw std::invalid_argument("sample: pixel row out of bounds");
}

} // namespace

std::vector<double> pixel_weights(const GroundTruthSample &sample) {
  validate_sample(sample);
  const double bottom = double(sample.image_height) - 1.0;
  const double horizon = double(sample.horizon_row);
  if (!(bottom > horizon))
    throw std::invalid_argument("sample: no rows below the horizon");
  bool any_below = false;
  std::vector<double> w(sample.pixels.size());
  for (size_t i = 0; i < w.size(); ++i) {
    const double r = double(sample.pixels[i].row);
    any_below = any_below || r > horizon;
    w[i] = std::max((r - horizon) / (bottom - horizon), 1e-3);
  }
  if (!any_below)
    throw std::invalid_argument("sample: all pixels at or above the horizon");
  double sum = 0.0;
  for (double v : w)
    sum += v;
  const double scale = double(w.size()) / sum;
  for (double &v : w)
    v *= scale;
  return w;
}

std::pair<double, double> clamp_interval_for_eval(double p05, double p95) {
  if (!std::isfinite(p05) || !std::isfinite(p95))
    throw std::invalid_argument("clamp_interval_for_eval: non-finite bound");
  double lo = std::clamp(p05, 0.1, 0.81);
  double hi = p95 > 0.81 ? 0.82 : std::clamp(p95, 0.1, 0.81);
  if (hi < lo)
    hi = lo;
  return {lo, hi};
}

SampleMetrics sample_metrics(const GripSummaryRaster &summary,
                             const GroundTruthSample &sample,
                             const EvalOptions &opts) {
  const std::vector<double> w = pixel_weights(sample);
  SampleMetrics out;
  out.sample_id = sample.id;
  out.has_median = summary.has_median;
  out.has_sigma = summary.has_sigma;

  const size_t n = sample.pixels.size();
  double wsum = 0.0;
  double se_mean = 0.0, se_median = 0.0;
  double cov90 = 0.0, cov_sigma = 0.0, cov_over = 0.0;
  double len_sum = 0.0, p5_sum = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const auto &px = sample.pixels[i];
    if (px.row >= summary.height || px.col >= summary.width)
      throw std::invalid_argument("sample pixel not covered by summary raster");
    const SummaryRecord &rec = summary.at(px.row, px.col);
    const double g = px.grip;
    const double cw = opts.weighted_coverage ? w[i] : 1.0;
    wsum += cw;

    const double dm = g - rec.mean;
    se_mean += w[i] * dm * dm;
    if (out.has_median) {
      const double dd = g - rec.median;
      se_median += w[i] * dd * dd;
    }

    double lo = rec.p05, hi = rec.p95;
    if (opts.clamp)
      std::tie(lo, hi) = clamp_interval_for_eval(lo, hi);
    if (g >= lo && g <= hi)
      cov90 += cw;
    if (g > lo)
      cov_over += cw;
    else if (g < lo)
      out.violations.push_back(lo - g);
    len_sum += cw * (hi - lo);
    p5_sum += cw * lo;

    if (out.has_sigma) {
      double slo = rec.sigma_low, shi = rec.sigma_high;
      if (opts.clamp)
        std::tie(slo, shi) = clamp_interval_for_eval(slo, shi);
      if (g >= slo && g <= shi)
        cov_sigma += cw;
    }
  }
  out.wmse_mean = se_mean / double(n);
  out.wmse_median = out.has_median ? se_median / double(n) : 0.0;
  out.frac_90 = cov90 / wsum;
  out.frac_over_p5 = cov_over / wsum;
  out.frac_sigma = out.has_sigma ? cov_sigma / wsum : 0.0;
  out.mean_interval_len = len_sum / wsum;
  out.mean_p5 = p5_sum / wsum;
  return out;
}

double linear_percentile(std::vector<double> values, double p) {
  if (values.empty())
    throw std::invalid_argument("linear_percentile: empty input");
  if (!(p >= 0.0) || !(p <= 1.0))
    throw std::invalid_argument("linear_percentile: p outside [0,1]");
  std::sort(values.begin(), values.end());
  const double rank = p * double(values.size() - 1);
  const size_t lo = size_t(rank);
  if (lo + 1 >= values.size())
    return values.back();
  const double frac = rank - double(lo);
  return values[lo] + frac * (values[lo + 1] - values[lo]);
}

MetricReport aggregate(std::vector<SampleMetrics> records, ViolationMode mode) {
  if (records.empty())
    throw std::invalid_argument("aggregate: no sample records");
  std::sort(records.begin(), records.end(),
            [](const SampleMetrics &a, const SampleMetrics &b) {
              return a.sample_id < b.sample_id;
            });

  const double n = double(records.size());
  bool all_median = true, all_sigma = true;
  NeumaierSum mse_mean, mse_median, fs, f90, fo, len, p5;
  for (const auto &r : records) {
    mse_mean.add(r.wmse_mean);
    all_median = all_median && r.has_median;
    mse_median.add(r.wmse_median);
    all_sigma = all_sigma && r.has_sigma;
    fs.add(r.frac_sigma);
    f90.add(r.frac_90);
    fo.add(r.frac_over_p5);
    len.add(r.mean_interval_len);
    p5.add(r.mean_p5);
  }

  MetricReport rep;
  rep.rmse_mean = std::sqrt(mse_mean.value() / n);
  if (all_median)
    rep.rmse_median = std::sqrt(mse_median.value() / n);
  if (all_sigma)
    rep.f_sigma = 100.0 * fs.value() / n;
  rep.f_90 = 100.0 * f90.value() / n;
  rep.f_over_p5 = 100.0 * fo.value() / n;
  rep.mean_interval_len = len.value() / n;
  rep.mean_p5 = p5.value() / n;

  if (mode == ViolationMode::PerSampleAverage) {
    NeumaierSum v50, v70, v90;
    size_t with_viol = 0;
    for (const auto &r : records) {
      if (r.violations.empty())
        continue;
      ++with_viol;
      v50.add(linear_percentile(r.violations, 0.5));
      v70.add(linear_percentile(r.violations, 0.7));
      v90.add(linear_percentile(r.violations, 0.9));
    }
    if (with_viol > 0) {
      rep.viol_p50 = v50.value() / double(with_viol);
      rep.viol_p70 = v70.value() / double(with_viol);
      rep.viol_p90 = v90.value() / double(with_viol);
    }
  } else {
    std::vector<double> pooled;
    for (const auto &r : records)
      pooled.insert(pooled.end(), r.violations.begin(), r.violations.end());
    if (!pooled.empty()) {
      rep.viol_p50 = linear_percentile(pooled, 0.5);
      rep.viol_p70 = linear_percentile(pooled, 0.7);
      rep.viol_p90 = linear_percentile(pooled, 0.9);
    }
  }
  return rep;
}

namespace {

std::string cell(const std::optional<double> &v) {
  if (!v)
    return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", *v);
  return buf;
}

std::string cell_short(const std::optional<double> &v) {
  if (!v)
    return "-";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", *v);
  return buf;
}

} // namespace

void write_report_csv(const std::filesystem::path &path,
                      const std::vector<std::pair<std::string, MetricReport>> &rows) {
  std::ostringstream out;
  out << "method,rmse_mean,rmse_median,F_sigma,F_90,F_over_P5,"
         "mean_interval_len,mean_P5,viol_p50,viol_p70,viol_p90\n";
  for (const auto &[name, r] : rows) {
    out << name << ',' << cell(r.rmse_mean) << ',' << cell(r.rmse_median) << ','
        << cell(r.f_sigma) << ',' << cell(r.f_90) << ',' << cell(r.f_over_p5)
        << ',' << cell(r.mean_interval_len) << ',' << cell(r.mean_p5) << ','
        << cell(r.viol_p50) << ',' << cell(r.viol_p70) << ','
        << cell(r.viol_p90) << '\n';
  }
  write_file_atomic(path, out.str());
}

void print_report_table(std::ostream &os,
                        const std::vector<std::pair<std::string, MetricReport>> &rows) {
  static const char *kMetricNames[] = {
      "rmse_mean", "rmse_median",       "F_sigma", "F_90",     "F_over_P5",
      "mean_len",  "mean_P5",           "viol_p50", "viol_p70", "viol_p90"};
  auto field = [](const MetricReport &r, int i) -> const std::optional<double> & {
    switch (i) {
    case 0: return r.rmse_mean;
    case 1: return r.rmse_median;
    case 2: return r.f_sigma;
    case 3: return r.f_90;
    case 4: return r.f_over_p5;
    case 5: return r.mean_interval_len;
    case 6: return r.mean_p5;
    case 7: return r.viol_p50;
    case 8: return r.viol_p70;
    default: return r.viol_p90;
    }
  };
  os << std::left << std::setw(14) << "metric";
  for (const auto &[name, r] : rows)
    os << std::right << std::setw(12) << name;
  os << '\n';
  for (int i = 0; i < 10; ++i) {
    os << std::left << std::setw(14) << kMetricNames[i];
    for (const auto &[name, r] : rows)
      os << std::right << std::setw(12) << cell_short(field(r, i));
    os << '\n';
  }
}

} // namespace grip
