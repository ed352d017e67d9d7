#include "gripdist/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include "kernels/summary_kernel.hpp"

namespace grip {

namespace {
constexpr const char *kStateNames[kNumSurfaceStates] = {"dry", "wet", "snowy",
                                                        "icy", "slushy"};
constexpr double kKnotMergeTol = 1e-12;
} // namespace

const char *to_string(SurfaceState s) {
  return kStateNames[static_cast<size_t>(s)];
}

SurfaceState surface_state_from_string(const std::string &name) {
  for (int i = 0; i < kNumSurfaceStates; ++i)
    if (name == kStateNames[i])
      return static_cast<SurfaceState>(i);
  throw std::invalid_argument("unknown surface state: " + name);
}

Raster<float> summary_to_raster(const GripSummaryRaster &s) {
  Raster<float> r(s.height, s.width, 6);
  for (size_t i = 0; i < s.pixels.size(); ++i) {
    const SummaryRecord &p = s.pixels[i];
    float *dst = r.data.data() + i * 6;
    dst[0] = float(p.mean);
    dst[1] = float(p.median);
    dst[2] = float(p.p05);
    dst[3] = float(p.p95);
    dst[4] = float(p.sigma_low);
    dst[5] = float(p.sigma_high);
  }
  return r;
}

GripSummaryRaster summary_from_raster(const Raster<float> &r) {
  if (r.channels != 6)
    throw std::invalid_argument("summary raster must have 6 channels");
  GripSummaryRaster s(r.height, r.width);
  bool median_nan = false, sigma_nan = false;
  for (size_t i = 0; i < s.pixels.size(); ++i) {
    const float *src = r.data.data() + i * 6;
    SummaryRecord &p = s.pixels[i];
    p.mean = src[0];
    p.median = src[1];
    p.p05 = src[2];
    p.p95 = src[3];
    p.sigma_low = src[4];
    p.sigma_high = src[5];
    median_nan = median_nan || std::isnan(p.median);
    sigma_nan = sigma_nan || std::isnan(p.sigma_low) || std::isnan(p.sigma_high);
  }
  s.has_median = !median_nan;
  s.has_sigma = !sigma_nan;
  return s;
}

MixtureTable MixtureTable::build(const std::vector<PiecewiseLinearDensity> &classes) {
  if (classes.size() != kNumSurfaceStates)
    throw std::invalid_argument("mixture table needs exactly 5 class densities");
  std::array<const PiecewiseLinearDensity *, kNumSurfaceStates> by_code{};
  for (const auto &d : classes) {
    const auto code = static_cast<size_t>(surface_state_from_string(d.class_name()));
    if (by_code[code])
      throw std::invalid_argument("duplicate class density: " + d.class_name());
    by_code[code] = &d;
  }

  std::vector<double> all;
  for (const auto *d : by_code)
    all.insert(all.end(), d->knots().begin(), d->knots().end());
  std::sort(all.begin(), all.end());
  std::vector<double> knots;
  for (double k : all)
    if (knots.empty() || k - knots.back() > kKnotMergeTol)
      knots.push_back(k);

  MixtureTable table;
  Data &t = table.data_;
  const int U = int(knots.size());
  const int K = kNumSurfaceStates;
  t.n_knots = U;
  t.knots = std::move(knots);
  t.seg_h.resize(size_t(U) - 1);
  for (int j = 0; j + 1 < U; ++j)
    t.seg_h[size_t(j)] = t.knots[size_t(j) + 1] - t.knots[size_t(j)];
  t.blob.assign(size_t(U) * size_t(3 * K), 0.0);
  t.nominal.assign(size_t(U) * size_t(K), 0.0);

  for (int c = 0; c < K; ++c) {
    const PiecewiseLinearDensity &d = *by_code[size_t(c)];
    const double lo = d.support_lo(), hi = d.support_hi();
    double prev_cdf = -1.0;
    for (int u = 0; u < U; ++u) {
      const double x = t.knots[size_t(u)];
      double *row = t.blob.data() + size_t(u) * size_t(3 * K);
      const bool at_lo = std::fabs(x - lo) <= kKnotMergeTol;
      const bool at_hi = std::fabs(x - hi) <= kKnotMergeTol;
      // beyond the support the row saturates at the class's own final
      // cumulative value (within 1e-12 of 1), keeping the row monotone
      const double cdf = x >= hi || at_hi ? d.knot_cdf().back()
                         : x <= lo        ? 0.0
                                          : d.cdf(x);
      if (cdf < prev_cdf)
        throw std::invalid_argument("mixture table: non-monotone class CDF");
      prev_cdf = cdf;
      row[c] = cdf;

      double left = 0.0, right = 0.0, nominal = 0.0;
      if (at_lo) {
        right = d.densities().front();
        nominal = right;
      } else if (at_hi) {
        left = d.densities().back();
        nominal = left;
      } else if (x > lo && x < hi) {
        const double v = d.pdf(x);
        left = v;
        right = v;
        nominal = v;
      }
      row[K + c] = left;
      row[2 * K + c] = right;
      t.nominal[size_t(u) * size_t(K) + size_t(c)] = nominal;
    }
    const double last = t.blob[size_t(U - 1) * size_t(3 * K) + size_t(c)];
    if (std::fabs(last - 1.0) > 1e-9)
      throw std::invalid_argument(
          "mixture table: class CDF does not reach 1 at the last union knot "
          "(re-normalize the input density): " + d.class_name());
    t.class_mean[size_t(c)] = d.mean();
  }
  return table;
}

namespace {

void validate_probs_vector(std::span<const double> probs) {
  if (probs.size() != kNumSurfaceStates)
    throw std::invalid_argument("probability vector must have 5 entries");
  double s = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0) || !std::isfinite(p))
      throw std::invalid_argument("negative or non-finite class probability");
    s += p;
  }
  if (std::fabs(s - 1.0) > 1e-6)
    throw std::invalid_argument("class probabilities must sum to 1 within 1e-6");
}

} // namespace

PiecewiseLinearDensity MixtureTable::fuse(std::span<const double> probs) const {
  validate_probs_vector(probs);
  const Data &t = data_;
  const int K = kNumSurfaceStates;
  const int U = t.n_knots;
  double pn[kNumSurfaceStates];
  detail::normalize_probs(probs.data(), K, pn);

  const auto un = static_cast<size_t>(U);
  std::vector<double> cum(un), lv(un), rv(un);
  detail::TableView view(t);
  detail::mix_knot_tables(view, pn, cum.data(), lv.data(), rv.data(), 1);

  std::vector<double> values(un);
  for (int u = 0; u < U; ++u) {
    const double *row = t.nominal.data() + size_t(u) * size_t(K);
    double v = 0.0;
    for (int k = 0; k < K; ++k)
      v += pn[k] * row[k];
    values[size_t(u)] = v;
  }
  std::vector<double> seg_a(un - 1), seg_b(un - 1);
  for (int j = 0; j + 1 < U; ++j) {
    seg_a[size_t(j)] = rv[size_t(j)];
    seg_b[size_t(j)] = lv[size_t(j) + 1];
  }
  return PiecewiseLinearDensity::from_parts("mixture", t.knots,
                                            std::move(values), std::move(seg_a),
                                            std::move(seg_b), std::move(cum));
}

void validate_class_probability_raster(const Raster<float> &probs) {
  if (probs.channels != kNumSurfaceStates)
    throw std::invalid_argument("class probability raster must have 5 channels");
  if (probs.height == 0 || probs.width == 0)
    throw std::invalid_argument("class probability raster is empty");
  const size_t n = probs.pixel_count();
  for (size_t i = 0; i < n; ++i) {
    const float *px = probs.data.data() + i * kNumSurfaceStates;
    double s = 0.0;
    for (int c = 0; c < kNumSurfaceStates; ++c) {
      const double v = double(px[c]);
      if (!(v >= 0.0) || !std::isfinite(v))
        throw std::invalid_argument("probability raster: negative or non-finite value");
      s += v;
    }
    if (std::fabs(s - 1.0) > 1e-6)
      throw std::invalid_argument("probability raster: pixel does not sum to 1");
  }
}

bool avx2_kernel_available() { return detail::cpu_has_avx2(); }

namespace {

void run_kernel_slice(const MixtureTable::Data &table, const float *probs,
                      size_t n_pixels, const double *targets,
                      SummaryRecord *out, SummaryKernel kernel) {
  detail::KernelArgs args;
  args.table = &table;
  args.probs = probs;
  args.n_pixels = n_pixels;
  args.targets5 = targets;
  args.out = out;
  switch (kernel) {
  case SummaryKernel::Scalar:
    detail::run_summary_scalar(args);
    break;
  case SummaryKernel::Avx2:
    detail::run_summary_avx2(args);
    break;
  case SummaryKernel::Auto:
    if (detail::cpu_has_avx2())
      detail::run_summary_avx2(args);
    else
      detail::run_summary_scalar(args);
    break;
  }
}

std::array<double, 5> resolve_targets(const FuseOptions &opts) {
  std::array<double, 5> t{opts.percentiles[0], opts.sigma_levels[0], 0.5,
                          opts.sigma_levels[1], opts.percentiles[1]};
  for (double v : t)
    if (!(v > 0.0) || !(v < 1.0))
      throw std::invalid_argument("quantile targets must lie in (0,1)");
  if (!std::is_sorted(t.begin(), t.end()))
    throw std::invalid_argument(
        "expected percentiles[0] <= sigma_levels[0] <= 0.5 <= sigma_levels[1] "
        "<= percentiles[1]");
  return t;
}

GripSummaryRaster run_over_pixels(const MixtureTable &table, const float *probs,
                                  uint32_t height, uint32_t width,
                                  const FuseOptions &opts) {
  const auto targets = resolve_targets(opts);
  GripSummaryRaster out(height, width);
  const size_t n = out.pixels.size();
  int threads = opts.threads;
  if (threads <= 0)
    threads = int(std::max(1u, std::thread::hardware_concurrency()));
  threads = int(std::min<size_t>(size_t(threads), n));

  if (threads <= 1) {
    run_kernel_slice(table.data(), probs, n, targets.data(), out.pixels.data(),
                     opts.kernel);
    return out;
  }
  std::vector<std::thread> pool;
  pool.reserve(size_t(threads));
  const size_t chunk = (n + size_t(threads) - 1) / size_t(threads);
  for (int w = 0; w < threads; ++w) {
    const size_t begin = size_t(w) * chunk;
    if (begin >= n)
      break;
    const size_t len = std::min(chunk, n - begin);
    pool.emplace_back([&, begin, len] {
      run_kernel_slice(table.data(), probs + begin * kNumSurfaceStates, len,
                       targets.data(), out.pixels.data() + begin, opts.kernel);
    });
  }
  for (auto &th : pool)
    th.join();
  return out;
}

} // namespace

GripSummaryRaster fuse_raster(const MixtureTable &table,
                              const Raster<float> &probs,
                              const FuseOptions &opts) {
  validate_class_probability_raster(probs);
  return run_over_pixels(table, probs.data.data(), probs.height, probs.width,
                         opts);
}

GripSummaryRaster ideal_from_labels(const MixtureTable &table,
                                    const Raster<uint8_t> &labels,
                                    const FuseOptions &opts) {
  if (labels.channels != 1)
    throw std::invalid_argument("label raster must have 1 channel");
  if (labels.height == 0 || labels.width == 0)
    throw std::invalid_argument("label raster is empty");
  for (uint8_t v : labels.data)
    if (v >= kNumSurfaceStates)
      throw std::invalid_argument("label code outside 0..4");

  // One-hot probabilities reproduce each class exactly, so the five class
  // summaries are computed once through the regular kernel path and copied.
  const auto targets = resolve_targets(opts);
  std::array<SummaryRecord, kNumSurfaceStates> per_class;
  float onehot[kNumSurfaceStates * kNumSurfaceStates] = {};
  for (int c = 0; c < kNumSurfaceStates; ++c)
    onehot[c * kNumSurfaceStates + c] = 1.0f;
  run_kernel_slice(table.data(), onehot, kNumSurfaceStates, targets.data(),
                   per_class.data(), opts.kernel);

  GripSummaryRaster out(labels.height, labels.width);
  for (size_t i = 0; i < out.pixels.size(); ++i)
    out.pixels[i] = per_class[labels.data[i]];
  return out;
}

} // namespace grip
