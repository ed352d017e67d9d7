#pragma once

#include <cstddef>

#include "gripdist/mixture.hpp"
#include "gripdist/segment_math.hpp"

// Per-pixel summary kernels. The scalar version is the reference; the AVX2
// version processes four pixels per lane group and must produce bit-identical
// output (equivalence-tested). Keep every floating-point expression here in
// lockstep with its vector mirror in summary_avx2.cpp.

namespace grip::detail {

struct TableView {
  int K = kNumSurfaceStates;
  int U = 0;
  const double *knots = nullptr;
  const double *seg_h = nullptr;
  const double *blob = nullptr; // U rows of [K cdf | K left pdf | K right pdf]

  explicit TableView(const MixtureTable::Data &d)
      : U(d.n_knots), knots(d.knots.data()), seg_h(d.seg_h.data()),
        blob(d.blob.data()) {}
};

inline void normalize_probs(const double *p, int K, double *pn) {
  double s = 0.0;
  for (int c = 0; c < K; ++c)
    s += p[c];
  for (int c = 0; c < K; ++c)
    pn[c] = p[c] / s;
}

/// Mixture CDF and one-sided pdf values at every union knot for one pixel.
inline void mix_knot_tables(const TableView &t, const double *pn, double *cum,
                            double *lv, double *rv, int stride) {
  for (int u = 0; u < t.U; ++u) {
    const double *row = t.blob + size_t(u) * size_t(3 * t.K);
    double c = 0.0, l = 0.0, r = 0.0;
    for (int k = 0; k < t.K; ++k) {
      c += pn[k] * row[k];
      l += pn[k] * row[t.K + k];
      r += pn[k] * row[2 * t.K + k];
    }
    cum[size_t(u) * stride] = c;
    lv[size_t(u) * stride] = l;
    rv[size_t(u) * stride] = r;
  }
}

inline double mixture_mean(const TableView &t, const double *lv,
                           const double *rv, int stride) {
  double acc = 0.0;
  for (int j = 0; j + 1 < t.U; ++j) {
    const double y0 = rv[size_t(j) * stride];
    const double y1 = lv[size_t(j + 1) * stride];
    const double m = segment_slope(y0, y1, t.seg_h[j]);
    acc += segment_mean_term(t.knots[j], y0, m, t.seg_h[j]);
  }
  return acc;
}

/// Quantiles at ascending targets via one resumable bracket scan.
inline void mixture_quantiles(const TableView &t, const double *cum,
                              const double *lv, const double *rv, int stride,
                              const double *targets, int ntargets,
                              double *out) {
  int seg = 0;
  for (int i = 0; i < ntargets; ++i)
    out[i] = quantile_from_tables(targets[i], t.U - 1, t.knots, t.seg_h, cum,
                                  stride, rv, stride, lv + stride, stride, &seg);
}

/// Full summary for one pixel from already-normalized class probabilities.
/// cum/lv/rv are caller scratch of t.U doubles each.
inline void summarize_one(const TableView &t, const double *pn,
                          const double *targets5, double *cum, double *lv,
                          double *rv, SummaryRecord *out) {
  mix_knot_tables(t, pn, cum, lv, rv, 1);
  out->mean = mixture_mean(t, lv, rv, 1);
  double q[5];
  mixture_quantiles(t, cum, lv, rv, 1, targets5, 5, q);
  out->p05 = q[0];
  out->sigma_low = q[1];
  out->median = q[2];
  out->sigma_high = q[3];
  out->p95 = q[4];
}

struct KernelArgs {
  const MixtureTable::Data *table = nullptr;
  const float *probs = nullptr; ///< n_pixels x K, pixel-major
  size_t n_pixels = 0;
  const double *targets5 = nullptr; ///< 5 ascending quantile targets
  SummaryRecord *out = nullptr;
};

void run_summary_scalar(const KernelArgs &args);
void run_summary_avx2(const KernelArgs &args);
bool cpu_has_avx2();

} // namespace grip::detail
