// AVX2 variant of the per-pixel summary kernel: four pixels per lane group.
// Compiled with -mavx2 on x86; selected at runtime only when the CPU
// supports it. Every arithmetic statement mirrors the scalar helpers in
// summary_kernel.hpp one for one (no FMA), which keeps the output
// bit-identical to the scalar kernel.

#include "summary_kernel.hpp"

#if defined(__x86_64__) || defined(__i386__)

#include <immintrin.h>

#include <vector>

namespace grip::detail {

void run_summary_avx2(const KernelArgs &args) {
  const TableView t(*args.table);
  const int K = t.K;
  const int U = t.U;

  std::vector<double> scratch(size_t(U) * 12);
  double *cum4 = scratch.data(); // U x 4, lane-interleaved
  double *lv4 = cum4 + size_t(U) * 4;
  double *rv4 = lv4 + size_t(U) * 4;
  double pn_lanes[4 * kNumSurfaceStates]; // k-major: pn_lanes[k*4 + lane]
  double p[kNumSurfaceStates], pn[kNumSurfaceStates];

  const __m256d half = _mm256_set1_pd(0.5);
  const __m256d three = _mm256_set1_pd(3.0);

  size_t i = 0;
  for (; i + 4 <= args.n_pixels; i += 4) {
    for (int lane = 0; lane < 4; ++lane) {
      const float *px = args.probs + (i + lane) * size_t(K);
      for (int c = 0; c < K; ++c)
        p[c] = double(px[c]);
      normalize_probs(p, K, pn);
      for (int c = 0; c < K; ++c)
        pn_lanes[c * 4 + lane] = pn[c];
    }

    // mix_knot_tables: c/l/r = sum_k pn[k] * row[...]
    for (int u = 0; u < U; ++u) {
      const double *row = t.blob + size_t(u) * size_t(3 * K);
      __m256d c = _mm256_setzero_pd();
      __m256d l = _mm256_setzero_pd();
      __m256d r = _mm256_setzero_pd();
      for (int k = 0; k < K; ++k) {
        const __m256d pk = _mm256_loadu_pd(pn_lanes + k * 4);
        c = _mm256_add_pd(c, _mm256_mul_pd(pk, _mm256_set1_pd(row[k])));
        l = _mm256_add_pd(l, _mm256_mul_pd(pk, _mm256_set1_pd(row[K + k])));
        r = _mm256_add_pd(r, _mm256_mul_pd(pk, _mm256_set1_pd(row[2 * K + k])));
      }
      _mm256_storeu_pd(cum4 + size_t(u) * 4, c);
      _mm256_storeu_pd(lv4 + size_t(u) * 4, l);
      _mm256_storeu_pd(rv4 + size_t(u) * 4, r);
    }

    // mixture_mean: acc += segment_mean_term(k0, y0, slope(y0,y1,h), h)
    __m256d acc = _mm256_setzero_pd();
    for (int j = 0; j + 1 < U; ++j) {
      const double h = t.seg_h[j];
      const double hh = h * h;
      const __m256d hv = _mm256_set1_pd(h);
      const __m256d hhv = _mm256_set1_pd(hh);
      const __m256d y0 = _mm256_loadu_pd(rv4 + size_t(j) * 4);
      const __m256d y1 = _mm256_loadu_pd(lv4 + size_t(j + 1) * 4);
      const __m256d m = _mm256_div_pd(_mm256_sub_pd(y1, y0), hv);
      // k0*(y0*h + 0.5*m*hh) + 0.5*y0*hh + m*hh*h/3.0
      const __m256d a = _mm256_mul_pd(y0, hv);
      const __m256d b = _mm256_mul_pd(_mm256_mul_pd(half, m), hhv);
      const __m256d d = _mm256_mul_pd(_mm256_set1_pd(t.knots[j]),
                                      _mm256_add_pd(a, b));
      const __m256d e = _mm256_mul_pd(_mm256_mul_pd(half, y0), hhv);
      const __m256d f =
          _mm256_div_pd(_mm256_mul_pd(_mm256_mul_pd(m, hhv), hv), three);
      acc = _mm256_add_pd(acc, _mm256_add_pd(_mm256_add_pd(d, e), f));
    }
    double means[4];
    _mm256_storeu_pd(means, acc);

    for (int lane = 0; lane < 4; ++lane) {
      SummaryRecord &out = args.out[i + lane];
      out.mean = means[lane];
      double q[5];
      mixture_quantiles(t, cum4 + lane, lv4 + lane, rv4 + lane, 4,
                        args.targets5, 5, q);
      out.p05 = q[0];
      out.sigma_low = q[1];
      out.median = q[2];
      out.sigma_high = q[3];
      out.p95 = q[4];
    }
  }

  // tail pixels via the scalar path
  for (; i < args.n_pixels; ++i) {
    const float *px = args.probs + i * size_t(K);
    for (int c = 0; c < K; ++c)
      p[c] = double(px[c]);
    normalize_probs(p, K, pn);
    summarize_one(t, pn, args.targets5, cum4, lv4, rv4, &args.out[i]);
  }
}

} // namespace grip::detail

#else // non-x86 fallback never selected by the dispatcher

#include <stdexcept>

namespace grip::detail {
void run_summary_avx2(const KernelArgs &) {
  throw std::logic_error("AVX2 kernel not built for this architecture");
}
} // namespace grip::detail

#endif
