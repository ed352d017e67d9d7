#pragma once

#include <cmath>

// Shared per-segment arithmetic for piecewise-linear densities. Every caller
// (density methods, scalar raster kernel, AVX2 raster kernel) must evaluate
// these formulas with the same operation order, because batch summaries are
// required to match the per-pixel path bit for bit.

namespace grip::detail {

inline double segment_slope(double a, double b, double h) { return (b - a) / h; }

/// Quadratic CDF increment within a segment: y0*t + 0.5*m*t^2.
inline double segment_cdf_inc(double y0, double m, double t) {
  return y0 * t + 0.5 * (m * t) * t;
}

/// Offset t in [0, h] with segment mass dp, i.e. the root of
/// 0.5*m*t^2 + y0*t - dp = 0 lying inside the segment. The 2dp/(y0+sqrt(D))
/// form is the stable version of that root for either sign of the slope.
inline double segment_quantile_t(double y0, double m, double h, double dp) {
  if (!(dp > 0.0))
    return 0.0; // includes zero-density plateaus, where dp <= 0 by bracketing
  double t;
  if (std::fabs(m) < 1e-14) {
    t = dp / y0;
  } else {
    double disc = y0 * y0 + 2.0 * (m * dp);
    if (disc < 0.0)
      disc = 0.0;
    t = 2.0 * dp / (y0 + std::sqrt(disc));
  }
  if (t < 0.0)
    t = 0.0;
  if (t > h)
    t = h;
  return t;
}

/// Contribution of one segment to the mean: integral of g*(y0 + m*(g-k0))
/// over [k0, k0+h].
inline double segment_mean_term(double k0, double y0, double m, double h) {
  const double hh = h * h;
  return k0 * (y0 * h + 0.5 * m * hh) + 0.5 * y0 * hh + m * hh * h / 3.0;
}

/// Contribution of one segment to the second moment E[g^2].
inline double segment_second_moment_term(double k0, double y0, double m,
                                         double h) {
  const double hh = h * h;
  const double mass = y0 * h + 0.5 * m * hh;
  const double first = 0.5 * y0 * hh + m * hh * h / 3.0;
  const double second = y0 * hh * h / 3.0 + 0.25 * m * hh * hh;
  return k0 * k0 * mass + 2.0 * k0 * first + second;
}

/// Smallest g with CDF(g) >= p over a segment table. `cum` holds the CDF at
/// the n+1 knots; segment j runs from knots[j] with width seg_h[j], starts at
/// density a(j) and ends at density b(j). a/b are strided so the raster
/// kernels can point into lane-interleaved scratch.
///
/// Plateau convention: when p falls on a flat stretch of the CDF the bracket
/// lands on the last mass-bearing segment and the solve returns its right
/// edge, i.e. the left edge of the plateau.
/// `seg_hint`, when given, is both the scan start and an output slot for the
/// bracketed segment; valid only for ascending sequences of targets because
/// the bracket index is non-decreasing in p.
inline double quantile_from_tables(double p, int nseg, const double *knots,
                                   const double *seg_h, const double *cum,
                                   int cum_stride, const double *a,
                                   int a_stride, const double *b,
                                   int b_stride, int *seg_hint = nullptr) {
  if (p >= cum[size_t(nseg) * cum_stride])
    return knots[nseg];
  int j = seg_hint ? *seg_hint : 0;
  while (cum[size_t(j + 1) * cum_stride] < p)
    ++j;
  if (seg_hint)
    *seg_hint = j;
  const double dp = p - cum[size_t(j) * cum_stride];
  const double h = seg_h[j];
  const double y0 = a[size_t(j) * a_stride];
  const double y1 = b[size_t(j) * b_stride];
  const double m = segment_slope(y0, y1, h);
  return knots[j] + segment_quantile_t(y0, m, h, dp);
}

} // namespace grip::detail
