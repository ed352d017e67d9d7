#include "gripdist/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace grip {

namespace {

void validate(const ObjectiveSpec &obj, std::span<const double> x0,
              const SimplexOptions &o) {
  if (obj.dimension < 1)
    throw std::invalid_argument("nelder_mead: dimension must be >= 1");
  if (!obj.evaluate)
    throw std::invalid_argument("nelder_mead: missing objective");
  if (std::ssize(x0) != obj.dimension)
    throw std::invalid_argument("nelder_mead: x0 length != dimension");
  for (double v : x0)
    if (!std::isfinite(v))
      throw std::invalid_argument("nelder_mead: non-finite x0");
  if (!(o.reflection > 0) || !(o.expansion > 0) || !(o.contraction > 0) ||
      !(o.shrink > 0))
    throw std::invalid_argument("nelder_mead: coefficients must be positive");
  if (!(o.expansion > o.reflection))
    throw std::invalid_argument("nelder_mead: expansion must exceed reflection");
  if (!(o.contraction < 1) || !(o.shrink < 1))
    throw std::invalid_argument("nelder_mead: contraction/shrink must be in (0,1)");
  if (!o.initial_steps.empty() &&
      std::ssize(o.initial_steps) != obj.dimension)
    throw std::invalid_argument("nelder_mead: initial_steps length mismatch");
}

} // namespace

MinimizeResult minimize(const ObjectiveSpec &obj, std::span<const double> x0,
                        const SimplexOptions &opts) {
  validate(obj, x0, opts);
  const int n = obj.dimension;
  const int max_evals =
      opts.max_evaluations > 0 ? opts.max_evaluations : 200 * n;

  std::vector<std::vector<double>> verts(size_t(n) + 1,
                                         std::vector<double>(x0.begin(), x0.end()));
  for (int i = 0; i < n; ++i) {
    double step;
    if (!opts.initial_steps.empty())
      step = opts.initial_steps[size_t(i)];
    else if (x0[size_t(i)] != 0.0)
      step = opts.initial_step_relative * std::fabs(x0[size_t(i)]);
    else
      step = opts.initial_step_zero;
    verts[size_t(i) + 1][size_t(i)] += step;
  }

  MinimizeResult res;
  res.best_value = std::numeric_limits<double>::infinity();
  auto eval = [&](const std::vector<double> &x) {
    double f = obj.evaluate(std::span<const double>(x));
    ++res.evaluations;
    if (f < res.best_value) {
      res.best_value = f;
      res.best_point = x;
    }
    return f;
  };

  std::vector<double> fv(size_t(n) + 1);
  for (int i = 0; i <= n; ++i)
    fv[size_t(i)] = eval(verts[size_t(i)]);

  // Ties in best/worst selection go to the lowest vertex index.
  auto find_best = [&] {
    int b = 0;
    for (int i = 1; i <= n; ++i)
      if (fv[size_t(i)] < fv[size_t(b)])
        b = i;
    return b;
  };
  auto find_worst = [&] {
    int w = 0;
    for (int i = 1; i <= n; ++i)
      if (fv[size_t(i)] > fv[size_t(w)])
        w = i;
    return w;
  };

  const auto nd = static_cast<size_t>(n);
  std::vector<double> centroid(nd), xr(nd), xe(nd), xc(nd);

  while (true) {
    const int best = find_best();
    const int worst = find_worst();
    double second_worst = -std::numeric_limits<double>::infinity();
    for (int i = 0; i <= n; ++i)
      if (i != worst && fv[size_t(i)] > second_worst)
        second_worst = fv[size_t(i)];

    double diameter = 0.0, spread = 0.0;
    for (int i = 0; i <= n; ++i) {
      spread = std::max(spread, std::fabs(fv[size_t(i)] - fv[size_t(best)]));
      for (int d = 0; d < n; ++d)
        diameter = std::max(diameter, std::fabs(verts[size_t(i)][size_t(d)] -
                                                verts[size_t(best)][size_t(d)]));
    }
    if (diameter <= opts.x_tolerance && spread <= opts.f_tolerance) {
      res.converged = true;
      break;
    }
    if (res.evaluations >= max_evals)
      break;

    for (int d = 0; d < n; ++d) {
      double s = 0.0;
      for (int i = 0; i <= n; ++i)
        if (i != worst)
          s += verts[size_t(i)][size_t(d)];
      centroid[size_t(d)] = s / n;
    }

    for (int d = 0; d < n; ++d)
      xr[size_t(d)] = centroid[size_t(d)] +
                      opts.reflection * (centroid[size_t(d)] -
                                         verts[size_t(worst)][size_t(d)]);
    const double fr = eval(xr);

    if (fr < fv[size_t(best)]) {
      if (res.evaluations >= max_evals) {
        verts[size_t(worst)] = xr;
        fv[size_t(worst)] = fr;
        continue;
      }
      for (int d = 0; d < n; ++d)
        xe[size_t(d)] = centroid[size_t(d)] +
                        opts.expansion * (xr[size_t(d)] - centroid[size_t(d)]);
      const double fe = eval(xe);
      if (fe < fr) {
        verts[size_t(worst)] = xe;
        fv[size_t(worst)] = fe;
      } else {
        verts[size_t(worst)] = xr;
        fv[size_t(worst)] = fr;
      }
    } else if (fr < second_worst) {
      verts[size_t(worst)] = xr;
      fv[size_t(worst)] = fr;
    } else {
      if (res.evaluations >= max_evals)
        continue;
      bool shrink_needed = false;
      if (fr < fv[size_t(worst)]) {
        // outside contraction, between reflected point and centroid
        for (int d = 0; d < n; ++d)
          xc[size_t(d)] = centroid[size_t(d)] +
                          opts.contraction * (xr[size_t(d)] - centroid[size_t(d)]);
        const double fc = eval(xc);
        if (fc <= fr) {
          verts[size_t(worst)] = xc;
          fv[size_t(worst)] = fc;
        } else {
          shrink_needed = true;
        }
      } else {
        // inside contraction, between worst vertex and centroid
        for (int d = 0; d < n; ++d)
          xc[size_t(d)] = centroid[size_t(d)] +
                          opts.contraction *
                              (verts[size_t(worst)][size_t(d)] - centroid[size_t(d)]);
        const double fc = eval(xc);
        if (fc < fv[size_t(worst)]) {
          verts[size_t(worst)] = xc;
          fv[size_t(worst)] = fc;
        } else {
          shrink_needed = true;
        }
      }
      if (shrink_needed) {
        for (int i = 0; i <= n; ++i) {
          if (i == best)
            continue;
          if (res.evaluations >= max_evals)
            break;
          for (int d = 0; d < n; ++d)
            verts[size_t(i)][size_t(d)] =
                verts[size_t(best)][size_t(d)] +
                opts.shrink * (verts[size_t(i)][size_t(d)] -
                               verts[size_t(best)][size_t(d)]);
          fv[size_t(i)] = eval(verts[size_t(i)]);
        }
      }
    }
  }

  return res;
}

} // namespace grip
