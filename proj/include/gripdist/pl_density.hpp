#pragma once

#include <string>
#include <vector>

#include "gripdist/nelder_mead.hpp"

namespace grip {

struct GripHistogram {
  std::string class_name;
  std::vector<double> edges;  ///< strictly increasing, size = bins + 1
  std::vector<double> counts; ///< non-negative, size = bins
  void validate() const;
  double total() const;
};

/// Probability density over the grip axis defined by linear interpolation
/// between knots and zero outside the support. The CDF is piecewise
/// quadratic and kept precomputed at the knots.
///
/// Densities made by build() are continuous. Mixtures of densities with
/// different supports may jump at a support endpoint, so segments carry
/// their own start/end values (right and left limits); for continuous
/// densities these coincide with the knot values.
class PiecewiseLinearDensity {
public:
  /// Default-constructed densities are empty placeholders; use build().
  PiecewiseLinearDensity() = default;

  static PiecewiseLinearDensity build(std::string class_name,
                                      std::vector<double> knots,
                                      std::vector<double> densities,
                                      bool auto_normalize);

  double pdf(double g) const;
  double cdf(double g) const;
  /// Smallest g with cdf(g) >= p. On zero-density plateaus returns the left
  /// edge of the plateau.
  double quantile(double p) const;

  struct MeanMedian {
    double mean;
    double median;
  };
  MeanMedian moments() const;
  double mean() const;
  double variance() const;

  const std::string &class_name() const { return class_name_; }
  const std::vector<double> &knots() const { return knots_; }
  const std::vector<double> &densities() const { return values_; }
  double support_lo() const { return knots_.front(); }
  double support_hi() const { return knots_.back(); }
  int segments() const { return int(knots_.size()) - 1; }

  const std::vector<double> &segment_widths() const { return seg_h_; }
  const std::vector<double> &segment_start_values() const { return seg_a_; }
  const std::vector<double> &segment_end_values() const { return seg_b_; }
  const std::vector<double> &knot_cdf() const { return cum_; }

private:
  friend class MixtureTable;
  static PiecewiseLinearDensity from_parts(std::string class_name,
                                           std::vector<double> knots,
                                           std::vector<double> values,
                                           std::vector<double> seg_a,
                                           std::vector<double> seg_b,
                                           std::vector<double> cum);

  std::string class_name_;
  std::vector<double> knots_;
  std::vector<double> values_;
  std::vector<double> seg_h_;
  std::vector<double> seg_a_;
  std::vector<double> seg_b_;
  std::vector<double> cum_;
};

struct FitDiagnostics {
  double objective_initial = 0.0;
  double objective_final = 0.0;
  int evaluations = 0;
};

/// Fits an n-interval piecewise-linear density to a histogram by jointly
/// optimizing interior knot positions and knot densities with the simplex
/// minimizer. The objective is the mean squared error between the histogram
/// density and the candidate function at the bin centers; support endpoints
/// are pinned to the observed histogram support.
PiecewiseLinearDensity fit_from_histogram(const GripHistogram &hist,
                                          int n_intervals = 20,
                                          const SimplexOptions &nm_opts = {},
                                          FitDiagnostics *diag = nullptr);

} // namespace grip
