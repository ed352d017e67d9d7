#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gripdist/pl_density.hpp"
#include "gripdist/raster.hpp"

namespace grip {

/// Road surface state classes. Codes are stable and match the channel order
/// of class probability rasters.
enum class SurfaceState : uint8_t { Dry = 0, Wet = 1, Snowy = 2, Icy = 3, Slushy = 4 };

inline constexpr int kNumSurfaceStates = 5;

const char *to_string(SurfaceState s);
SurfaceState surface_state_from_string(const std::string &name);

/// Per-pixel grip distribution summary. Field order matches the channel
/// order of summary rasters.
struct SummaryRecord {
  double mean;
  double median;
  double p05;
  double p95;
  double sigma_low;
  double sigma_high;
};

struct GripSummaryRaster {
  uint32_t height = 0;
  uint32_t width = 0;
  std::vector<SummaryRecord> pixels;
  bool has_median = true;
  bool has_sigma = true;

  GripSummaryRaster() = default;
  GripSummaryRaster(uint32_t h, uint32_t w)
      : height(h), width(w), pixels(static_cast<size_t>(h) * w) {}
  SummaryRecord &at(uint32_t r, uint32_t c) {
    return pixels[static_cast<size_t>(r) * width + c];
  }
  const SummaryRecord &at(uint32_t r, uint32_t c) const {
    return pixels[static_cast<size_t>(r) * width + c];
  }
};

Raster<float> summary_to_raster(const GripSummaryRaster &s);
GripSummaryRaster summary_from_raster(const Raster<float> &r);

/// Class densities restated on the union of all class knot grids, with the
/// per-class CDF precomputed at every union knot. Per pixel, fusing reduces
/// to one probs-by-table product per knot followed by in-segment quadratic
/// solves for the requested percentiles.
class MixtureTable {
public:
  struct Data {
    int n_knots = 0;            ///< U
    std::vector<double> knots;  ///< U union knots
    std::vector<double> seg_h;  ///< U-1 segment widths
    /// Interleaved per-knot rows of 3*K values: K class CDF values, K
    /// left-limit pdf values, K right-limit pdf values. The left/right split
    /// keeps mixtures of densities with different supports exact: the pdf of
    /// such a mixture jumps at a support endpoint and the two one-sided
    /// values cannot be folded into one knot value.
    std::vector<double> blob;
    /// U x K pdf values at the knots themselves (closed-support convention).
    std::vector<double> nominal;
    std::array<double, kNumSurfaceStates> class_mean{};
  };

  /// Expects exactly one density per surface state, matched by class name.
  static MixtureTable build(const std::vector<PiecewiseLinearDensity> &classes);

  /// Mixture density for one probability vector, exact on the union knots.
  PiecewiseLinearDensity fuse(std::span<const double> probs) const;

  const Data &data() const { return data_; }
  const std::vector<double> &union_knots() const { return data_.knots; }
  double class_mean(SurfaceState s) const {
    return data_.class_mean[static_cast<size_t>(s)];
  }

private:
  Data data_;
};

enum class SummaryKernel { Auto, Scalar, Avx2 };

struct FuseOptions {
  std::array<double, 2> percentiles{0.05, 0.95};
  std::array<double, 2> sigma_levels{0.158655, 0.841345};
  int threads = 1; ///< <= 0 means hardware concurrency
  SummaryKernel kernel = SummaryKernel::Auto;
};

/// Throws if the raster is not a valid K-channel probability raster
/// (non-negative, each pixel summing to 1 within 1e-6).
void validate_class_probability_raster(const Raster<float> &probs);

/// Per-pixel mean/median/percentile/sigma-interval summary of the fused grip
/// distribution. Output is identical bit for bit to calling fuse() plus the
/// density moments/quantile operations pixel by pixel, for any kernel and
/// any thread count.
GripSummaryRaster fuse_raster(const MixtureTable &table,
                              const Raster<float> &probs,
                              const FuseOptions &opts = {});

/// Summary under ground-truth labels used as one-hot class probabilities.
GripSummaryRaster ideal_from_labels(const MixtureTable &table,
                                    const Raster<uint8_t> &labels,
                                    const FuseOptions &opts = {});

bool avx2_kernel_available();

} // namespace grip
