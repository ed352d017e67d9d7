#pragma once

#include <filesystem>
#include <vector>

#include "gripdist/metrics.hpp"
#include "gripdist/pl_density.hpp"

namespace grip {

/// Density file: header `class,knot_x,density`, rows sorted by class then
/// knot_x, 17 significant digits.
void write_density_csv(const std::filesystem::path &path,
                       const std::vector<PiecewiseLinearDensity> &densities);
std::vector<PiecewiseLinearDensity>
load_density_csv(const std::filesystem::path &path);

/// Histogram file: header `class,bin_left,bin_right,count`.
void write_histogram_csv(const std::filesystem::path &path,
                         const std::vector<GripHistogram> &hists);
std::vector<GripHistogram>
load_histogram_csv(const std::filesystem::path &path);

/// Ground-truth sample file: header `row,col,grip,state`.
void write_ground_truth_csv(const std::filesystem::path &path,
                            const GroundTruthSample &sample);
GroundTruthSample load_ground_truth_csv(const std::filesystem::path &path,
                                        uint32_t image_height,
                                        uint32_t horizon_row,
                                        std::string sample_id);

} // namespace grip
