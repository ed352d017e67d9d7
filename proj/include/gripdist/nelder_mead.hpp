#pragma once

#include <functional>
#include <span>
#include <vector>

namespace grip {

struct ObjectiveSpec {
  int dimension = 0;
  std::function<double(std::span<const double>)> evaluate;
};

struct SimplexOptions {
  double reflection = 1.0;
  double expansion = 2.0;
  double contraction = 0.5;
  double shrink = 0.5;
  double x_tolerance = 1e-8;
  double f_tolerance = 1e-10;
  /// 0 means 200 * dimension.
  int max_evaluations = 0;
  double initial_step_relative = 0.05;
  double initial_step_zero = 1e-4;
  /// When non-empty, overrides the default per-coordinate initial step rule.
  std::vector<double> initial_steps;
};

struct MinimizeResult {
  std::vector<double> best_point;
  double best_value = 0.0;
  int evaluations = 0;
  bool converged = false;
};

/// Downhill simplex minimization with reflection/expansion/contraction/shrink
/// moves. Convergence requires both the simplex diameter and the value spread
/// to fall below their tolerances before the evaluation budget runs out.
MinimizeResult minimize(const ObjectiveSpec &obj, std::span<const double> x0,
                        const SimplexOptions &opts = {});

} // namespace grip
