#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "gripdist/nelder_mead.hpp"

using namespace grip;

namespace {

ObjectiveSpec quadratic(int dim, double center) {
  ObjectiveSpec obj;
  obj.dimension = dim;
  obj.evaluate = [center](std::span<const double> x) {
    double s = 0.0;
    for (double v : x)
      s += (v - center) * (v - center);
    return s;
  };
  return obj;
}

ObjectiveSpec rosenbrock() {
  ObjectiveSpec obj;
  obj.dimension = 2;
  obj.evaluate = [](std::span<const double> x) {
    const double a = 1.0 - x[0];
    const double b = x[1] - x[0] * x[0];
    return a * a + 100.0 * b * b;
  };
  return obj;
}

} // namespace

TEST_CASE("quadratic bowl converges to the center") {
  const double x0[2] = {0.0, 0.0};
  const MinimizeResult res = minimize(quadratic(2, 3.0), x0);
  CHECK(res.converged);
  CHECK(std::fabs(res.best_point[0] - 3.0) < 1e-6);
  CHECK(std::fabs(res.best_point[1] - 3.0) < 1e-6);
  CHECK(res.best_value <= 9.0 * 2.0); // never worse than f(x0)
}

TEST_CASE("rosenbrock reaches the global minimum") {
  const double x0[2] = {-1.2, 1.0};
  SimplexOptions opts;
  opts.max_evaluations = 2000;
  const MinimizeResult res = minimize(rosenbrock(), x0, opts);
  CHECK(res.evaluations <= 2000);
  CHECK(std::fabs(res.best_point[0] - 1.0) < 1e-4);
  CHECK(std::fabs(res.best_point[1] - 1.0) < 1e-4);
}

TEST_CASE("constant objective converges with its own value") {
  ObjectiveSpec obj;
  obj.dimension = 1;
  obj.evaluate = [](std::span<const double>) { return 7.0; };
  const double x0[1] = {0.0};
  const MinimizeResult res = minimize(obj, x0);
  CHECK(res.converged);
  CHECK(res.best_value == 7.0);
}

TEST_CASE("invalid inputs are rejected") {
  const double x0[2] = {0.0, 0.0};
  ObjectiveSpec none;
  none.dimension = 0;
  none.evaluate = [](std::span<const double>) { return 0.0; };
  CHECK_THROWS_AS(minimize(none, std::span<const double>(x0, 0)),
                  std::invalid_argument);

  const double bad[2] = {std::nan(""), 0.0};
  CHECK_THROWS_AS(minimize(quadratic(2, 0.0), bad), std::invalid_argument);

  CHECK_THROWS_AS(minimize(quadratic(2, 0.0), std::span<const double>(x0, 1)),
                  std::invalid_argument);

  SimplexOptions opts;
  opts.expansion = 0.5; // must exceed reflection
  CHECK_THROWS_AS(minimize(quadratic(2, 0.0), x0, opts), std::invalid_argument);
}

TEST_CASE("result reports the minimum of all evaluations") {
  std::vector<double> seen;
  ObjectiveSpec obj;
  obj.dimension = 3;
  obj.evaluate = [&seen](std::span<const double> x) {
    double s = 0.0;
    for (size_t i = 0; i < x.size(); ++i)
      s += (x[i] - double(i)) * (x[i] - double(i)) * (1.0 + 0.3 * double(i));
    seen.push_back(s);
    return s;
  };
  const double x0[3] = {5.0, -2.0, 0.7};
  const MinimizeResult res = minimize(obj, x0);
  CHECK(res.evaluations == int(seen.size()));
  CHECK(res.best_value == *std::min_element(seen.begin(), seen.end()));
  CHECK(res.best_value == obj.evaluate(res.best_point));
  CHECK(res.best_value <= seen.front());
}

TEST_CASE("evaluation budget is respected") {
  SimplexOptions opts;
  opts.max_evaluations = 50;
  const double x0[2] = {-1.2, 1.0};
  const MinimizeResult res = minimize(rosenbrock(), x0, opts);
  CHECK_FALSE(res.converged);
  CHECK(res.evaluations <= 50 + 2 + 1);
}

TEST_CASE("translation equivariance on a convex bowl") {
  ObjectiveSpec base = quadratic(2, 3.0);
  const double shift[2] = {1.0, 2.0};
  ObjectiveSpec shifted;
  shifted.dimension = 2;
  shifted.evaluate = [&](std::span<const double> x) {
    const double y[2] = {x[0] - shift[0], x[1] - shift[1]};
    return base.evaluate(std::span<const double>(y, 2));
  };
  SimplexOptions opts;
  opts.initial_steps = {0.125, 0.125};
  const double x0[2] = {0.5, 0.25};
  const double x0s[2] = {x0[0] + shift[0], x0[1] + shift[1]};
  const MinimizeResult a = minimize(base, x0, opts);
  const MinimizeResult b = minimize(shifted, x0s, opts);
  CHECK(std::fabs(b.best_point[0] - (a.best_point[0] + shift[0])) < 2e-6);
  CHECK(std::fabs(b.best_point[1] - (a.best_point[1] + shift[1])) < 2e-6);
}

TEST_CASE("bowls in higher dimensions still localize the minimum") {
  std::mt19937_64 rng(11);
  for (int dim : {1, 4, 8}) {
    std::vector<double> x0(static_cast<size_t>(dim));
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (auto &v : x0)
      v = u(rng);
    SimplexOptions opts;
    opts.max_evaluations = 600 * dim;
    const MinimizeResult res = minimize(quadratic(dim, 1.5), x0, opts);
    for (double v : res.best_point)
      CHECK(std::fabs(v - 1.5) < 1e-6);
  }
}
