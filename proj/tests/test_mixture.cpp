#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <limits>
#include <random>

#include "gripdist/mixture.hpp"
#include "gripdist/rng.hpp"
#include "test_support.hpp"

using namespace grip;

namespace {

const char *kNames[5] = {"dry", "wet", "snowy", "icy", "slushy"};

std::vector<PiecewiseLinearDensity> random_classes(std::mt19937_64 &rng) {
  std::vector<PiecewiseLinearDensity> out;
  for (int c = 0; c < 5; ++c) {
    auto d = testgen::random_density(rng);
    out.push_back(PiecewiseLinearDensity::build(kNames[c], d.knots(),
                                                d.densities(), true));
  }
  return out;
}

std::array<double, 5> random_probs(std::mt19937_64 &rng) {
  std::uniform_real_distribution<double> u(0.01, 1.0);
  std::array<double, 5> p{};
  double s = 0.0;
  for (auto &v : p) {
    v = u(rng);
    s += v;
  }
  for (auto &v : p)
    v /= s;
  return p;
}

Raster<float> random_prob_raster(std::mt19937_64 &rng, uint32_t h, uint32_t w) {
  Raster<float> r(h, w, 5);
  for (size_t i = 0; i < r.pixel_count(); ++i) {
    const auto p = random_probs(rng);
    for (int c = 0; c < 5; ++c)
      r.data[i * 5 + size_t(c)] = float(p[size_t(c)]);
  }
  return r;
}

std::vector<PiecewiseLinearDensity> gap_classes() {
  std::vector<PiecewiseLinearDensity> out;
  out.push_back(PiecewiseLinearDensity::build("dry", {0.0, 0.4}, {2.5, 2.5}, false));
  out.push_back(PiecewiseLinearDensity::build("wet", {0.6, 1.0}, {2.5, 2.5}, false));
  out.push_back(PiecewiseLinearDensity::build("snowy", {0.2, 0.3}, {10.0, 10.0}, false));
  out.push_back(PiecewiseLinearDensity::build("icy", {0.05, 0.15}, {10.0, 10.0}, false));
  out.push_back(PiecewiseLinearDensity::build("slushy", {0.5, 0.55}, {20.0, 20.0}, false));
  return out;
}

SummaryRecord reference_summary(const MixtureTable &table,
                                std::span<const double> probs) {
  const PiecewiseLinearDensity d = table.fuse(probs);
  SummaryRecord r;
  const auto m = d.moments();
  r.mean = m.mean;
  r.median = m.median;
  r.p05 = d.quantile(0.05);
  r.p95 = d.quantile(0.95);
  r.sigma_low = d.quantile(0.158655);
  r.sigma_high = d.quantile(0.841345);
  return r;
}

bool bit_equal(const SummaryRecord &a, const SummaryRecord &b) {
  return std::memcmp(&a, &b, sizeof(SummaryRecord)) == 0;
}

} // namespace

TEST_CASE("union knots deduplicate shared grids") {
  std::vector<PiecewiseLinearDensity> classes;
  for (int c = 0; c < 5; ++c)
    classes.push_back(PiecewiseLinearDensity::build(
        kNames[c], {0.1, 0.28, 0.46, 0.64, 0.82}, {1.0, 1.5, 1.0, 1.5, 1.0}, true));
  const auto table = MixtureTable::build(classes);
  CHECK(table.union_knots().size() == 5);
}

TEST_CASE("union knots merge disjoint interior grids") {
  std::vector<PiecewiseLinearDensity> classes;
  classes.push_back(PiecewiseLinearDensity::build("dry", {0.0, 0.2, 0.5, 1.0},
                                                  {1.0, 1.0, 1.0, 1.0}, true));
  classes.push_back(PiecewiseLinearDensity::build("wet", {0.0, 0.3, 0.6, 1.0},
                                                  {1.0, 1.0, 1.0, 1.0}, true));
  for (const char *n : {"snowy", "icy", "slushy"})
    classes.push_back(
        PiecewiseLinearDensity::build(n, {0.0, 1.0}, {1.0, 1.0}, true));
  const auto table = MixtureTable::build(classes);
  CHECK(table.union_knots().size() == 6);
  // every class CDF reaches 1 at the final union knot
  const auto &d = table.data();
  for (int c = 0; c < 5; ++c)
    CHECK(std::fabs(d.blob[size_t(d.n_knots - 1) * 15 + size_t(c)] - 1.0) <= 1e-9);
}

TEST_CASE("table rejects missing or duplicate classes") {
  std::mt19937_64 rng(5);
  auto classes = random_classes(rng);
  classes.pop_back();
  CHECK_THROWS_AS(MixtureTable::build(classes), std::invalid_argument);
  classes.push_back(PiecewiseLinearDensity::build("dry", {0.0, 1.0}, {1.0, 1.0}, true));
  CHECK_THROWS_AS(MixtureTable::build(classes), std::invalid_argument);
}

TEST_CASE("one-hot fusion reproduces the class density") {
  std::mt19937_64 rng(6);
  const auto classes = random_classes(rng);
  const auto table = MixtureTable::build(classes);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int c = 0; c < 5; ++c) {
    std::array<double, 5> probs{};
    probs[size_t(c)] = 1.0;
    const auto fused = table.fuse(probs);
    for (double k : table.union_knots())
      CHECK(std::fabs(fused.pdf(k) - classes[size_t(c)].pdf(k)) <= 1e-12);
    for (int i = 0; i < 50; ++i) {
      const double g = u(rng);
      CHECK(std::fabs(fused.pdf(g) - classes[size_t(c)].pdf(g)) <= 1e-12);
    }
  }
}

TEST_CASE("disjoint supports leave an exact zero-density gap") {
  const auto table = MixtureTable::build(gap_classes());
  const std::array<double, 5> probs{0.5, 0.5, 0.0, 0.0, 0.0};
  const auto fused = table.fuse(probs);
  CHECK(fused.quantile(0.05) == doctest::Approx(0.04).epsilon(1e-12));
  CHECK(fused.quantile(0.5) == 0.4); // plateau: leftmost admissible grip
  CHECK(fused.cdf(0.5) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(fused.pdf(0.5) == 0.0);
  CHECK(fused.pdf(0.45) == 0.0);
}

TEST_CASE("fuse validates the probability vector") {
  const auto table = MixtureTable::build(gap_classes());
  CHECK_THROWS_AS(table.fuse(std::array<double, 5>{0.5, 0.6, 0.0, 0.0, 0.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(table.fuse(std::array<double, 5>{-0.1, 1.1, 0.0, 0.0, 0.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(table.fuse(std::array<double, 3>{0.5, 0.5, 0.0}),
                  std::invalid_argument);
}

TEST_CASE("fused cdf equals the probability-weighted class cdfs") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int rep = 0; rep < 25; ++rep) {
    const auto classes = random_classes(rng);
    const auto table = MixtureTable::build(classes);
    const auto probs = random_probs(rng);
    const auto fused = table.fuse(probs);
    for (int i = 0; i < 40; ++i) {
      const double g = u(rng);
      double want = 0.0;
      for (int c = 0; c < 5; ++c)
        want += probs[size_t(c)] * classes[size_t(c)].cdf(g);
      CHECK(std::fabs(fused.cdf(g) - want) <= 1e-12);
    }
    double mean_lin = 0.0;
    for (int c = 0; c < 5; ++c)
      mean_lin += probs[size_t(c)] * table.class_mean(SurfaceState(c));
    CHECK(std::fabs(fused.mean() - mean_lin) <= 1e-12);
  }
}

TEST_CASE("mixture quantile round trip at the summary targets") {
  std::mt19937_64 rng(9);
  const double ps[] = {0.05, 0.158655, 0.5, 0.841345, 0.95};
  for (int rep = 0; rep < 50; ++rep) {
    const auto table = MixtureTable::build(random_classes(rng));
    const auto fused = table.fuse(random_probs(rng));
    for (double p : ps) {
      const double g = fused.quantile(p);
      const double c = fused.cdf(g);
      if (std::fabs(c - p) > 1e-9) {
        // zero-density plateau: cdf may overshoot but only where pdf is zero
        CHECK(c >= p);
        CHECK(fused.pdf(std::nextafter(g, 1.0)) == 0.0);
      }
    }
  }
}

TEST_CASE("Monte Carlo coverage of the fused 90% interval") {
  std::mt19937_64 rng(10);
  const auto table = MixtureTable::build(random_classes(rng));
  const auto fused = table.fuse(random_probs(rng));
  const double lo = fused.quantile(0.05), hi = fused.quantile(0.95);
  CounterStream st(77, 1);
  const size_t n = 1000000;
  size_t inside = 0;
  for (size_t i = 0; i < n; ++i) {
    const double g = fused.quantile(st.next_open());
    inside += size_t(g >= lo && g <= hi);
  }
  CHECK(std::fabs(double(inside) / double(n) - 0.90) <= 0.003);
}

TEST_CASE("raster summaries match the per-pixel path bit for bit") {
  std::mt19937_64 rng(11);
  const auto table = MixtureTable::build(random_classes(rng));
  const auto raster = random_prob_raster(rng, 16, 16);
  FuseOptions opts;
  opts.kernel = SummaryKernel::Scalar;
  const auto batch = fuse_raster(table, raster, opts);
  for (size_t i = 0; i < batch.pixels.size(); ++i) {
    double probs[5];
    for (int c = 0; c < 5; ++c)
      probs[c] = double(raster.data[i * 5 + size_t(c)]);
    const SummaryRecord want = reference_summary(table, probs);
    CHECK(bit_equal(batch.pixels[i], want));
  }
}

TEST_CASE("thread count does not change raster summaries") {
  std::mt19937_64 rng(12);
  const auto table = MixtureTable::build(random_classes(rng));
  const auto raster = random_prob_raster(rng, 23, 17);
  FuseOptions one;
  one.threads = 1;
  FuseOptions four;
  four.threads = 4;
  const auto a = fuse_raster(table, raster, one);
  const auto b = fuse_raster(table, raster, four);
  REQUIRE(a.pixels.size() == b.pixels.size());
  CHECK(std::memcmp(a.pixels.data(), b.pixels.data(),
                    a.pixels.size() * sizeof(SummaryRecord)) == 0);
}

TEST_CASE("single-pixel one-hot raster reduces to the class summary") {
  std::mt19937_64 rng(13);
  const auto classes = random_classes(rng);
  const auto table = MixtureTable::build(classes);
  Raster<float> raster(1, 1, 5);
  raster.data = {0.0f, 0.0f, 1.0f, 0.0f, 0.0f};
  const auto s = fuse_raster(table, raster);
  const auto &d = classes[2];
  CHECK(s.at(0, 0).mean == doctest::Approx(d.mean()).epsilon(1e-12));
  CHECK(s.at(0, 0).median == doctest::Approx(d.quantile(0.5)).epsilon(1e-12));
  CHECK(s.at(0, 0).p05 == doctest::Approx(d.quantile(0.05)).epsilon(1e-12));
}

TEST_CASE("uniform single-class mixture has the textbook p05") {
  std::vector<PiecewiseLinearDensity> classes;
  for (int c = 0; c < 5; ++c)
    classes.push_back(PiecewiseLinearDensity::build(
        kNames[c], {0.1, 0.82}, {1.0 / 0.72, 1.0 / 0.72}, false));
  const auto table = MixtureTable::build(classes);
  Raster<float> raster(2, 2, 5);
  for (size_t i = 0; i < 4; ++i)
    for (int c = 0; c < 5; ++c)
      raster.data[i * 5 + size_t(c)] = 0.2f;
  const auto s = fuse_raster(table, raster);
  CHECK(s.at(0, 0).p05 == doctest::Approx(0.136).epsilon(1e-9));
  // all pixels identical
  for (size_t i = 1; i < 4; ++i)
    CHECK(bit_equal(s.pixels[0], s.pixels[i]));
}

TEST_CASE("fuse_raster validates its input") {
  std::mt19937_64 rng(14);
  const auto table = MixtureTable::build(random_classes(rng));
  Raster<float> bad(2, 2, 4);
  CHECK_THROWS_AS(fuse_raster(table, bad), std::invalid_argument);
  Raster<float> nosum(1, 1, 5);
  nosum.data = {0.5f, 0.4f, 0.0f, 0.0f, 0.0f};
  CHECK_THROWS_AS(fuse_raster(table, nosum), std::invalid_argument);
  Raster<float> neg(1, 1, 5);
  neg.data = {1.2f, -0.2f, 0.0f, 0.0f, 0.0f};
  CHECK_THROWS_AS(fuse_raster(table, neg), std::invalid_argument);
}

TEST_CASE("ideal summaries equal one-hot fused rasters bit for bit") {
  std::mt19937_64 rng(15);
  const auto table = MixtureTable::build(random_classes(rng));
  Raster<uint8_t> labels(9, 7, 1);
  std::uniform_int_distribution<int> cls(0, 4);
  for (auto &v : labels.data)
    v = uint8_t(cls(rng));
  Raster<float> onehot(9, 7, 5);
  for (size_t i = 0; i < labels.data.size(); ++i)
    onehot.data[i * 5 + labels.data[i]] = 1.0f;
  const auto a = ideal_from_labels(table, labels);
  const auto b = fuse_raster(table, onehot);
  CHECK(std::memcmp(a.pixels.data(), b.pixels.data(),
                    a.pixels.size() * sizeof(SummaryRecord)) == 0);

  Raster<uint8_t> bad(1, 1, 1);
  bad.data = {7};
  CHECK_THROWS_AS(ideal_from_labels(table, bad), std::invalid_argument);
}

TEST_CASE("summary records are ordered and stay inside the support") {
  std::mt19937_64 rng(17);
  const auto classes = random_classes(rng);
  const auto table = MixtureTable::build(classes);
  const auto raster = random_prob_raster(rng, 12, 12);
  const auto s = fuse_raster(table, raster);
  const double lo = table.union_knots().front();
  const double hi = table.union_knots().back();
  for (const auto &px : s.pixels) {
    CHECK(px.p05 <= px.median);
    CHECK(px.median <= px.p95);
    CHECK(px.sigma_low <= px.median);
    CHECK(px.median <= px.sigma_high);
    for (double v : {px.mean, px.median, px.p05, px.p95, px.sigma_low,
                     px.sigma_high}) {
      CHECK(v >= lo);
      CHECK(v <= hi);
    }
  }
}

TEST_CASE("probability slack within 1e-6 is renormalized, beyond rejected") {
  std::mt19937_64 rng(18);
  const auto table = MixtureTable::build(random_classes(rng));
  std::array<double, 5> near{0.2, 0.2, 0.2, 0.2, 0.2000005};
  const auto fused = table.fuse(near); // slack 5e-7: accepted
  CHECK(std::fabs(fused.cdf(table.union_knots().back()) - 1.0) <= 1e-9);
  std::array<double, 5> far{0.2, 0.2, 0.2, 0.2, 0.200002};
  CHECK_THROWS_AS(table.fuse(far), std::invalid_argument);
}

TEST_CASE("summary raster file round trip") {
  std::mt19937_64 rng(16);
  const auto table = MixtureTable::build(random_classes(rng));
  const auto raster = random_prob_raster(rng, 4, 3);
  const auto s = fuse_raster(table, raster);
  const auto encoded = summary_to_raster(s);
  CHECK(encoded.channels == 6);
  const auto decoded = summary_from_raster(encoded);
  CHECK(decoded.has_median);
  CHECK(decoded.has_sigma);
  for (size_t i = 0; i < s.pixels.size(); ++i)
    CHECK(decoded.pixels[i].mean == doctest::Approx(s.pixels[i].mean).epsilon(1e-6));

  // absent channels (NaN) round trip into cleared flags
  GripSummaryRaster q(1, 1);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  q.pixels[0] = {0.4, nan, 0.3, 0.5, nan, nan};
  q.has_median = false;
  q.has_sigma = false;
  const auto qd = summary_from_raster(summary_to_raster(q));
  CHECK_FALSE(qd.has_median);
  CHECK_FALSE(qd.has_sigma);
  CHECK(qd.pixels[0].p05 == doctest::Approx(0.3).epsilon(1e-6));
}
