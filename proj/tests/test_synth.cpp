#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gripdist/baselines.hpp"
#include "gripdist/rng.hpp"
#include "gripdist/csv_io.hpp"
#include "gripdist/synth.hpp"
#include "oracles.hpp"

using namespace grip;

namespace {

SceneConfig small_scene() {
  SceneConfig cfg;
  cfg.height = 100;
  cfg.width = 32;
  cfg.horizon = 40;
  cfg.layout = {{SurfaceState::Dry, 0.3},
                {SurfaceState::Wet, 0.2},
                {SurfaceState::Snowy, 0.2},
                {SurfaceState::Icy, 0.2},
                {SurfaceState::Slushy, 0.1}};
  return cfg;
}

} // namespace

TEST_CASE("default class densities satisfy the documented anchors") {
  const auto gen = default_class_densities();
  for (int c = 0; c < kNumSurfaceStates; ++c) {
    const auto &d = gen.densities[size_t(c)];
    CHECK(d.support_lo() >= 0.09);
    CHECK(d.support_hi() <= 0.82);
    double integral = 0.0;
    for (size_t i = 0; i + 1 < d.knots().size(); ++i)
      integral += 0.5 * (d.densities()[i] + d.densities()[i + 1]) *
                  (d.knots()[i + 1] - d.knots()[i]);
    CHECK(std::fabs(integral - 1.0) <= 1e-9);
    // evaluation clamping must not touch the class 5th percentile
    CHECK(d.quantile(0.05) >= 0.1);
    CHECK(d.quantile(0.05) <= 0.81);
  }
  const auto &dry = gen.for_state(SurfaceState::Dry);
  CHECK(dry.quantile(0.5) >= 0.78);
  const auto &snowy = gen.for_state(SurfaceState::Snowy);
  CHECK(snowy.cdf(0.4) - snowy.cdf(0.3) >= 0.5);
  const auto &icy = gen.for_state(SurfaceState::Icy);
  const auto &wet = gen.for_state(SurfaceState::Wet);
  CHECK(icy.mean() < snowy.mean());
  CHECK(wet.support_hi() - wet.support_lo() >
        snowy.support_hi() - snowy.support_lo());
}

TEST_CASE("scene generation is deterministic and respects the layout") {
  const auto gen = default_class_densities();
  const auto cfg = small_scene();
  const auto a = generate_scene(cfg, gen, 17);
  const auto b = generate_scene(cfg, gen, 17);
  CHECK(a.labels.data == b.labels.data);
  REQUIRE(a.gt.pixels.size() == b.gt.pixels.size());
  for (size_t i = 0; i < a.gt.pixels.size(); ++i)
    CHECK(a.gt.pixels[i].grip == b.gt.pixels[i].grip);

  const auto c = generate_scene(cfg, gen, 18);
  CHECK(c.gt.pixels[0].grip != a.gt.pixels[0].grip);

  CHECK(a.gt.pixels.size() == 60); // one per row below the horizon
  for (const auto &px : a.gt.pixels) {
    CHECK(px.row >= cfg.horizon);
    CHECK(px.col == cfg.width / 2);
    CHECK(uint8_t(px.state) == a.labels.at(px.row, px.col));
  }
}

TEST_CASE("single-class layout produces that class everywhere") {
  const auto gen = default_class_densities();
  SceneConfig cfg = small_scene();
  cfg.layout = {{SurfaceState::Dry, 1.0}};
  const auto scene = generate_scene(cfg, gen, 3);
  for (const auto &px : scene.gt.pixels) {
    CHECK(px.state == SurfaceState::Dry);
    CHECK(px.grip >= 0.78);
    CHECK(px.grip <= 0.82);
  }
  cfg.layout = {{SurfaceState::Dry, 0.5}, {SurfaceState::Wet, 0.4}};
  CHECK_THROWS_AS(generate_scene(cfg, gen, 3), std::invalid_argument);
}

TEST_CASE("classifier simulator hits the requested accuracy") {
  const auto gen = default_class_densities();
  SceneConfig cfg = small_scene();
  cfg.height = 640;
  cfg.width = 160;
  const auto scene = generate_scene(cfg, gen, 5);

  SimulatorConfig sharp;
  sharp.accuracy = 1.0;
  sharp.temperature = 0.05;
  auto probs = simulate_classifier(scene.labels, sharp, 7);
  validate_class_probability_raster(probs);
  size_t checked = 0;
  for (size_t i = 0; i < probs.pixel_count(); ++i) {
    const float *px = probs.data.data() + i * 5;
    int argmax = 0;
    for (int c = 1; c < 5; ++c)
      if (px[c] > px[argmax])
        argmax = c;
    CHECK(argmax == scene.labels.data[i]);
    CHECK(px[argmax] >= 0.99f);
    ++checked;
  }
  CHECK(checked == probs.pixel_count());

  SimulatorConfig soft = sharp;
  soft.temperature = 1.0;
  probs = simulate_classifier(scene.labels, soft, 7);
  for (size_t i = 0; i < probs.pixel_count(); ++i) {
    const float *px = probs.data.data() + i * 5;
    int argmax = 0;
    for (int c = 1; c < 5; ++c)
      if (px[c] > px[argmax])
        argmax = c;
    CHECK(argmax == scene.labels.data[i]);
  }

  SimulatorConfig noisy;
  noisy.accuracy = 0.2;
  probs = simulate_classifier(scene.labels, noisy, 9);
  size_t hits = 0;
  for (size_t i = 0; i < probs.pixel_count(); ++i) {
    const float *px = probs.data.data() + i * 5;
    int argmax = 0;
    for (int c = 1; c < 5; ++c)
      if (px[c] > px[argmax])
        argmax = c;
    hits += size_t(argmax == scene.labels.data[i]);
  }
  const double acc = double(hits) / double(probs.pixel_count());
  CHECK(std::fabs(acc - 0.2) <= 0.004);

  SimulatorConfig bad;
  bad.accuracy = 1.5;
  CHECK_THROWS_AS(simulate_classifier(scene.labels, bad, 1), std::invalid_argument);
}

TEST_CASE("regressor heads encode the configured miscalibration") {
  const auto gen = default_class_densities();
  SceneConfig cfg = small_scene();
  cfg.layout = {{SurfaceState::Snowy, 1.0}};
  const auto scene = generate_scene(cfg, gen, 21);
  const auto &d = gen.for_state(SurfaceState::Snowy);

  SimulatorConfig exact;
  exact.noise_sigma = 0.0;
  exact.miscalibration = 1.0;
  const auto heads = simulate_regressors(scene.gt, cfg.width, gen, exact, 33);
  const auto &px = scene.gt.pixels.front();
  CHECK(heads.normal.at(px.row, 0, 0) == doctest::Approx(d.mean()).epsilon(1e-6));
  CHECK(heads.normal.at(px.row, 0, 1) ==
        doctest::Approx(std::log(d.variance())).epsilon(1e-5));
  CHECK(heads.quantile.at(px.row, 0, 0) ==
        doctest::Approx(d.quantile(0.05)).epsilon(1e-6));
  CHECK(heads.quantile.at(px.row, 0, 1) ==
        doctest::Approx(d.quantile(0.95)).epsilon(1e-6));

  SimulatorConfig half = exact;
  half.miscalibration = 2.0;
  const auto shrunk = simulate_regressors(scene.gt, cfg.width, gen, half, 33);
  const double width_full = double(heads.quantile.at(px.row, 0, 1)) -
                            double(heads.quantile.at(px.row, 0, 0));
  const double width_half = double(shrunk.quantile.at(px.row, 0, 1)) -
                            double(shrunk.quantile.at(px.row, 0, 0));
  CHECK(width_half == doctest::Approx(width_full / 2.0).epsilon(1e-5));
  const double sigma_full = std::exp(0.5 * double(heads.normal.at(px.row, 0, 1)));
  const double sigma_half = std::exp(0.5 * double(shrunk.normal.at(px.row, 0, 1)));
  CHECK(sigma_half == doctest::Approx(sigma_full / 2.0).epsilon(1e-5));

  const auto again = simulate_regressors(scene.gt, cfg.width, gen, half, 33);
  CHECK(again.normal.data == shrunk.normal.data);
  CHECK(again.ensemble.data == shrunk.ensemble.data);
  CHECK(again.dropout.data == shrunk.dropout.data);
  CHECK(shrunk.ensemble.channels == 5);
  CHECK(shrunk.dropout.channels == 10);
}

TEST_CASE("shipped density data file matches the built-in tables") {
  const auto gen = default_class_densities();
  const auto loaded = load_density_csv(GRIPDIST_DATA_DIR "/class_densities_v1.csv");
  REQUIRE(loaded.size() == kNumSurfaceStates);
  for (const auto &d : loaded) {
    const auto &ref = gen.for_state(surface_state_from_string(d.class_name()));
    REQUIRE(d.knots().size() == ref.knots().size());
    for (size_t i = 0; i < d.knots().size(); ++i) {
      CHECK(d.knots()[i] == ref.knots()[i]);
      CHECK(d.densities()[i] == ref.densities()[i]);
    }
  }
}

TEST_CASE("inverse-CDF sampling matches the analytic distribution") {
  const auto gen = default_class_densities();
  for (SurfaceState s : {SurfaceState::Wet, SurfaceState::Icy}) {
    const auto &d = gen.for_state(s);
    CounterStream st(1234, uint64_t(s));
    std::vector<double> draws(1000000);
    for (auto &v : draws)
      v = d.quantile(st.next_open());
    const double ks =
        oracle::ks_statistic(std::move(draws), [&](double g) { return d.cdf(g); });
    // 1% critical value for n = 1e6
    CHECK(ks < 1.63 / 1000.0);
  }
}
