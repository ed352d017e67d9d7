#include "gripdist/synth.hpp"

#include <cmath>
#include <stdexcept>

#include "gripdist/baselines.hpp"
#include "gripdist/rng.hpp"

namespace grip {

namespace {

// stream tags, one namespace per consumer
constexpr uint64_t kTagSceneGrip = 1;
constexpr uint64_t kTagClassifier = 2;
constexpr uint64_t kTagNormalHead = 3;
constexpr uint64_t kTagEnsembleHead = 4;
constexpr uint64_t kTagDropoutHead = 5;

uint64_t pixel_key(uint32_t row, uint32_t col) {
  return (uint64_t(row) << 32) | uint64_t(col);
}

double draw_normal(CounterStream &st) { return normal_quantile(st.next_open()); }

} // namespace

ClassGripGenerator default_class_densities() {
  ClassGripGenerator gen;
  auto set = [&](SurfaceState s, std::vector<double> knots,
                 std::vector<double> dens) {
    gen.densities[static_cast<size_t>(s)] = PiecewiseLinearDensity::build(
        to_string(s), std::move(knots), std::move(dens), true);
  };
  set(SurfaceState::Dry, {0.78, 0.795, 0.805, 0.8125, 0.8175, 0.82},
      {0.0, 6.0, 18.0, 46.0, 40.0, 8.0});
  set(SurfaceState::Wet, {0.45, 0.52, 0.60, 0.68, 0.75, 0.80, 0.82},
      {0.0, 0.8, 1.6, 2.6, 3.4, 3.0, 0.6});
  set(SurfaceState::Snowy, {0.25, 0.30, 0.33, 0.35, 0.37, 0.40, 0.45, 0.50},
      {0.0, 3.0, 8.0, 10.0, 8.0, 3.0, 0.8, 0.0});
  set(SurfaceState::Icy, {0.09, 0.12, 0.16, 0.22, 0.28, 0.35},
      {0.0, 5.0, 8.0, 6.0, 2.5, 0.0});
  set(SurfaceState::Slushy, {0.35, 0.42, 0.50, 0.58, 0.65, 0.70},
      {0.0, 1.5, 3.2, 2.6, 1.0, 0.0});
  return gen;
}

void SceneConfig::validate() const {
  if (height == 0 || width == 0)
    throw std::invalid_argument("scene: empty dimensions");
  if (horizon >= height - 1)
    throw std::invalid_argument("scene: horizon must lie above the bottom row");
  if (layout.empty())
    throw std::invalid_argument("scene: empty class layout");
  double sum = 0.0;
  for (const auto &[state, frac] : layout) {
    (void)state;
    if (!(frac >= 0.0))
      throw std::invalid_argument("scene: negative layout fraction");
    sum += frac;
  }
  if (std::fabs(sum - 1.0) > 1e-9)
    throw std::invalid_argument("scene: layout fractions must sum to 1");
}

Scene generate_scene(const SceneConfig &cfg, const ClassGripGenerator &gen,
                     uint64_t seed, std::string sample_id) {
  cfg.validate();
  Scene scene;
  scene.labels = Raster<uint8_t>(cfg.height, cfg.width, 1);
  scene.gt.id = std::move(sample_id);
  scene.gt.image_height = cfg.height;
  scene.gt.horizon_row = cfg.horizon;

  const uint32_t span = cfg.height - cfg.horizon;
  const uint32_t center = cfg.width / 2;
  for (uint32_t r = 0; r < cfg.height; ++r) {
    SurfaceState state = SurfaceState::Dry;
    if (r >= cfg.horizon) {
      const double frac = (double(r - cfg.horizon) + 0.5) / double(span);
      double cum = 0.0;
      state = cfg.layout.back().first;
      for (const auto &[s, f] : cfg.layout) {
        cum += f;
        if (frac < cum) {
          state = s;
          break;
        }
      }
    }
    for (uint32_t c = 0; c < cfg.width; ++c)
      scene.labels.at(r, c) = static_cast<uint8_t>(state);
    if (r >= cfg.horizon) {
      CounterStream st(seed, kTagSceneGrip, r);
      GroundTruthPixel px;
      px.row = r;
      px.col = center;
      px.state = state;
      px.grip = gen.for_state(state).quantile(st.next_open());
      scene.gt.pixels.push_back(px);
    }
  }
  return scene;
}

void SimulatorConfig::validate() const {
  if (!(accuracy >= 0.0) || !(accuracy <= 1.0))
    throw std::invalid_argument("simulator: accuracy must be in [0,1]");
  if (!(temperature > 0.0))
    throw std::invalid_argument("simulator: temperature must be positive");
  if (!(noise_sigma >= 0.0))
    throw std::invalid_argument("simulator: noise sigma must be >= 0");
  if (!(miscalibration > 0.0))
    throw std::invalid_argument("simulator: miscalibration factor must be positive");
  if (ensemble_size < 2 || dropout_samples < 2)
    throw std::invalid_argument("simulator: stacks need at least 2 members");
}

Raster<float> simulate_classifier(const Raster<uint8_t> &labels,
                                  const SimulatorConfig &cfg, uint64_t seed) {
  cfg.validate();
  if (labels.channels != 1)
    throw std::invalid_argument("simulate_classifier: label raster must have 1 channel");
  const double gap = std::exp(-1.0 / cfg.temperature);
  const float p_top = float(1.0 / (1.0 + 4.0 * gap));
  const float p_rest = float(gap / (1.0 + 4.0 * gap));

  Raster<float> probs(labels.height, labels.width, kNumSurfaceStates);
  for (uint32_t r = 0; r < labels.height; ++r) {
    for (uint32_t c = 0; c < labels.width; ++c) {
      const uint8_t truth = labels.at(r, c);
      if (truth >= kNumSurfaceStates)
        throw std::invalid_argument("simulate_classifier: label code outside 0..4");
      CounterStream st(seed, kTagClassifier, pixel_key(r, c));
      int emitted = truth;
      if (st.next_unit() >= cfg.accuracy) {
        int other = int(st.next_unit() * (kNumSurfaceStates - 1));
        if (other > kNumSurfaceStates - 2)
          other = kNumSurfaceStates - 2;
        emitted = other >= truth ? other + 1 : other;
      }
      float *px = probs.data.data() + probs.index(r, c);
      for (int k = 0; k < kNumSurfaceStates; ++k)
        px[k] = k == emitted ? p_top : p_rest;
    }
  }
  return probs;
}

RegressorOutputs simulate_regressors(const GroundTruthSample &sample,
                                     uint32_t image_width,
                                     const ClassGripGenerator &gen,
                                     const SimulatorConfig &cfg, uint64_t seed) {
  cfg.validate();
  if (image_width == 0 || sample.image_height == 0)
    throw std::invalid_argument("simulate_regressors: empty dimensions");

  struct HeadValues {
    float mu, s, q_low, q_high;
    std::vector<float> members, dropout_members;
  };
  auto head_values = [&](const PiecewiseLinearDensity &d, double mu_noise,
                         CounterStream *ens, CounterStream *drop) {
    HeadValues h;
    const double m = d.mean();
    const double sd = std::sqrt(d.variance());
    const double reported = sd / cfg.miscalibration;
    h.mu = float(m + mu_noise);
    h.s = float(std::log(reported * reported));
    h.q_low = float(m + (d.quantile(0.05) - m) / cfg.miscalibration);
    h.q_high = float(m + (d.quantile(0.95) - m) / cfg.miscalibration);
    h.members.resize(size_t(cfg.ensemble_size));
    for (auto &v : h.members)
      v = float(m + (ens ? draw_normal(*ens) : 0.0) * reported);
    h.dropout_members.resize(size_t(cfg.dropout_samples));
    for (auto &v : h.dropout_members)
      v = float(m + (drop ? draw_normal(*drop) : 0.0) * reported);
    return h;
  };

  RegressorOutputs out;
  out.normal = Raster<float>(sample.image_height, image_width, 2);
  out.quantile = Raster<float>(sample.image_height, image_width, 2);
  out.ensemble =
      Raster<float>(sample.image_height, image_width, uint16_t(cfg.ensemble_size));
  out.dropout = Raster<float>(sample.image_height, image_width,
                              uint16_t(cfg.dropout_samples));

  auto fill_row = [&](uint32_t row, const HeadValues &h) {
    for (uint32_t c = 0; c < image_width; ++c) {
      out.normal.at(row, c, 0) = h.mu;
      out.normal.at(row, c, 1) = h.s;
      out.quantile.at(row, c, 0) = h.q_low;
      out.quantile.at(row, c, 1) = h.q_high;
      for (int m = 0; m < cfg.ensemble_size; ++m)
        out.ensemble.at(row, c, uint16_t(m)) = h.members[size_t(m)];
      for (int m = 0; m < cfg.dropout_samples; ++m)
        out.dropout.at(row, c, uint16_t(m)) = h.dropout_members[size_t(m)];
    }
  };

  const HeadValues rest =
      head_values(gen.for_state(SurfaceState::Dry), 0.0, nullptr, nullptr);
  for (uint32_t r = 0; r < sample.image_height; ++r)
    fill_row(r, rest);

  for (const auto &px : sample.pixels) {
    if (px.row >= sample.image_height || px.col >= image_width)
      throw std::invalid_argument("simulate_regressors: pixel out of bounds");
    const uint64_t key = pixel_key(px.row, px.col);
    CounterStream norm(seed, kTagNormalHead, key);
    CounterStream ens(seed, kTagEnsembleHead, key);
    CounterStream drop(seed, kTagDropoutHead, key);
    const double mu_noise = draw_normal(norm) * cfg.noise_sigma;
    fill_row(px.row, head_values(gen.for_state(px.state), mu_noise, &ens, &drop));
  }
  return out;
}

} // namespace grip
