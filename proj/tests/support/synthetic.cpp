#include "synthetic.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace vocalsep::testing {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double energy(const std::vector<double>& x) {
  double e = 0.0;
  for (double v : x) e += v * v;
  return e;
}

// Slow glide between f0_low and f0_high with vibrato on top; vibrato depth is kept inside
// the band so the contour never leaves [f0_low, f0_high].
double contour_hz(const SyntheticSpec& spec, double t) {
  const double depth = std::pow(2.0, spec.vibrato_cents / 1200.0);
  const double lo = spec.f0_low * depth;
  const double hi = spec.f0_high / depth;
  const double centre = std::sqrt(lo * hi);
  const double swing = std::log2(hi / centre);
  const double glide = centre * std::pow(2.0, swing * std::sin(kTwoPi * 0.12 * t));
  return glide * std::pow(2.0, spec.vibrato_cents / 1200.0 * std::sin(kTwoPi * spec.vibrato_hz * t));
}

std::vector<double> make_loop(const SyntheticSpec& spec, std::mt19937_64& rng) {
  const auto n = static_cast<std::size_t>(std::lround(spec.loop_seconds * spec.sample_rate));
  std::vector<double> loop(n, 0.0);
  // One bass note and a three-note chord per bar, each with decaying partials.
  const double bass[4] = {55.0, 73.42, 61.74, 82.41};
  const double chords[4][3] = {{220.0, 277.18, 329.63},
                               {293.66, 369.99, 440.0},
                               {246.94, 311.13, 369.99},
                               {329.63, 415.3, 493.88}};
  std::uniform_real_distribution<double> phase(0.0, kTwoPi);
  const std::size_t bar = n / 4;
  for (int b = 0; b < 4; ++b) {
    auto add_note = [&](double f, double amp, int partials, double decay) {
      std::vector<double> ph(static_cast<std::size_t>(partials));
      for (auto& p : ph) p = phase(rng);
      for (std::size_t i = 0; i < bar; ++i) {
        const double t = static_cast<double>(i) / spec.sample_rate;
        const double env = std::exp(-decay * t) * std::min(1.0, t / 0.005);
        double v = 0.0;
        for (int k = 1; k <= partials; ++k) {
          if (k * f >= 0.45 * spec.sample_rate) break;
          v += std::sin(kTwoPi * k * f * t + ph[static_cast<std::size_t>(k - 1)]) / k;
        }
        loop[static_cast<std::size_t>(b) * bar + i] += amp * env * v;
      }
    };
    add_note(bass[b], 1.0, 6, 3.0);
    for (double f : chords[b]) add_note(f, 0.4, 5, 4.0);
  }
  return loop;
}

}  // namespace

SyntheticClip make_synthetic_clip(const SyntheticSpec& spec) {
  std::mt19937_64 rng(spec.seed);
  const auto n = static_cast<std::size_t>(std::lround(spec.seconds * spec.sample_rate));
  const double sr = spec.sample_rate;

  std::vector<double> vocal(n, 0.0);
  std::vector<double> phases(static_cast<std::size_t>(spec.harmonics), 0.0);
  std::uniform_real_distribution<double> phase(0.0, kTwoPi);
  for (auto& p : phases) p = phase(rng);
  double base_phase = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double f0 = contour_hz(spec, static_cast<double>(i) / sr);
    base_phase += kTwoPi * f0 / sr;
    double v = 0.0;
    for (int k = 1; k <= spec.harmonics; ++k)
      v += std::sin(k * base_phase + phases[static_cast<std::size_t>(k - 1)]) / k;
    vocal[i] = v;
  }

  const auto loop = make_loop(spec, rng);
  std::vector<double> accomp(n);
  for (std::size_t i = 0; i < n; ++i) accomp[i] = loop[i % loop.size()];

  const double gain = std::sqrt(energy(vocal) / (energy(accomp) * std::pow(10.0, spec.snr_db / 10.0)));
  for (double& v : accomp) v *= gain;
  // Keep the mixture comfortably inside [-1, 1].
  double peak = 0.0;
  for (std::size_t i = 0; i < n; ++i) peak = std::max(peak, std::abs(vocal[i] + accomp[i]));
  const double scale = 0.9 / peak;

  SyntheticClip clip;
  clip.vocal = {std::vector<double>(n), spec.sample_rate};
  clip.accompaniment = {std::vector<double>(n), spec.sample_rate};
  clip.mixture = {std::vector<double>(n), spec.sample_rate};
  for (std::size_t i = 0; i < n; ++i) {
    clip.vocal.samples[i] = scale * vocal[i];
    clip.accompaniment.samples[i] = scale * accomp[i];
    clip.mixture.samples[i] = clip.vocal.samples[i] + clip.accompaniment.samples[i];
  }

  const auto frames = static_cast<std::size_t>(std::floor(spec.seconds / kCommonFrameSeconds)) + 1;
  std::vector<double> hz(frames);
  for (std::size_t i = 0; i < frames; ++i) hz[i] = contour_hz(spec, static_cast<double>(i) * kCommonFrameSeconds);
  clip.f0 = F0Contour::from_hz(std::move(hz), kCommonFrameSeconds);
  return clip;
}

}  // namespace vocalsep::testing
