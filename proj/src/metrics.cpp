#include "vocalsep/metrics.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace vocalsep {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double energy(const std::vector<double>& a) { return dot(a, a); }

std::vector<double> sum(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> out(a.size());
  std::transform(a.begin(), a.end(), b.begin(), out.begin(), std::plus<>());
  return out;
}

}  // namespace

EstimateDecomposition decompose_estimate(const AudioSignal& estimate, const AudioSignal& target,
                                         const AudioSignal& interferer) {
  require(estimate.size() == target.size() && target.size() == interferer.size(),
          "estimate, target and interferer must have equal lengths");
  require(estimate.sample_rate == target.sample_rate && target.sample_rate == interferer.sample_rate,
          "estimate, target and interferer must share a sample rate");
  const auto& s = target.samples;
  const auto& n = interferer.samples;
  const auto& est = estimate.samples;

  const double ss = energy(s);
  const double nn = energy(n);
  require(ss > 0 || nn > 0, "target and interferer are both silent");
  const double sn = dot(s, n);

  Eigen::Matrix2d gram;
  gram << ss, sn, sn, nn;
  const Eigen::Vector2d rhs(dot(s, est), dot(n, est));
  const Eigen::Vector2d coeff = gram.completeOrthogonalDecomposition().solve(rhs);
  const double target_gain = ss > 0 ? rhs(0) / ss : 0.0;

  EstimateDecomposition out;
  const std::size_t len = est.size();
  out.s_target.resize(len);
  out.e_interf.resize(len);
  out.e_artif.resize(len);
  for (std::size_t i = 0; i < len; ++i) {
    out.s_target[i] = target_gain * s[i];
    const double projected = coeff(0) * s[i] + coeff(1) * n[i];
    out.e_interf[i] = projected - out.s_target[i];
    out.e_artif[i] = est[i] - out.s_target[i] - out.e_interf[i];
  }
  return out;
}

double ratio_db(double numerator, double denominator) {
  if (numerator <= 0.0) return -kRatioCapDb;
  if (denominator <= 0.0) return kRatioCapDb;
  return std::clamp(10.0 * std::log10(numerator / denominator), -kRatioCapDb, kRatioCapDb);
}

SeparationScore sdr_sir_sar(const EstimateDecomposition& parts) {
  const double target = energy(parts.s_target);
  SeparationScore out;
  out.sdr = ratio_db(target, energy(sum(parts.e_interf, parts.e_artif)));
  out.sir = ratio_db(target, energy(parts.e_interf));
  out.sar = ratio_db(energy(sum(parts.s_target, parts.e_interf)), energy(parts.e_artif));
  return out;
}

double sdr(const AudioSignal& estimate, const AudioSignal& target, const AudioSignal& interferer) {
  return sdr_sir_sar(decompose_estimate(estimate, target, interferer)).sdr;
}

namespace {

AudioSignal difference(const AudioSignal& a, const AudioSignal& b) {
  require(a.size() == b.size(), "signals differ in length");
  AudioSignal out;
  out.sample_rate = a.sample_rate;
  out.samples.resize(a.size());
  std::transform(a.samples.begin(), a.samples.end(), b.samples.begin(), out.samples.begin(), std::minus<>());
  return out;
}

}  // namespace

SeparationScore score_estimate(const AudioSignal& estimate, const AudioSignal& target,
                               const AudioSignal& interferer, const AudioSignal& mixture) {
  SeparationScore out = sdr_sir_sar(decompose_estimate(estimate, target, interferer));
  out.nsdr = out.sdr - sdr(mixture, target, interferer);
  return out;
}

double nsdr(const AudioSignal& estimate, const AudioSignal& target, const AudioSignal& mixture) {
  const AudioSignal interferer = difference(mixture, target);
  return sdr(estimate, target, interferer) - sdr(mixture, target, interferer);
}

double gnsdr(const std::vector<WeightedValue>& per_clip) {
  require(!per_clip.empty(), "weighted mean of an empty clip list");
  // Accumulate offsets from the first value so one clip, or equal values, come back exactly.
  const double base = per_clip.front().value;
  double weighted = 0.0;
  double total = 0.0;
  for (const auto& clip : per_clip) {
    require(clip.length > 0, "clip lengths must be positive");
    weighted += clip.length * (clip.value - base);
    total += clip.length;
  }
  return base + weighted / total;
}

CorpusScore aggregate(std::vector<ClipScore> per_clip) {
  require(!per_clip.empty(), "cannot aggregate an empty corpus");
  std::sort(per_clip.begin(), per_clip.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  std::vector<WeightedValue> n, i, a;
  for (const auto& clip : per_clip) {
    n.push_back({clip.score.nsdr, clip.length});
    i.push_back({clip.score.sir, clip.length});
    a.push_back({clip.score.sar, clip.length});
  }
  CorpusScore out;
  out.gnsdr = gnsdr(n);
  out.gsir = gnsdr(i);
  out.gsar = gnsdr(a);
  out.per_clip = std::move(per_clip);
  return out;
}

double raw_pitch_accuracy(const F0Contour& estimated, const F0Contour& truth, double tolerance_cents) {
  const auto pairs = contour_accuracy_prep(estimated, truth);
  require(!pairs.empty(), "ground truth has no voiced frames");
  std::size_t hits = 0;
  for (const auto& p : pairs) {
    if (p.estimated_hz <= 0) continue;
    if (std::abs(1200.0 * std::log2(p.estimated_hz / p.truth_hz)) <= tolerance_cents) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(pairs.size());
}

AudioSignal voiced_region_mask(const AudioSignal& signal, const F0Contour& truth) {
  require(truth.hop_seconds > 0, "contour hop must be positive");
  require(signal.sample_rate > 0, "sample_rate must be positive");
  AudioSignal out = signal;
  const auto frames = static_cast<double>(truth.frames());
  // Work in samples so frame boundaries that fall exactly between samples round consistently.
  const double hop = truth.hop_seconds * signal.sample_rate;
  const double start = truth.start_seconds * signal.sample_rate;
  for (std::size_t n = 0; n < out.samples.size(); ++n) {
    const double idx = std::round((static_cast<double>(n) - start) / hop);
    const bool voiced = idx >= 0 && idx < frames && truth.voiced[static_cast<std::size_t>(idx)];
    if (!voiced) out.samples[n] = 0.0;
  }
  return out;
}

}  // namespace vocalsep
