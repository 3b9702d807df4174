#pragma once

#include "vocalsep/common.hpp"

#include <cmath>
#include <cstddef>
#include <vector>

namespace vocalsep {

struct SaliencySpectrogram;

/// Per-frame F0 estimate. Frame i sits at start_seconds + i * hop_seconds.
/// Unvoiced frames carry f0_hz = 0.
struct F0Contour {
  std::vector<double> f0_hz;
  std::vector<double> f0_cents;  // cents above the tracking grid's h_low; 0 when unvoiced
  std::vector<bool> voiced;
  double hop_seconds = 0.01;
  double start_seconds = 0.0;

  std::size_t frames() const { return f0_hz.size(); }
  double time_of(std::size_t i) const { return start_seconds + static_cast<double>(i) * hop_seconds; }
  std::size_t voiced_count() const;

  /// Builds a contour from Hz values; values <= 0 are unvoiced.
  static F0Contour from_hz(std::vector<double> hz, double hop_seconds, double start_seconds = 0.0,
                           double reference_hz = 30.0);
};

struct TrackerConfig {
  double f0_min = 80.0;
  double f0_max = 720.0;
  double b = std::sqrt(150.0 * 150.0 / 2.0);  // Laplace scale in cents
  double saliency_floor = 1e-12;
};

/// Laplace transition density between two log-frequencies in cents.
double transition_cost(double cents_from, double cents_to, double b);

/// Inclusive grid-bin range [first, last] whose centres lie in [f0_min, f0_max].
struct SearchRange {
  Eigen::Index first = 0;
  Eigen::Index last = -1;
  Eigen::Index size() const { return last - first + 1; }
};

SearchRange search_range(const SaliencySpectrogram& s, const TrackerConfig& cfg);

/// Objective of a bin path (grid indices, one per frame): normalised log-saliency over
/// every frame plus log transition densities between consecutive frames.
double path_score(const SaliencySpectrogram& s, const TrackerConfig& cfg, const std::vector<Eigen::Index>& path);

/// Maximum-score path through the saliency restricted to the search range. Every frame is
/// returned voiced. Ties resolve toward the lower bin.
F0Contour viterbi(const SaliencySpectrogram& s, const TrackerConfig& cfg);

/// Grid indices of the path chosen by viterbi() (same tie-breaking).
std::vector<Eigen::Index> viterbi_path(const SaliencySpectrogram& s, const TrackerConfig& cfg);

struct AlignedPair {
  double time_seconds = 0.0;
  double estimated_hz = 0.0;  // 0 when the estimate is unvoiced
  double truth_hz = 0.0;
};

inline constexpr double kCommonFrameSeconds = 0.01;

/// Samples both contours on a 10 ms clock by nearest frame and keeps ticks where the
/// ground truth is voiced.
std::vector<AlignedPair> contour_accuracy_prep(const F0Contour& contour, const F0Contour& ground_truth);

}  // namespace vocalsep
