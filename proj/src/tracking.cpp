#include "vocalsep/tracking.hpp"

#include "vocalsep/saliency.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace vocalsep {

std::size_t F0Contour::voiced_count() const {
  return static_cast<std::size_t>(std::count(voiced.begin(), voiced.end(), true));
}

F0Contour F0Contour::from_hz(std::vector<double> hz, double hop_seconds, double start_seconds,
                             double reference_hz) {
  F0Contour out;
  out.hop_seconds = hop_seconds;
  out.start_seconds = start_seconds;
  out.voiced.resize(hz.size());
  out.f0_cents.resize(hz.size());
  for (std::size_t i = 0; i < hz.size(); ++i) {
    out.voiced[i] = hz[i] > 0;
    if (!out.voiced[i]) hz[i] = 0.0;
    out.f0_cents[i] = out.voiced[i] ? 1200.0 * std::log2(hz[i] / reference_hz) : 0.0;
  }
  out.f0_hz = std::move(hz);
  return out;
}

double transition_cost(double cents_from, double cents_to, double b) {
  require(b > 0, "Laplace scale b must be positive");
  return std::exp(-std::abs(cents_from - cents_to) / b) / (2.0 * b);
}

SearchRange search_range(const SaliencySpectrogram& s, const TrackerConfig& cfg) {
  require(cfg.f0_min > 0 && cfg.f0_min < cfg.f0_max, "tracker requires 0 < f0_min < f0_max");
  require(cfg.b > 0, "Laplace scale b must be positive");
  constexpr double slack = 1e-9;
  SearchRange range{0, -1};
  bool found = false;
  for (Eigen::Index c = 0; c < s.bins(); ++c) {
    const double hz = s.grid.center_hz(c);
    if (hz >= cfg.f0_min * (1 - slack) && hz <= cfg.f0_max * (1 + slack)) {
      if (!found) range.first = c;
      range.last = c;
      found = true;
    }
  }
  require(found, "F0 search range maps to no saliency bins");
  return range;
}

namespace {

// Emission log-probabilities restricted to the search range, frames x range.size().
Matrix emissions(const SaliencySpectrogram& s, const TrackerConfig& cfg, const SearchRange& range) {
  Matrix e(s.frames(), range.size());
  for (Eigen::Index t = 0; t < s.frames(); ++t) {
    const auto row = (s.values.row(t).segment(range.first, range.size()).array() + cfg.saliency_floor).eval();
    const double total = row.sum();
    e.row(t) = (row / total).log().matrix();
  }
  return e;
}

}  // namespace

double path_score(const SaliencySpectrogram& s, const TrackerConfig& cfg, const std::vector<Eigen::Index>& path) {
  require(static_cast<Eigen::Index>(path.size()) == s.frames(), "path length does not match frame count");
  const auto range = search_range(s, cfg);
  const Matrix e = emissions(s, cfg, range);
  double score = 0.0;
  for (std::size_t t = 0; t < path.size(); ++t) {
    require(path[t] >= range.first && path[t] <= range.last, "path leaves the search range");
    score += e(static_cast<Eigen::Index>(t), path[t] - range.first);
    if (t + 1 < path.size())
      score += std::log(transition_cost(s.grid.center_cents(path[t]), s.grid.center_cents(path[t + 1]), cfg.b));
  }
  return score;
}

std::vector<Eigen::Index> viterbi_path(const SaliencySpectrogram& s, const TrackerConfig& cfg) {
  require(s.frames() >= 1, "saliency has no frames");
  const auto range = search_range(s, cfg);
  const Eigen::Index k = range.size();
  const Eigen::Index frames = s.frames();
  const Matrix e = emissions(s, cfg, range);

  // log G depends only on the bin distance.
  std::vector<double> log_transition(static_cast<std::size_t>(k));
  for (Eigen::Index d = 0; d < k; ++d)
    log_transition[static_cast<std::size_t>(d)] =
        std::log(transition_cost(0.0, static_cast<double>(d) * s.grid.cents_per_bin, cfg.b));

  std::vector<double> prev(static_cast<std::size_t>(k));
  for (Eigen::Index j = 0; j < k; ++j) prev[static_cast<std::size_t>(j)] = e(0, j);
  std::vector<double> next(static_cast<std::size_t>(k));
  std::vector<Eigen::Index> back(static_cast<std::size_t>(frames * k), 0);

  for (Eigen::Index t = 1; t < frames; ++t) {
    for (Eigen::Index to = 0; to < k; ++to) {
      double best = -std::numeric_limits<double>::infinity();
      Eigen::Index arg = 0;
      for (Eigen::Index from = 0; from < k; ++from) {
        const double v = prev[static_cast<std::size_t>(from)] +
                         log_transition[static_cast<std::size_t>(std::abs(to - from))];
        if (v > best) {
          best = v;
          arg = from;
        }
      }
      next[static_cast<std::size_t>(to)] = best + e(t, to);
      back[static_cast<std::size_t>(t * k + to)] = arg;
    }
    std::swap(prev, next);
  }

  Eigen::Index state = 0;
  for (Eigen::Index j = 1; j < k; ++j)
    if (prev[static_cast<std::size_t>(j)] > prev[static_cast<std::size_t>(state)]) state = j;

  std::vector<Eigen::Index> path(static_cast<std::size_t>(frames));
  for (Eigen::Index t = frames - 1; t >= 0; --t) {
    path[static_cast<std::size_t>(t)] = state + range.first;
    if (t > 0) state = back[static_cast<std::size_t>(t * k + state)];
  }
  return path;
}

F0Contour viterbi(const SaliencySpectrogram& s, const TrackerConfig& cfg) {
  const auto path = viterbi_path(s, cfg);
  F0Contour out;
  out.hop_seconds = s.hop_seconds;
  out.f0_hz.resize(path.size());
  out.f0_cents.resize(path.size());
  out.voiced.assign(path.size(), true);
  for (std::size_t t = 0; t < path.size(); ++t) {
    // Clamp so rounding in the grid formula cannot leave the configured range.
    out.f0_hz[t] = std::clamp(s.grid.center_hz(path[t]), cfg.f0_min, cfg.f0_max);
    out.f0_cents[t] = s.grid.center_cents(path[t]);
  }
  return out;
}

std::vector<AlignedPair> contour_accuracy_prep(const F0Contour& contour, const F0Contour& ground_truth) {
  require(contour.frames() >= 1 && ground_truth.frames() >= 1, "contours must be nonempty");
  require(contour.hop_seconds > 0 && ground_truth.hop_seconds > 0, "contour hop must be positive");

  auto nearest = [](const F0Contour& c, double time) {
    const double idx = std::round((time - c.start_seconds) / c.hop_seconds);
    return static_cast<std::size_t>(std::clamp(idx, 0.0, static_cast<double>(c.frames() - 1)));
  };

  const double span = static_cast<double>(ground_truth.frames() - 1) * ground_truth.hop_seconds;
  const auto ticks = static_cast<std::size_t>(std::floor(span / kCommonFrameSeconds + 1e-9)) + 1;

  std::vector<AlignedPair> pairs;
  for (std::size_t k = 0; k < ticks; ++k) {
    const double time = ground_truth.start_seconds + static_cast<double>(k) * kCommonFrameSeconds;
    const auto gi = nearest(ground_truth, time);
    if (!ground_truth.voiced[gi]) continue;
    const auto ei = nearest(contour, time);
    pairs.push_back({time, contour.voiced[ei] ? contour.f0_hz[ei] : 0.0, ground_truth.f0_hz[gi]});
  }
  return pairs;
}

}  // namespace vocalsep
