#pragma once

#include "vocalsep/spectrogram.hpp"
#include "vocalsep/tracking.hpp"

#include <string>
#include <vector>

namespace vocalsep {

/// Ratios are clamped to +/- this value so exact estimates stay finite in aggregates.
inline constexpr double kRatioCapDb = 300.0;

struct EstimateDecomposition {
  std::vector<double> s_target;
  std::vector<double> e_interf;
  std::vector<double> e_artif;
};

struct SeparationScore {
  double sdr = 0.0;
  double sir = 0.0;
  double sar = 0.0;
  double nsdr = 0.0;
};

struct ClipScore {
  std::string id;
  double length = 0.0;  // weight l_k, in samples
  SeparationScore score;
};

struct CorpusScore {
  double gnsdr = 0.0;
  double gsir = 0.0;
  double gsar = 0.0;
  std::vector<ClipScore> per_clip;
};

/// Splits an estimate into the part explained by the target, the extra part explained by
/// the interferer and the remainder, using gain-only (zero-delay) projections.
EstimateDecomposition decompose_estimate(const AudioSignal& estimate, const AudioSignal& target,
                                         const AudioSignal& interferer);

/// 10 log10(numerator / denominator) clamped to [-cap, +cap]. A zero numerator yields -cap,
/// otherwise a zero denominator yields +cap.
double ratio_db(double numerator, double denominator);

/// SDR, SIR and SAR from a decomposition. nsdr is left at 0.
SeparationScore sdr_sir_sar(const EstimateDecomposition& parts);

/// Full score of `estimate` against `target`, with nsdr relative to `mixture`.
SeparationScore score_estimate(const AudioSignal& estimate, const AudioSignal& target,
                               const AudioSignal& interferer, const AudioSignal& mixture);

double sdr(const AudioSignal& estimate, const AudioSignal& target, const AudioSignal& interferer);

/// SDR(estimate) - SDR(mixture); the interferer is mixture - target.
double nsdr(const AudioSignal& estimate, const AudioSignal& target, const AudioSignal& mixture);

struct WeightedValue {
  double value = 0.0;
  double length = 0.0;
};

/// Length-weighted mean, used for GNSDR, GSIR and GSAR.
double gnsdr(const std::vector<WeightedValue>& per_clip);

CorpusScore aggregate(std::vector<ClipScore> per_clip);

/// Fraction of voiced ground-truth frames whose estimate lies within tolerance_cents.
double raw_pitch_accuracy(const F0Contour& estimated, const F0Contour& truth, double tolerance_cents = 50.0);

/// Zeroes samples that fall in unvoiced frames of `truth`. Frame i owns the samples whose
/// time is within half a hop of its centre.
AudioSignal voiced_region_mask(const AudioSignal& signal, const F0Contour& truth);

}  // namespace vocalsep
