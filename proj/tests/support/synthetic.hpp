#pragma once

#include "vocalsep/spectrogram.hpp"
#include "vocalsep/tracking.hpp"

#include <cstdint>

namespace vocalsep::testing {

struct SyntheticClip {
  AudioSignal vocal;
  AudioSignal accompaniment;
  AudioSignal mixture;
  F0Contour f0;  // 10 ms clock, ground truth
};

struct SyntheticSpec {
  int sample_rate = 16000;
  double seconds = 10.0;
  int harmonics = 8;
  double f0_low = 180.0;
  double f0_high = 260.0;
  double vibrato_hz = 5.5;
  double vibrato_cents = 40.0;
  double loop_seconds = 2.0;  // four bars of 0.5 s, repeated
  double snr_db = 0.0;
  std::uint64_t seed = 7;
};

/// Harmonic vibrato "vocal" over a repeating accompaniment loop, mixed at spec.snr_db.
SyntheticClip make_synthetic_clip(const SyntheticSpec& spec = {});

}  // namespace vocalsep::testing
