#pragma once

#include "vocalsep/common.hpp"
#include "vocalsep/rpca.hpp"
#include "vocalsep/spectrogram.hpp"
#include "vocalsep/tracking.hpp"

namespace vocalsep {

enum class MaskKind { soft, binary };

struct TimeFrequencyMask {
  Matrix values;  // frames x bins
  MaskKind kind = MaskKind::soft;

  Eigen::Index frames() const { return values.rows(); }
  Eigen::Index bins() const { return values.cols(); }
};

/// Checks the value-range invariant of the mask's kind.
bool is_well_formed(const TimeFrequencyMask& mask);

struct HarmonicMaskConfig {
  double w = 50.0;          // lobe width in Hz around each partial
  int n_partials = 10;
  double tukey_shape = 0.5;
};

void validate(const HarmonicMaskConfig& cfg);

struct SeparationResult {
  AudioSignal vocal;
  AudioSignal accompaniment;
  MagnitudeSpectrogram vocal_spec;
  MagnitudeSpectrogram accomp_spec;
};

/// |X_S| / (|X_S| + |X_L|); bins where both vanish map to 0.
TimeFrequencyMask wiener_mask(const RpcaResult& rpca);

/// 1 where |X_S| > gamma |X_L|, else 0.
TimeFrequencyMask binary_mask(const RpcaResult& rpca, double gamma);

/// Tukey window of `length` samples with taper fraction `shape`.
std::vector<double> tukey_window(int length, double shape);

/// Lobes around the harmonics of each voiced frame's F0. A lobe covers the bins whose
/// centres lie in [n f0 - w/2, n f0 + w/2] and carries a Tukey taper across that span.
/// Overlapping lobes combine by max; partials above Nyquist are skipped.
TimeFrequencyMask harmonic_mask(const F0Contour& f0, const MagnitudeSpectrogram& geometry,
                                const HarmonicMaskConfig& cfg);

TimeFrequencyMask integrate_soft(const TimeFrequencyMask& rpca_soft, const TimeFrequencyMask& harmonic);

/// Strict threshold at 0.5.
TimeFrequencyMask integrate_binary(const TimeFrequencyMask& integrated_soft);

/// Vocal = M |X|, accompaniment = |X| - vocal, both resynthesised with the mixture phase.
SeparationResult separate(const ComplexSpectrogram& x, const TimeFrequencyMask& mask);

/// M |X| as a magnitude spectrogram with the geometry of `mag`.
MagnitudeSpectrogram apply_mask(const MagnitudeSpectrogram& mag, const TimeFrequencyMask& mask);

}  // namespace vocalsep
