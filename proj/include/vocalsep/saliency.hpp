#pragma once

#include "vocalsep/common.hpp"
#include "vocalsep/masks.hpp"
#include "vocalsep/spectrogram.hpp"

#include <cstddef>

namespace vocalsep {

struct SaliencySpectrogram {
  Matrix values;  // frames x grid.bins, nonnegative
  LogFrequencyGrid grid;
  double hop_seconds = 0.0;

  Eigen::Index frames() const { return values.rows(); }
  Eigen::Index bins() const { return values.cols(); }
};

struct ShsConfig {
  int n_partials = 10;
  double decay_base = 0.86;  // weight of partial n is decay_base^(n-1)
};

void validate(const ShsConfig& cfg);

/// Subharmonic summation over a dB log spectrogram. Negative dB values are clamped to
/// zero first; shifted indices beyond the grid are dropped.
SaliencySpectrogram shs(const LogSpectrogram& logspec, const ShsConfig& cfg);

struct EnhancementDiagnostics {
  std::size_t clamped_bins = 0;  // grid bins whose DFT index had to be clamped
};

/// Per-frame DFT magnitude of a binary mask, read at index floor(h_top / h_c) for each
/// grid bin c.
SaliencySpectrogram f0_enhancement(const TimeFrequencyMask& binary_mask, const LogFrequencyGrid& grid,
                                   double h_top, double hop_seconds = 0.0,
                                   EnhancementDiagnostics* diagnostics = nullptr);

/// S_shs * S_enh^alpha with 0^0 = 1. alpha = 0 returns shs unchanged.
SaliencySpectrogram combine(const SaliencySpectrogram& shs, const SaliencySpectrogram& enh, double alpha);

}  // namespace vocalsep
