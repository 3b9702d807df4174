#include "vocalsep/saliency.hpp"

#include "fft.hpp"

#include <cmath>
#include <complex>
#include <vector>

namespace vocalsep {

void validate(const ShsConfig& cfg) {
  require(cfg.n_partials >= 1, "SHS needs at least one partial");
  require(cfg.decay_base > 0 && cfg.decay_base <= 1, "SHS decay_base must be in (0, 1]");
}

SaliencySpectrogram shs(const LogSpectrogram& logspec, const ShsConfig& cfg) {
  validate(cfg);
  const double p = logspec.grid.cents_per_bin;
  const Eigen::Index bins = logspec.bins();
  const Matrix floored = logspec.values.cwiseMax(0.0);

  SaliencySpectrogram out;
  out.grid = logspec.grid;
  out.hop_seconds = logspec.hop_seconds;
  out.values = Matrix::Zero(logspec.frames(), bins);

  double weight = 1.0;
  for (int n = 1; n <= cfg.n_partials; ++n, weight *= cfg.decay_base) {
    const auto shift = static_cast<Eigen::Index>(std::floor(1200.0 * std::log2(static_cast<double>(n)) / p));
    if (shift >= bins) break;
    const Eigen::Index span = bins - shift;
    out.values.leftCols(span) += weight * floored.middleCols(shift, span);
  }
  return out;
}

SaliencySpectrogram f0_enhancement(const TimeFrequencyMask& binary_mask, const LogFrequencyGrid& grid,
                                   double h_top, double hop_seconds, EnhancementDiagnostics* diagnostics) {
  validate(grid);
  require(binary_mask.kind == MaskKind::binary, "F0 enhancement expects a binary mask");
  require(h_top > 0, "h_top must be positive");
  const Eigen::Index length = binary_mask.bins();
  require(length >= 1, "mask has no bins");

  // DFT index for each grid bin; |DFT| of a real sequence is symmetric, so indices above
  // length/2 are folded back.
  std::vector<Eigen::Index> pick(static_cast<std::size_t>(grid.bins));
  std::size_t clamped = 0;
  for (int c = 0; c < grid.bins; ++c) {
    auto k = static_cast<Eigen::Index>(std::floor(h_top / grid.center_hz(c)));
    if (k >= length) {
      k = length - 1;
      ++clamped;
    }
    pick[static_cast<std::size_t>(c)] = k <= length / 2 ? k : length - k;
  }
  if (diagnostics) diagnostics->clamped_bins = clamped;

  SaliencySpectrogram out;
  out.grid = grid;
  out.hop_seconds = hop_seconds;
  out.values.resize(binary_mask.frames(), grid.bins);

  detail::RealFft fft(static_cast<std::size_t>(length));
  std::vector<double> row(static_cast<std::size_t>(length));
  std::vector<std::complex<double>> spectrum(fft.bins());
  for (Eigen::Index t = 0; t < binary_mask.frames(); ++t) {
    for (Eigen::Index f = 0; f < length; ++f) row[static_cast<std::size_t>(f)] = binary_mask.values(t, f);
    fft.forward(row, spectrum);
    for (int c = 0; c < grid.bins; ++c) out.values(t, c) = std::abs(spectrum[static_cast<std::size_t>(pick[static_cast<std::size_t>(c)])]);
  }
  return out;
}

SaliencySpectrogram combine(const SaliencySpectrogram& shs, const SaliencySpectrogram& enh, double alpha) {
  require(shs.frames() == enh.frames() && shs.bins() == enh.bins(), "saliency spectrograms differ in shape");
  require(alpha >= 0, "alpha must be nonnegative");
  SaliencySpectrogram out = shs;
  if (alpha == 0.0) return out;
  out.values = shs.values.array() * enh.values.array().pow(alpha);
  return out;
}

}  // namespace vocalsep
