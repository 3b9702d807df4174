#include "vocalsep/masks.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace vocalsep {

bool is_well_formed(const TimeFrequencyMask& mask) {
  if (mask.kind == MaskKind::binary)
    return (mask.values.array() == 0.0 || mask.values.array() == 1.0).all();
  return (mask.values.array() >= 0.0 && mask.values.array() <= 1.0).all();
}

void validate(const HarmonicMaskConfig& cfg) {
  require(cfg.w > 0, "harmonic mask width w must be positive");
  require(cfg.n_partials >= 1, "harmonic mask needs at least one partial");
  require(cfg.tukey_shape >= 0 && cfg.tukey_shape <= 1, "tukey_shape must be in [0, 1]");
}

TimeFrequencyMask wiener_mask(const RpcaResult& rpca) {
  require(rpca.low_rank.rows() == rpca.sparse.rows() && rpca.low_rank.cols() == rpca.sparse.cols(),
          "RPCA parts differ in shape");
  const auto s = rpca.sparse.array().abs();
  const auto l = rpca.low_rank.array().abs();
  TimeFrequencyMask out;
  out.kind = MaskKind::soft;
  out.values = (s + l > 0.0).select(s / (s + l), 0.0);
  return out;
}

TimeFrequencyMask binary_mask(const RpcaResult& rpca, double gamma) {
  require(gamma > 0, "binary mask gain must be positive");
  require(rpca.low_rank.rows() == rpca.sparse.rows() && rpca.low_rank.cols() == rpca.sparse.cols(),
          "RPCA parts differ in shape");
  TimeFrequencyMask out;
  out.kind = MaskKind::binary;
  out.values = (rpca.sparse.array().abs() > gamma * rpca.low_rank.array().abs()).cast<double>();
  return out;
}

std::vector<double> tukey_window(int length, double shape) {
  std::vector<double> w(static_cast<std::size_t>(std::max(length, 0)), 1.0);
  if (length <= 1 || shape <= 0) return w;
  const double span = static_cast<double>(length - 1);
  const double taper = shape * span / 2.0;
  for (int n = 0; n < length; ++n) {
    const double x = std::min<double>(n, span - n);
    if (x < taper) w[static_cast<std::size_t>(n)] = 0.5 * (1.0 - std::cos(std::numbers::pi * x / taper));
  }
  return w;
}

TimeFrequencyMask harmonic_mask(const F0Contour& f0, const MagnitudeSpectrogram& geometry,
                                const HarmonicMaskConfig& cfg) {
  validate(cfg);
  require(static_cast<Eigen::Index>(f0.frames()) == geometry.frames(),
          "F0 contour frame count does not match the spectrogram");
  require(f0.voiced.size() == f0.f0_hz.size(), "F0 contour voicing flags are inconsistent");

  const double nyquist = geometry.nyquist_hz();
  const double spacing = geometry.bin_spacing_hz();
  const Eigen::Index last_bin = geometry.bins() - 1;

  TimeFrequencyMask out;
  out.kind = MaskKind::soft;
  out.values = Matrix::Zero(geometry.frames(), geometry.bins());

  for (Eigen::Index t = 0; t < geometry.frames(); ++t) {
    const auto i = static_cast<std::size_t>(t);
    if (!f0.voiced[i]) continue;
    const double hz = f0.f0_hz[i];
    require(hz > 0 && hz < nyquist, "voiced F0 outside (0, Nyquist)");
    for (int n = 1; n <= cfg.n_partials; ++n) {
      const double partial = n * hz;
      if (partial > nyquist) break;
      const auto lower = std::max<Eigen::Index>(
          0, static_cast<Eigen::Index>(std::ceil((partial - cfg.w / 2.0) / spacing)));
      const auto upper = std::min<Eigen::Index>(
          last_bin, static_cast<Eigen::Index>(std::floor((partial + cfg.w / 2.0) / spacing)));
      if (upper < lower) continue;
      const auto width = static_cast<int>(upper - lower + 1);
      // Interior samples of a (width + 2)-point taper, so every covered bin is nonzero.
      const auto taper = tukey_window(width + 2, cfg.tukey_shape);
      for (int k = 0; k < width; ++k) {
        double& cell = out.values(t, lower + k);
        cell = std::max(cell, taper[static_cast<std::size_t>(k + 1)]);
      }
    }
  }
  return out;
}

TimeFrequencyMask integrate_soft(const TimeFrequencyMask& rpca_soft, const TimeFrequencyMask& harmonic) {
  require(rpca_soft.frames() == harmonic.frames() && rpca_soft.bins() == harmonic.bins(),
          "masks differ in shape");
  TimeFrequencyMask out;
  out.kind = MaskKind::soft;
  out.values = rpca_soft.values.cwiseProduct(harmonic.values);
  return out;
}

TimeFrequencyMask integrate_binary(const TimeFrequencyMask& integrated_soft) {
  TimeFrequencyMask out;
  out.kind = MaskKind::binary;
  out.values = (integrated_soft.values.array() > 0.5).cast<double>();
  return out;
}

MagnitudeSpectrogram apply_mask(const MagnitudeSpectrogram& mag, const TimeFrequencyMask& mask) {
  require(mag.frames() == mask.frames() && mag.bins() == mask.bins(), "mask and spectrogram differ in shape");
  MagnitudeSpectrogram out = mag;
  out.values = mask.values.cwiseProduct(mag.values);
  return out;
}

SeparationResult separate(const ComplexSpectrogram& x, const TimeFrequencyMask& mask) {
  require(x.frames() == mask.frames() && x.bins() == mask.bins(), "mask and spectrogram differ in shape");
  const MagnitudeSpectrogram mixture = magnitude(x);

  SeparationResult out;
  out.vocal_spec = apply_mask(mixture, mask);
  out.accomp_spec = mixture;
  out.accomp_spec.values = mixture.values - out.vocal_spec.values;
  // Re-deriving the vocal part from the accompaniment makes vocal + accomp == |X| exactly:
  // one of the two subtractions is always exact (Sterbenz), so no rounding survives the sum.
  out.vocal_spec.values = mixture.values - out.accomp_spec.values;

  ComplexSpectrogram vocal = x;
  ComplexSpectrogram accomp = x;
  for (Eigen::Index t = 0; t < x.frames(); ++t) {
    for (Eigen::Index f = 0; f < x.bins(); ++f) {
      const double m = mixture.values(t, f);
      const std::complex<double> phase = m > 0 ? x.values(t, f) / m : std::complex<double>(0.0, 0.0);
      vocal.values(t, f) = out.vocal_spec.values(t, f) * phase;
      accomp.values(t, f) = out.accomp_spec.values(t, f) * phase;
    }
  }
  out.vocal = istft(vocal);
  out.accompaniment = istft(accomp);
  return out;
}

}  // namespace vocalsep
