#pragma once

#include "vocalsep/common.hpp"

#include <cstddef>
#include <vector>

namespace vocalsep {

/// Mono audio. Samples are nominally in [-1, 1].
struct AudioSignal {
  std::vector<double> samples;
  int sample_rate = 0;

  std::size_t size() const { return samples.size(); }
  double duration_seconds() const {
    return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate : 0.0;
  }
};

/// Throws InvalidInput unless the signal is nonempty, finite and has a positive rate.
void validate(const AudioSignal& signal);

struct ComplexSpectrogram {
  ComplexMatrix values;  // frames x (window_size / 2 + 1)
  int window_size = 0;
  int hop_size = 0;
  int sample_rate = 0;
  std::size_t signal_length = 0;  // samples of the analysed signal, used by istft

  Eigen::Index frames() const { return values.rows(); }
  Eigen::Index bins() const { return values.cols(); }
};

struct MagnitudeSpectrogram {
  Matrix values;  // frames x bins, nonnegative
  int window_size = 0;
  int hop_size = 0;
  int sample_rate = 0;

  Eigen::Index frames() const { return values.rows(); }
  Eigen::Index bins() const { return values.cols(); }
  double bin_spacing_hz() const { return static_cast<double>(sample_rate) / window_size; }
  double bin_hz(Eigen::Index f) const { return static_cast<double>(f) * bin_spacing_hz(); }
  double nyquist_hz() const { return 0.5 * sample_rate; }
  double hop_seconds() const { return static_cast<double>(hop_size) / sample_rate; }
  std::vector<double> bin_frequencies() const;
};

/// Log-spaced frequency axis. Bin index c (0-based here) is centred at
/// h_low * 2^(c * cents_per_bin / 1200).
struct LogFrequencyGrid {
  double h_low = 30.0;
  double cents_per_bin = 10.0;
  int bins = 0;

  double center_hz(Eigen::Index c) const;
  /// Cents above h_low of bin c.
  double center_cents(Eigen::Index c) const { return static_cast<double>(c) * cents_per_bin; }

  /// 1-based bin number of a frequency: floor(1200 log2(h / h_low) / p + 1).
  /// Frequencies below h_low are rejected.
  int bin_number(double hz) const;

  /// Grid starting at h_low whose last centre is the highest one not above `nyquist_hz`.
  static LogFrequencyGrid reaching(double nyquist_hz, double h_low = 30.0,
                                   double cents_per_bin = 10.0);
};

void validate(const LogFrequencyGrid& grid);

struct LogSpectrogram {
  Matrix values;  // frames x grid.bins, in dB
  LogFrequencyGrid grid;
  double hop_seconds = 0.0;

  Eigen::Index frames() const { return values.rows(); }
  Eigen::Index bins() const { return values.cols(); }
};

inline constexpr double kDbFloorAmplitude = 1e-10;

/// Periodic Hann window of the given length.
std::vector<double> hann_window(int length);

/// Centered STFT with reflect padding and a Hann window.
/// Frame count is ceil(len / hop) + 1, so the last frame centre reaches the end of the signal.
ComplexSpectrogram stft(const AudioSignal& signal, int window_size, int hop_size);

/// Weighted overlap-add inverse of stft(). Output has spec.signal_length samples.
AudioSignal istft(const ComplexSpectrogram& spec);

MagnitudeSpectrogram magnitude(const ComplexSpectrogram& spec);

/// A-weighting gain R_A(h) (rough inverse of the 40-phon equal-loudness contour).
double a_weight_at(double hz);

MagnitudeSpectrogram apply_a_weighting(const MagnitudeSpectrogram& mag);

/// Converts each frame to dB and resamples it on `grid` with a natural cubic spline
/// over linear frequency.
LogSpectrogram to_log_frequency(const MagnitudeSpectrogram& mag, const LogFrequencyGrid& grid);

/// Natural cubic spline through (x[i], y[i]) with strictly increasing x.
class NaturalCubicSpline {
 public:
  NaturalCubicSpline(std::vector<double> x, std::vector<double> y);
  double operator()(double at) const;

 private:
  std::vector<double> x_;
  std::vector<double> y_;
  std::vector<double> second_;  // second derivatives at the knots
};

}  // namespace vocalsep
