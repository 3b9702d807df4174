#include "vocalsep/spectrogram.hpp"

#include "fft.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace vocalsep {

namespace {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

void validate_geometry(int window_size, int hop_size) {
  require(is_power_of_two(window_size) && window_size >= 64,
          "window_size must be a power of two >= 64, got " + std::to_string(window_size));
  require(hop_size > 0 && hop_size <= window_size,
          "hop_size must be in (0, window_size], got " + std::to_string(hop_size));
}

std::size_t frame_count(std::size_t length, int hop_size) {
  const auto hop = static_cast<std::size_t>(hop_size);
  return (length + hop - 1) / hop + 1;
}

// Mirror index i into [0, n) without repeating the edge sample.
std::size_t reflect_index(std::ptrdiff_t i, std::size_t n) {
  if (n == 1) return 0;
  const auto period = static_cast<std::ptrdiff_t>(2 * (n - 1));
  i %= period;
  if (i < 0) i += period;
  if (i >= static_cast<std::ptrdiff_t>(n)) i = period - i;
  return static_cast<std::size_t>(i);
}

}  // namespace

void validate(const AudioSignal& signal) {
  require(signal.sample_rate > 0, "sample_rate must be positive");
  require(!signal.samples.empty(), "audio signal is empty");
  for (double v : signal.samples) require(std::isfinite(v), "audio signal has non-finite samples");
}

std::vector<double> MagnitudeSpectrogram::bin_frequencies() const {
  std::vector<double> hz(static_cast<std::size_t>(bins()));
  for (Eigen::Index f = 0; f < bins(); ++f) hz[static_cast<std::size_t>(f)] = bin_hz(f);
  return hz;
}

double LogFrequencyGrid::center_hz(Eigen::Index c) const {
  return h_low * std::exp2(static_cast<double>(c) * cents_per_bin / 1200.0);
}

int LogFrequencyGrid::bin_number(double hz) const {
  require(hz >= h_low, "frequency below the grid's lowest frequency");
  return static_cast<int>(std::floor(1200.0 * std::log2(hz / h_low) / cents_per_bin + 1.0));
}

LogFrequencyGrid LogFrequencyGrid::reaching(double nyquist_hz, double h_low, double cents_per_bin) {
  require(h_low > 0 && cents_per_bin > 0, "grid requires h_low > 0 and cents_per_bin > 0");
  require(nyquist_hz > h_low, "grid lowest frequency must be below Nyquist");
  LogFrequencyGrid grid{h_low, cents_per_bin, 0};
  grid.bins = static_cast<int>(std::floor(1200.0 * std::log2(nyquist_hz / h_low) / cents_per_bin)) + 1;
  // Guard against rounding pushing the last centre past Nyquist.
  while (grid.bins > 1 && grid.center_hz(grid.bins - 1) > nyquist_hz) --grid.bins;
  return grid;
}

void validate(const LogFrequencyGrid& grid) {
  require(grid.h_low > 0, "grid h_low must be positive");
  require(grid.cents_per_bin > 0, "grid cents_per_bin must be positive");
  require(grid.bins >= 2, "grid must have at least two bins");
}

std::vector<double> hann_window(int length) {
  std::vector<double> w(static_cast<std::size_t>(length));
  for (int n = 0; n < length; ++n)
    w[static_cast<std::size_t>(n)] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * n / length);
  return w;
}

ComplexSpectrogram stft(const AudioSignal& signal, int window_size, int hop_size) {
  validate(signal);
  validate_geometry(window_size, hop_size);

  const std::size_t length = signal.size();
  const std::size_t frames = frame_count(length, hop_size);
  const auto window = hann_window(window_size);
  const std::ptrdiff_t pad = window_size / 2;

  ComplexSpectrogram out;
  out.window_size = window_size;
  out.hop_size = hop_size;
  out.sample_rate = signal.sample_rate;
  out.signal_length = length;
  out.values.resize(static_cast<Eigen::Index>(frames), window_size / 2 + 1);

  detail::RealFft fft(static_cast<std::size_t>(window_size));
  std::vector<double> frame(static_cast<std::size_t>(window_size));
  std::vector<std::complex<double>> bins(fft.bins());
  for (std::size_t t = 0; t < frames; ++t) {
    const auto start = static_cast<std::ptrdiff_t>(t) * hop_size - pad;
    for (int j = 0; j < window_size; ++j) {
      const auto src = reflect_index(start + j, length);
      frame[static_cast<std::size_t>(j)] = signal.samples[src] * window[static_cast<std::size_t>(j)];
    }
    fft.forward(frame, bins);
    for (std::size_t k = 0; k < bins.size(); ++k)
      out.values(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(k)) = bins[k];
  }
  return out;
}

AudioSignal istft(const ComplexSpectrogram& spec) {
  validate_geometry(spec.window_size, spec.hop_size);
  require(spec.sample_rate > 0, "spectrogram sample_rate must be positive");
  require(spec.signal_length >= 1, "spectrogram signal_length must be >= 1");
  require(spec.bins() == spec.window_size / 2 + 1, "spectrogram bin count does not match window_size");
  require(static_cast<std::size_t>(spec.frames()) == frame_count(spec.signal_length, spec.hop_size),
          "spectrogram frame count does not match signal_length and hop_size");
  require(spec.values.allFinite(), "spectrogram has non-finite values");

  const auto window = hann_window(spec.window_size);
  const std::size_t n = static_cast<std::size_t>(spec.window_size);
  const std::size_t pad = n / 2;
  const std::size_t padded = static_cast<std::size_t>(spec.frames() - 1) * spec.hop_size + n;

  std::vector<double> acc(padded, 0.0);
  std::vector<double> weight(padded, 0.0);
  detail::RealFft fft(n);
  std::vector<std::complex<double>> bins(fft.bins());
  std::vector<double> frame(n);
  for (Eigen::Index t = 0; t < spec.frames(); ++t) {
    for (std::size_t k = 0; k < bins.size(); ++k) bins[k] = spec.values(t, static_cast<Eigen::Index>(k));
    fft.inverse(bins, frame);
    const std::size_t offset = static_cast<std::size_t>(t) * spec.hop_size;
    for (std::size_t j = 0; j < n; ++j) {
      acc[offset + j] += frame[j] / static_cast<double>(n) * window[j];
      weight[offset + j] += window[j] * window[j];
    }
  }

  AudioSignal out;
  out.sample_rate = spec.sample_rate;
  out.samples.resize(spec.signal_length);
  for (std::size_t i = 0; i < spec.signal_length; ++i) {
    const double w = weight[i + pad];
    require(w > 1e-8, "window/hop combination does not satisfy the overlap-add condition");
    out.samples[i] = acc[i + pad] / w;
  }
  return out;
}

MagnitudeSpectrogram magnitude(const ComplexSpectrogram& spec) {
  MagnitudeSpectrogram out;
  out.values = spec.values.cwiseAbs();
  out.window_size = spec.window_size;
  out.hop_size = spec.hop_size;
  out.sample_rate = spec.sample_rate;
  return out;
}

double a_weight_at(double hz) {
  const double h2 = hz * hz;
  const double num = 12200.0 * 12200.0 * h2 * h2;
  const double den = (h2 + 20.6 * 20.6) * (h2 + 12200.0 * 12200.0) *
                     std::sqrt((h2 + 107.7 * 107.7) * (h2 + 737.9 * 737.9));
  return num / den;
}

MagnitudeSpectrogram apply_a_weighting(const MagnitudeSpectrogram& mag) {
  MagnitudeSpectrogram out = mag;
  for (Eigen::Index f = 0; f < mag.bins(); ++f) out.values.col(f) *= a_weight_at(mag.bin_hz(f));
  return out;
}

NaturalCubicSpline::NaturalCubicSpline(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)), second_(x_.size(), 0.0) {
  require(x_.size() == y_.size(), "spline knots and values differ in length");
  require(x_.size() >= 2, "spline needs at least two knots");
  const std::size_t n = x_.size();
  for (std::size_t i = 1; i < n; ++i) require(x_[i] > x_[i - 1], "spline knots must be strictly increasing");
  if (n == 2) return;

  // Thomas algorithm on the interior second derivatives; natural ends are zero.
  std::vector<double> diag(n, 0.0), rhs(n, 0.0), upper(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double h0 = x_[i] - x_[i - 1];
    const double h1 = x_[i + 1] - x_[i];
    const double lower = h0 / 6.0;
    diag[i] = (h0 + h1) / 3.0;
    upper[i] = h1 / 6.0;
    rhs[i] = (y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0;
    if (i > 1) {
      const double m = lower / diag[i - 1];
      diag[i] -= m * upper[i - 1];
      rhs[i] -= m * rhs[i - 1];
    }
  }
  for (std::size_t i = n - 2; i >= 1; --i) {
    second_[i] = (rhs[i] - upper[i] * second_[i + 1]) / diag[i];
    if (i == 1) break;
  }
}

double NaturalCubicSpline::operator()(double at) const {
  auto it = std::upper_bound(x_.begin(), x_.end(), at);
  std::size_t hi = static_cast<std::size_t>(std::distance(x_.begin(), it));
  hi = std::clamp<std::size_t>(hi, 1, x_.size() - 1);
  const std::size_t lo = hi - 1;
  const double h = x_[hi] - x_[lo];
  const double a = (x_[hi] - at) / h;
  const double b = (at - x_[lo]) / h;
  return a * y_[lo] + b * y_[hi] +
         ((a * a * a - a) * second_[lo] + (b * b * b - b) * second_[hi]) * h * h / 6.0;
}

LogSpectrogram to_log_frequency(const MagnitudeSpectrogram& mag, const LogFrequencyGrid& grid) {
  validate(grid);
  require(mag.bins() >= 2, "magnitude spectrogram needs at least two bins");
  require(grid.center_hz(grid.bins - 1) <= mag.nyquist_hz() * (1.0 + 1e-12),
          "log-frequency grid extends beyond Nyquist");

  LogSpectrogram out;
  out.grid = grid;
  out.hop_seconds = mag.hop_seconds();
  out.values.resize(mag.frames(), grid.bins);

  const auto knots = mag.bin_frequencies();
  std::vector<double> centers(static_cast<std::size_t>(grid.bins));
  for (int c = 0; c < grid.bins; ++c) centers[static_cast<std::size_t>(c)] = grid.center_hz(c);

  std::vector<double> db(knots.size());
  for (Eigen::Index t = 0; t < mag.frames(); ++t) {
    for (Eigen::Index f = 0; f < mag.bins(); ++f)
      db[static_cast<std::size_t>(f)] = 20.0 * std::log10(std::max(mag.values(t, f), kDbFloorAmplitude));
    NaturalCubicSpline spline(knots, db);
    for (int c = 0; c < grid.bins; ++c) out.values(t, c) = spline(centers[static_cast<std::size_t>(c)]);
  }
  return out;
}

}  // namespace vocalsep
