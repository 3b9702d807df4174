#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace vocalsep::detail {

/// Real-input DFT of a fixed length backed by FFTW. Not copyable; one instance
/// per thread. Plan creation is serialised internally.
class RealFft {
 public:
  explicit RealFft(std::size_t length);
  ~RealFft();
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  std::size_t length() const { return length_; }
  std::size_t bins() const { return length_ / 2 + 1; }

  /// Unnormalised forward transform; `out` receives length/2 + 1 bins.
  void forward(std::span<const double> in, std::span<std::complex<double>> out);
  /// Unnormalised inverse (result is scaled by length relative to the true inverse).
  void inverse(std::span<const std::complex<double>> in, std::span<double> out);

 private:
  std::size_t length_;
  double* real_ = nullptr;
  void* complex_ = nullptr;
  void* forward_plan_ = nullptr;
  void* inverse_plan_ = nullptr;
};

}  // namespace vocalsep::detail
