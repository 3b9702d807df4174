#pragma once

#include "vocalsep/masks.hpp"
#include "vocalsep/rpca.hpp"
#include "vocalsep/saliency.hpp"
#include "vocalsep/spectrogram.hpp"
#include "vocalsep/tracking.hpp"

#include "json.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <optional>
#include <string>

namespace vocalsep {

/// Pipeline parameters. JSON config files use exactly these field names.
struct PipelineConfig {
  int window_size = 2048;
  int hop_size = 160;
  double lambda_sep = 0.8;
  double lambda_f0 = 0.8;
  double gamma = 1.0;
  int n_partials = 10;
  double w = 50.0;
  double alpha = 0.6;
  double f0_min = 80.0;
  double f0_max = 720.0;
  LogFrequencyGrid grid{30.0, 10.0, 0};  // bins = 0: extend to Nyquist
  MaskKind mask_mode = MaskKind::soft;

  double tukey_shape = 0.5;
  double shs_decay = 0.86;
  double laplace_b = std::sqrt(150.0 * 150.0 / 2.0);
  double rpca_tolerance = 1e-7;
  int rpca_max_iterations = 1000;
  bool force_two_pass = false;  // run both RPCAs even when the lambdas agree

  /// Parameter set for a sample rate: the 16 kHz set up to 22.05 kHz, the 44.1 kHz set above.
  static PipelineConfig defaults_for(int sample_rate);
};

void validate(const PipelineConfig& cfg, int sample_rate);

/// Reads fields present in `j` over `base`; unknown keys are rejected.
PipelineConfig config_from_json(const nlohmann::json& j, PipelineConfig base);
nlohmann::json config_to_json(const PipelineConfig& cfg);

/// Log-frequency grid the config resolves to for a given Nyquist frequency.
LogFrequencyGrid resolve_grid(const PipelineConfig& cfg, double nyquist_hz);

/// Memoises RPCA decompositions of one magnitude spectrogram by lambda. Use one cache
/// per input signal and STFT geometry.
class RpcaCache {
 public:
  std::shared_ptr<const RpcaResult> find(double lambda) const;
  void store(double lambda, std::shared_ptr<const RpcaResult> result);

 private:
  std::map<double, std::shared_ptr<const RpcaResult>> entries_;
};

struct PipelineStats {
  int rpca_calls = 0;          // decompositions actually computed
  bool rpca_converged = true;  // false if any decomposition hit max_iterations
  double seconds_rpca = 0.0;
  double seconds_total = 0.0;
};

struct PipelineOutput {
  SeparationResult separation;
  F0Contour contour;  // on the STFT frame clock
  TimeFrequencyMask final_mask;
  TimeFrequencyMask rpca_binary;
  TimeFrequencyMask harmonic;
  SaliencySpectrogram saliency;
  std::shared_ptr<const RpcaResult> rpca_f0;
  std::shared_ptr<const RpcaResult> rpca_sep;
  PipelineStats stats;
};

struct RunOptions {
  /// When set, the harmonic mask is built from this contour and F0 estimation is skipped.
  std::optional<F0Contour> ground_truth_f0;
  RpcaCache* cache = nullptr;
  bool record_rpca_trace = false;
  bool verbose = false;  // stage timings to stderr
};

/// Joint separation and F0 estimation:
/// STFT, RPCA (lambda_f0), binary mask, A-weighted log spectrogram, SHS and F0
/// enhancement saliency, Viterbi, harmonic mask, RPCA (lambda_sep), Wiener mask,
/// mask integration, resynthesis. RPCA runs once when both lambdas agree.
PipelineOutput run(const AudioSignal& signal, const PipelineConfig& cfg, const RunOptions& options = {});

/// Estimates the vocal F0 contour only.
F0Contour estimate_f0(const AudioSignal& signal, const PipelineConfig& cfg, const RunOptions& options = {});

/// Nearest-frame resampling of a contour onto `frames` frames spaced `hop_seconds` apart.
F0Contour resample_contour(const F0Contour& contour, std::size_t frames, double hop_seconds);

}  // namespace vocalsep
