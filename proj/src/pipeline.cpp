#include "vocalsep/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <iostream>
#include <set>

namespace vocalsep {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

int nearest_power_of_two(double n) {
  int p = 64;
  while (p * 2 <= n * std::sqrt(2.0)) p *= 2;
  return p;
}

void log_stage(bool verbose, const std::string& stage, double seconds) {
  if (verbose) std::cerr << "[vocalsep] " << stage << ": " << seconds << " s\n";
}

}  // namespace

PipelineConfig PipelineConfig::defaults_for(int sample_rate) {
  require(sample_rate > 0, "sample_rate must be positive");
  PipelineConfig cfg;
  const bool high_rate = sample_rate > 22050;
  const double window_seconds = high_rate ? 4096.0 / 44100.0 : 2048.0 / 16000.0;
  cfg.window_size = nearest_power_of_two(window_seconds * sample_rate);
  cfg.hop_size = static_cast<int>(std::lround(sample_rate / 100.0));
  cfg.n_partials = high_rate ? 20 : 10;
  cfg.w = high_rate ? 70.0 : 50.0;
  return cfg;
}

void validate(const PipelineConfig& cfg, int sample_rate) {
  require(cfg.window_size >= 64 && (cfg.window_size & (cfg.window_size - 1)) == 0,
          "window_size must be a power of two >= 64");
  require(cfg.hop_size > 0 && cfg.hop_size <= cfg.window_size, "hop_size must be in (0, window_size]");
  require(cfg.lambda_sep > 0 && cfg.lambda_f0 > 0, "lambdas must be positive");
  require(cfg.gamma > 0, "gamma must be positive");
  require(cfg.n_partials >= 1, "n_partials must be >= 1");
  require(cfg.w > 0, "w must be positive");
  require(cfg.alpha >= 0, "alpha must be nonnegative");
  require(cfg.f0_min > 0 && cfg.f0_min < cfg.f0_max, "need 0 < f0_min < f0_max");
  require(cfg.f0_max <= 0.5 * sample_rate, "f0_max exceeds Nyquist");
  require(cfg.grid.h_low > 0 && cfg.grid.cents_per_bin > 0 && cfg.grid.bins >= 0, "invalid grid parameters");
  require(cfg.laplace_b > 0, "laplace_b must be positive");
}

namespace {

const char* mask_mode_name(MaskKind kind) { return kind == MaskKind::binary ? "binary" : "soft"; }

MaskKind parse_mask_mode(const std::string& s) {
  if (s == "soft") return MaskKind::soft;
  if (s == "binary") return MaskKind::binary;
  throw InvalidInput("mask_mode must be 'soft' or 'binary', got '" + s + "'");
}

template <typename T>
void read_field(const nlohmann::json& j, const char* key, T& field) {
  if (j.contains(key)) field = j.at(key).get<T>();
}

}  // namespace

PipelineConfig config_from_json(const nlohmann::json& j, PipelineConfig base) {
  require(j.is_object(), "pipeline config must be a JSON object");
  static const std::set<std::string> known = {
      "window_size", "hop_size", "lambda_sep", "lambda_f0", "gamma", "n_partials", "w", "alpha",
      "f0_min", "f0_max", "grid", "mask_mode", "tukey_shape", "shs_decay", "laplace_b",
      "rpca_tolerance", "rpca_max_iterations", "force_two_pass"};
  for (const auto& [key, value] : j.items())
    require(known.count(key) > 0, "unknown pipeline config field '" + key + "'");

  try {
    read_field(j, "window_size", base.window_size);
    read_field(j, "hop_size", base.hop_size);
    read_field(j, "lambda_sep", base.lambda_sep);
    read_field(j, "lambda_f0", base.lambda_f0);
    read_field(j, "gamma", base.gamma);
    read_field(j, "n_partials", base.n_partials);
    read_field(j, "w", base.w);
    read_field(j, "alpha", base.alpha);
    read_field(j, "f0_min", base.f0_min);
    read_field(j, "f0_max", base.f0_max);
    read_field(j, "tukey_shape", base.tukey_shape);
    read_field(j, "shs_decay", base.shs_decay);
    read_field(j, "laplace_b", base.laplace_b);
    read_field(j, "rpca_tolerance", base.rpca_tolerance);
    read_field(j, "rpca_max_iterations", base.rpca_max_iterations);
    read_field(j, "force_two_pass", base.force_two_pass);
    if (j.contains("mask_mode")) base.mask_mode = parse_mask_mode(j.at("mask_mode").get<std::string>());
    if (j.contains("grid")) {
      const auto& g = j.at("grid");
      require(g.is_object(), "grid must be a JSON object");
      read_field(g, "h_low", base.grid.h_low);
      read_field(g, "cents_per_bin", base.grid.cents_per_bin);
      read_field(g, "bins", base.grid.bins);
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("malformed pipeline config: ") + e.what());
  }
  return base;
}

nlohmann::json config_to_json(const PipelineConfig& cfg) {
  return {
      {"window_size", cfg.window_size},
      {"hop_size", cfg.hop_size},
      {"lambda_sep", cfg.lambda_sep},
      {"lambda_f0", cfg.lambda_f0},
      {"gamma", cfg.gamma},
      {"n_partials", cfg.n_partials},
      {"w", cfg.w},
      {"alpha", cfg.alpha},
      {"f0_min", cfg.f0_min},
      {"f0_max", cfg.f0_max},
      {"grid", {{"h_low", cfg.grid.h_low}, {"cents_per_bin", cfg.grid.cents_per_bin}, {"bins", cfg.grid.bins}}},
      {"mask_mode", mask_mode_name(cfg.mask_mode)},
      {"tukey_shape", cfg.tukey_shape},
      {"shs_decay", cfg.shs_decay},
      {"laplace_b", cfg.laplace_b},
      {"rpca_tolerance", cfg.rpca_tolerance},
      {"rpca_max_iterations", cfg.rpca_max_iterations},
      {"force_two_pass", cfg.force_two_pass},
  };
}

LogFrequencyGrid resolve_grid(const PipelineConfig& cfg, double nyquist_hz) {
  if (cfg.grid.bins > 0) {
    LogFrequencyGrid grid = cfg.grid;
    validate(grid);
    return grid;
  }
  return LogFrequencyGrid::reaching(nyquist_hz, cfg.grid.h_low, cfg.grid.cents_per_bin);
}

std::shared_ptr<const RpcaResult> RpcaCache::find(double lambda) const {
  const auto it = entries_.find(lambda);
  return it == entries_.end() ? nullptr : it->second;
}

void RpcaCache::store(double lambda, std::shared_ptr<const RpcaResult> result) {
  entries_[lambda] = std::move(result);
}

F0Contour resample_contour(const F0Contour& contour, std::size_t frames, double hop_seconds) {
  require(contour.frames() >= 1, "contour is empty");
  require(contour.hop_seconds > 0 && hop_seconds > 0, "contour hop must be positive");
  std::vector<double> hz(frames, 0.0);
  // Ratio first, so hops that are exact multiples of each other land exactly on ties.
  const double step = hop_seconds / contour.hop_seconds;
  const double offset = contour.start_seconds / contour.hop_seconds;
  for (std::size_t t = 0; t < frames; ++t) {
    const double idx = std::round(static_cast<double>(t) * step - offset);
    if (idx < 0 || idx >= static_cast<double>(contour.frames())) continue;
    const auto i = static_cast<std::size_t>(idx);
    if (contour.voiced[i]) hz[t] = contour.f0_hz[i];
  }
  return F0Contour::from_hz(std::move(hz), hop_seconds);
}

namespace {

class Stages {
 public:
  Stages(const AudioSignal& signal, const PipelineConfig& cfg, const RunOptions& options)
      : cfg_(cfg), options_(options) {
    validate(signal);
    validate(cfg, signal.sample_rate);
    spec_ = stft(signal, cfg.window_size, cfg.hop_size);
    mag_ = magnitude(spec_);
    grid_ = resolve_grid(cfg, mag_.nyquist_hz());
  }

  std::shared_ptr<const RpcaResult> rpca(double lambda, bool use_cache, PipelineStats& stats) {
    if (use_cache && options_.cache)
      if (auto hit = options_.cache->find(lambda)) return hit;
    RpcaConfig rc;
    rc.lambda = lambda;
    rc.tolerance = cfg_.rpca_tolerance;
    rc.max_iterations = cfg_.rpca_max_iterations;
    rc.record_trace = options_.record_rpca_trace;
    const auto start = Clock::now();
    auto result = std::make_shared<const RpcaResult>(decompose(mag_.values, rc));
    const double elapsed = seconds_since(start);
    stats.seconds_rpca += elapsed;
    ++stats.rpca_calls;
    log_stage(options_.verbose, "rpca lambda=" + std::to_string(lambda) + " iterations=" +
                                    std::to_string(result->iterations), elapsed);
    if (!result->converged) {
      stats.rpca_converged = false;
      std::cerr << "[vocalsep] warning: RPCA (lambda=" << lambda << ") did not converge in "
                << result->iterations << " iterations, residual " << result->final_residual << "\n";
    }
    if (use_cache && options_.cache) options_.cache->store(lambda, result);
    return result;
  }

  void estimate_contour(PipelineOutput& out) {
    const auto start = Clock::now();
    out.rpca_binary = binary_mask(*out.rpca_f0, cfg_.gamma);
    const auto vocal = apply_a_weighting(apply_mask(mag_, out.rpca_binary));
    const auto logspec = to_log_frequency(vocal, grid_);
    const auto harmonic_sum = shs(logspec, {cfg_.n_partials, cfg_.shs_decay});
    EnhancementDiagnostics diag;
    const auto enhancement = f0_enhancement(out.rpca_binary, grid_, mag_.nyquist_hz(), mag_.hop_seconds(), &diag);
    if (diag.clamped_bins > 0 && options_.verbose)
      std::cerr << "[vocalsep] F0 enhancement clamped " << diag.clamped_bins << " grid bins\n";
    out.saliency = combine(harmonic_sum, enhancement, cfg_.alpha);

    const TrackerConfig tracker{cfg_.f0_min, cfg_.f0_max, cfg_.laplace_b, 1e-12};
    out.contour = viterbi(out.saliency, tracker);
    // Every frame is voiced except digitally silent ones, which carry no pitch at all.
    for (Eigen::Index t = 0; t < mag_.frames(); ++t) {
      if (mag_.values.row(t).maxCoeff() > 0.0) continue;
      const auto i = static_cast<std::size_t>(t);
      out.contour.voiced[i] = false;
      out.contour.f0_hz[i] = 0.0;
      out.contour.f0_cents[i] = 0.0;
    }
    log_stage(options_.verbose, "f0 estimation", seconds_since(start));
  }

  const ComplexSpectrogram& spec() const { return spec_; }
  const MagnitudeSpectrogram& mag() const { return mag_; }

 private:
  const PipelineConfig& cfg_;
  const RunOptions& options_;
  ComplexSpectrogram spec_;
  MagnitudeSpectrogram mag_;
  LogFrequencyGrid grid_;
};

}  // namespace

PipelineOutput run(const AudioSignal& signal, const PipelineConfig& cfg, const RunOptions& options) {
  const auto start = Clock::now();
  Stages stages(signal, cfg, options);
  PipelineOutput out;

  const bool shared_rpca = cfg.lambda_sep == cfg.lambda_f0 && !cfg.force_two_pass;
  if (options.ground_truth_f0) {
    out.contour = resample_contour(*options.ground_truth_f0, static_cast<std::size_t>(stages.mag().frames()),
                                   stages.mag().hop_seconds());
  } else {
    out.rpca_f0 = stages.rpca(cfg.lambda_f0, true, out.stats);
    stages.estimate_contour(out);
  }

  if (shared_rpca && out.rpca_f0) {
    out.rpca_sep = out.rpca_f0;
  } else {
    out.rpca_sep = stages.rpca(cfg.lambda_sep, !cfg.force_two_pass, out.stats);
  }

  const auto stage_start = Clock::now();
  out.harmonic = harmonic_mask(out.contour, stages.mag(), {cfg.w, cfg.n_partials, cfg.tukey_shape});
  out.final_mask = integrate_soft(wiener_mask(*out.rpca_sep), out.harmonic);
  if (cfg.mask_mode == MaskKind::binary) out.final_mask = integrate_binary(out.final_mask);
  out.separation = separate(stages.spec(), out.final_mask);
  log_stage(options.verbose, "masking and resynthesis", seconds_since(stage_start));

  out.stats.seconds_total = seconds_since(start);
  log_stage(options.verbose, "total", out.stats.seconds_total);
  return out;
}

F0Contour estimate_f0(const AudioSignal& signal, const PipelineConfig& cfg, const RunOptions& options) {
  Stages stages(signal, cfg, options);
  PipelineOutput out;
  out.rpca_f0 = stages.rpca(cfg.lambda_f0, true, out.stats);
  stages.estimate_contour(out);
  return out.contour;
}

}  // namespace vocalsep
