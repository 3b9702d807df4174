// vocalsep: singing voice separation and vocal F0 estimation from the command line.
//
//   vocalsep separate mix.wav --vocal v.wav --accomp a.wav [--f0 contour.csv]
//   vocalsep estimate-f0 mix.wav --out contour.csv
//   vocalsep evaluate --corpus manifest.json --out report.json [--snr -5,0,5]
//   vocalsep grid-search --corpus manifest.json --axes axes.json --objective gnsdr --out grid.csv
//
// Exit codes: 0 success, 2 invalid input, 3 partial corpus failure.

#include "vocalsep/corpus.hpp"
#include "vocalsep/grid_search.hpp"
#include "vocalsep/io.hpp"
#include "vocalsep/pipeline.hpp"
#include "vocalsep/wav.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalidInput = 2;
constexpr int kExitPartialFailure = 3;

namespace fs = std::filesystem;
using namespace vocalsep;

struct ConfigFlags {
  std::string config_path;
  std::optional<double> lambda_sep;
  std::optional<double> lambda_f0;
  std::optional<double> w;
  std::optional<double> alpha;
  std::optional<int> n_partials;
  std::optional<std::string> mask;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "Pipeline config JSON (PipelineConfig field names)")
        ->check(CLI::ExistingFile);
    cmd->add_option("--lambda-sep", lambda_sep, "RPCA sparsity factor for separation");
    cmd->add_option("--lambda-f0", lambda_f0, "RPCA sparsity factor for F0 estimation");
    cmd->add_option("--w", w, "Harmonic mask lobe width in Hz");
    cmd->add_option("--alpha", alpha, "Weight of the F0 enhancement saliency");
    cmd->add_option("--n-partials", n_partials, "Number of harmonic partials");
    cmd->add_option("--mask", mask, "Integrated mask flavour")->check(CLI::IsMember({"soft", "binary"}));
  }

  PipelineConfig resolve(int sample_rate) const {
    PipelineConfig cfg = PipelineConfig::defaults_for(sample_rate);
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      nlohmann::json j;
      try {
        in >> j;
      } catch (const nlohmann::json::exception& e) {
        throw InvalidInput("malformed config file " + config_path + ": " + e.what());
      }
      cfg = config_from_json(j, cfg);
    }
    if (lambda_sep) cfg.lambda_sep = *lambda_sep;
    if (lambda_f0) cfg.lambda_f0 = *lambda_f0;
    if (w) cfg.w = *w;
    if (alpha) cfg.alpha = *alpha;
    if (n_partials) cfg.n_partials = *n_partials;
    if (mask) cfg.mask_mode = *mask == "binary" ? MaskKind::binary : MaskKind::soft;
    validate(cfg, sample_rate);
    return cfg;
  }
};

void dump_debug(const fs::path& dir, const PipelineOutput& out) {
  fs::create_directories(dir);
  if (out.rpca_f0) write_rpca_trace_csv(dir / "rpca_trace_f0.csv", out.rpca_f0->trace);
  if (out.rpca_sep) write_rpca_trace_csv(dir / "rpca_trace_sep.csv", out.rpca_sep->trace);
  write_mask_pgm(dir / "mask_integrated.pgm", out.final_mask);
  write_matrix_csv(dir / "mask_integrated.csv", out.final_mask.values);
  write_mask_pgm(dir / "mask_harmonic.pgm", out.harmonic);
  if (out.rpca_binary.values.size() > 0) write_mask_pgm(dir / "mask_rpca_binary.pgm", out.rpca_binary);
  if (out.saliency.values.size() > 0) write_saliency_csv(dir / "saliency.csv", out.saliency);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  require(out.good(), "cannot write " + path.string());
  out << text;
}

std::vector<CorpusClip> load_manifest_corpus(const std::string& manifest, bool mixdown) {
  auto clips = load_corpus(read_manifest(manifest), {mixdown});
  return clips;
}

int first_sample_rate(const std::vector<CorpusClip>& clips) {
  for (const auto& c : clips)
    if (c.load_error.empty()) return c.mixture.sample_rate;
  throw InvalidInput("no clip in the corpus could be loaded");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Singing voice separation and vocal F0 estimation"};
  app.require_subcommand(1);
  bool verbose = false;
  bool mixdown = false;
  app.add_flag("-v,--verbose", verbose, "Log stage timings to stderr");
  app.add_flag("--mixdown", mixdown, "Average multichannel WAV input to mono");

  // separate
  auto* sep = app.add_subcommand("separate", "Separate vocals and accompaniment");
  std::string sep_in, sep_vocal, sep_accomp, sep_f0, sep_dump;
  bool sep_pcm16 = false;
  ConfigFlags sep_flags;
  sep->add_option("input", sep_in, "Mixture WAV")->required()->check(CLI::ExistingFile);
  sep->add_option("--vocal", sep_vocal, "Output vocal WAV")->required();
  sep->add_option("--accomp", sep_accomp, "Output accompaniment WAV")->required();
  sep->add_option("--f0", sep_f0, "Also write the estimated F0 contour CSV");
  sep->add_option("--dump-dir", sep_dump, "Write RPCA traces, masks and saliency for inspection");
  sep->add_flag("--pcm16", sep_pcm16, "Write 16-bit PCM instead of 32-bit float");
  sep_flags.attach(sep);

  // estimate-f0
  auto* f0 = app.add_subcommand("estimate-f0", "Estimate the vocal F0 contour");
  std::string f0_in, f0_out;
  ConfigFlags f0_flags;
  f0->add_option("input", f0_in, "Mixture WAV")->required()->check(CLI::ExistingFile);
  f0->add_option("--out", f0_out, "Output contour CSV (time_seconds,f0_hz)")->required();
  f0_flags.attach(f0);

  // evaluate
  auto* ev = app.add_subcommand("evaluate", "Score separation and F0 estimation on a corpus");
  std::string ev_corpus, ev_out;
  std::vector<double> ev_snr;
  bool ev_csv = false, ev_gt = false;
  int ev_jobs = 1;
  ConfigFlags ev_flags;
  ev->add_option("--corpus", ev_corpus, "Corpus manifest JSON")->required()->check(CLI::ExistingFile);
  ev->add_option("--out", ev_out, "Report path")->required();
  ev->add_option("--snr", ev_snr, "Remix references at these SNRs in dB (e.g. -5,0,5)")->delimiter(',');
  ev->add_flag("--csv", ev_csv, "Write CSV instead of JSON");
  ev->add_flag("--ground-truth-f0", ev_gt, "Build harmonic masks from the reference F0");
  ev->add_option("--jobs", ev_jobs, "Clips processed in parallel")->check(CLI::PositiveNumber);
  ev_flags.attach(ev);

  // grid-search
  auto* gs = app.add_subcommand("grid-search", "Sweep parameters over a corpus");
  std::string gs_corpus, gs_axes, gs_objective = "gnsdr", gs_out;
  std::optional<double> gs_snr;
  bool gs_gt = false;
  int gs_jobs = 1;
  ConfigFlags gs_flags;
  gs->add_option("--corpus", gs_corpus, "Corpus manifest JSON")->required()->check(CLI::ExistingFile);
  gs->add_option("--axes", gs_axes, "Axes JSON")->required()->check(CLI::ExistingFile);
  gs->add_option("--objective", gs_objective, "gnsdr or rpa")->check(CLI::IsMember({"gnsdr", "rpa"}));
  gs->add_option("--out", gs_out, "Output CSV")->required();
  gs->add_option("--snr", gs_snr, "Remix references at this SNR in dB");
  gs->add_flag("--ground-truth-f0", gs_gt, "Build harmonic masks from the reference F0");
  gs->add_option("--jobs", gs_jobs, "Clips processed in parallel")->check(CLI::PositiveNumber);
  gs_flags.attach(gs);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalidInput;
  }

  try {
    if (*sep) {
      const auto signal = read_wav(sep_in, {mixdown});
      const auto cfg = sep_flags.resolve(signal.sample_rate);
      RunOptions options;
      options.verbose = verbose;
      options.record_rpca_trace = !sep_dump.empty();
      const auto out = run(signal, cfg, options);
      const auto format = sep_pcm16 ? WavSampleFormat::pcm16 : WavSampleFormat::float32;
      write_wav(sep_vocal, out.separation.vocal, format);
      write_wav(sep_accomp, out.separation.accompaniment, format);
      if (!sep_f0.empty()) write_f0_csv(sep_f0, out.contour);
      if (!sep_dump.empty()) dump_debug(sep_dump, out);
      return kExitOk;
    }
    if (*f0) {
      const auto signal = read_wav(f0_in, {mixdown});
      const auto cfg = f0_flags.resolve(signal.sample_rate);
      RunOptions options;
      options.verbose = verbose;
      write_f0_csv(f0_out, estimate_f0(signal, cfg, options));
      return kExitOk;
    }
    if (*ev) {
      const auto clips = load_manifest_corpus(ev_corpus, mixdown);
      const auto cfg = ev_flags.resolve(first_sample_rate(clips));
      EvaluateOptions options;
      options.snr_db = ev_snr;
      options.ground_truth_f0 = ev_gt;
      options.jobs = ev_jobs;
      options.verbose = verbose;
      const auto report = evaluate(clips, cfg, options);
      write_text(ev_out, ev_csv ? report_to_csv(report) : report_to_json(report).dump(2) + "\n");
      return report.failures() > 0 ? kExitPartialFailure : kExitOk;
    }
    if (*gs) {
      const auto clips = load_manifest_corpus(gs_corpus, mixdown);
      const auto cfg = gs_flags.resolve(first_sample_rate(clips));
      std::ifstream axes_in(gs_axes);
      nlohmann::json axes_json;
      try {
        axes_in >> axes_json;
      } catch (const nlohmann::json::exception& e) {
        throw InvalidInput("malformed axes file: " + std::string(e.what()));
      }
      GridSearchSpec spec{axes_from_json(axes_json), parse_objective(gs_objective)};
      GridSearchOptions options;
      options.ground_truth_f0 = gs_gt;
      options.snr_db = gs_snr;
      options.jobs = gs_jobs;
      options.verbose = verbose;
      const auto result = grid_search(clips, spec, cfg, options);
      write_text(gs_out, grid_to_csv(result));
      std::size_t failures = 0;
      for (const auto& cell : result.cells) failures += cell.failures;
      return failures > 0 ? kExitPartialFailure : kExitOk;
    }
  } catch (const InvalidInput& e) {
    std::cerr << "vocalsep: invalid input: " << e.what() << "\n";
    return kExitInvalidInput;
  } catch (const std::exception& e) {
    std::cerr << "vocalsep: error: " << e.what() << "\n";
    return 1;
  }
  return kExitOk;
}
