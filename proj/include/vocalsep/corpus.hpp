#pragma once

#include "vocalsep/metrics.hpp"
#include "vocalsep/pipeline.hpp"
#include "vocalsep/wav.hpp"

#include "json.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace vocalsep {

/// One manifest entry. Relative paths resolve against the manifest's directory.
struct CorpusEntry {
  std::string id;
  std::filesystem::path mixture_path;
  std::filesystem::path vocal_path;
  std::filesystem::path accomp_path;
  std::filesystem::path f0_path;
};

/// Loaded references. `load_error` is set instead of throwing so one bad clip does not
/// abort a corpus run.
struct CorpusClip {
  std::string id;
  AudioSignal mixture;
  AudioSignal vocal;
  AudioSignal accompaniment;
  F0Contour f0;
  std::string load_error;
};

std::vector<CorpusEntry> read_manifest(const std::filesystem::path& path);
std::vector<CorpusClip> load_corpus(const std::vector<CorpusEntry>& entries, const WavReadOptions& wav = {});

/// Remixes vocal + g * accompaniment so the vocal-to-accompaniment energy ratio over the
/// voiced region of `f0` equals snr_db. Returns the mixture and scaled accompaniment.
std::pair<AudioSignal, AudioSignal> remix_at_snr(const AudioSignal& vocal, const AudioSignal& accompaniment,
                                                 const F0Contour& f0, double snr_db);

struct ClipEvaluation {
  std::string id;
  double length = 0.0;
  bool ok = false;
  std::string error;
  SeparationScore vocal;
  SeparationScore accompaniment;
  double rpa = 0.0;
};

struct EvaluationSection {
  std::optional<double> snr_db;  // unset: manifest mixtures used as given
  CorpusScore vocal;
  CorpusScore accompaniment;
  double mean_rpa = 0.0;
  std::vector<ClipEvaluation> clips;  // sorted by id
  std::size_t failures = 0;
};

struct EvaluationReport {
  std::vector<EvaluationSection> sections;
  std::size_t failures() const;
};

/// Per-(clip, section) RPCA memo shared by repeated evaluations of one corpus.
using CorpusRpcaCache = std::map<std::pair<std::size_t, std::size_t>, RpcaCache>;

struct EvaluateOptions {
  std::vector<double> snr_db;  // empty: one section with the given mixtures
  bool ground_truth_f0 = false;
  double rpa_tolerance_cents = 50.0;
  int jobs = 1;
  bool verbose = false;
  CorpusRpcaCache* cache = nullptr;
};

/// Runs the pipeline on every clip and scores the voiced regions. Scores use only the
/// voiced sections of the ground truth; unvoiced samples are zeroed in every signal.
EvaluationReport evaluate(const std::vector<CorpusClip>& corpus, const PipelineConfig& cfg,
                          const EvaluateOptions& options = {});

/// Scores one clip given already separated signals.
ClipEvaluation score_clip(const CorpusClip& clip, const AudioSignal& mixture, const AudioSignal& accompaniment_ref,
                          const AudioSignal& vocal_estimate, const AudioSignal& accomp_estimate,
                          const F0Contour& estimated_f0, double rpa_tolerance_cents = 50.0);

nlohmann::json report_to_json(const EvaluationReport& report);
std::string report_to_csv(const EvaluationReport& report);

}  // namespace vocalsep
