#include "vocalsep/corpus.hpp"

#include "vocalsep/io.hpp"
#include "parallel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <numeric>
#include <sstream>

namespace vocalsep {

namespace {

double energy(const AudioSignal& s) {
  return std::inner_product(s.samples.begin(), s.samples.end(), s.samples.begin(), 0.0);
}

AudioSignal scaled(const AudioSignal& s, double gain) {
  AudioSignal out = s;
  for (double& v : out.samples) v *= gain;
  return out;
}

}  // namespace

std::vector<CorpusEntry> read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(in.good(), "cannot open corpus manifest: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput("malformed corpus manifest: " + std::string(e.what()));
  }
  require(j.is_array(), "corpus manifest must be a JSON list");
  const auto base = path.parent_path();
  auto resolve = [&](const std::string& p) {
    std::filesystem::path fp(p);
    return fp.is_absolute() ? fp : base / fp;
  };

  std::vector<CorpusEntry> entries;
  for (const auto& item : j) {
    try {
      CorpusEntry e;
      e.id = item.at("id").get<std::string>();
      e.mixture_path = item.contains("mixture_path") ? resolve(item.at("mixture_path").get<std::string>())
                                                     : std::filesystem::path();
      e.vocal_path = resolve(item.at("vocal_path").get<std::string>());
      e.accomp_path = resolve(item.at("accomp_path").get<std::string>());
      e.f0_path = resolve(item.at("f0_path").get<std::string>());
      entries.push_back(std::move(e));
    } catch (const nlohmann::json::exception& e) {
      throw InvalidInput("malformed corpus manifest entry: " + std::string(e.what()));
    }
  }
  require(!entries.empty(), "corpus manifest is empty");
  return entries;
}

std::vector<CorpusClip> load_corpus(const std::vector<CorpusEntry>& entries, const WavReadOptions& wav) {
  std::vector<CorpusClip> clips;
  for (const auto& e : entries) {
    CorpusClip clip;
    clip.id = e.id;
    try {
      clip.vocal = read_wav(e.vocal_path, wav);
      clip.accompaniment = read_wav(e.accomp_path, wav);
      clip.f0 = read_f0_csv(e.f0_path);
      if (!e.mixture_path.empty()) {
        clip.mixture = read_wav(e.mixture_path, wav);
      } else {
        require(clip.vocal.size() == clip.accompaniment.size(), "vocal and accompaniment lengths differ");
        clip.mixture = clip.vocal;
        for (std::size_t i = 0; i < clip.mixture.size(); ++i) clip.mixture.samples[i] += clip.accompaniment.samples[i];
      }
    } catch (const std::exception& ex) {
      clip.load_error = ex.what();
    }
    clips.push_back(std::move(clip));
  }
  return clips;
}

std::pair<AudioSignal, AudioSignal> remix_at_snr(const AudioSignal& vocal, const AudioSignal& accompaniment,
                                                 const F0Contour& f0, double snr_db) {
  require(vocal.size() == accompaniment.size(), "vocal and accompaniment lengths differ");
  require(vocal.sample_rate == accompaniment.sample_rate, "vocal and accompaniment sample rates differ");
  const double ev = energy(voiced_region_mask(vocal, f0));
  const double ea = energy(voiced_region_mask(accompaniment, f0));
  require(ev > 0 && ea > 0, "cannot remix: vocal or accompaniment is silent over the voiced region");
  const double gain = std::sqrt(ev / (ea * std::pow(10.0, snr_db / 10.0)));
  AudioSignal accomp = scaled(accompaniment, gain);
  AudioSignal mixture = vocal;
  for (std::size_t i = 0; i < mixture.size(); ++i) mixture.samples[i] += accomp.samples[i];
  return {std::move(mixture), std::move(accomp)};
}

std::size_t EvaluationReport::failures() const {
  std::size_t n = 0;
  for (const auto& s : sections) n += s.failures;
  return n;
}

ClipEvaluation score_clip(const CorpusClip& clip, const AudioSignal& mixture, const AudioSignal& accompaniment_ref,
                          const AudioSignal& vocal_estimate, const AudioSignal& accomp_estimate,
                          const F0Contour& estimated_f0, double rpa_tolerance_cents) {
  require(mixture.size() == clip.vocal.size() && mixture.size() == accompaniment_ref.size(),
          "mixture and references differ in length");
  const auto& truth = clip.f0;
  const AudioSignal mix = voiced_region_mask(mixture, truth);
  const AudioSignal vocal = voiced_region_mask(clip.vocal, truth);
  const AudioSignal accomp = voiced_region_mask(accompaniment_ref, truth);
  const AudioSignal est_vocal = voiced_region_mask(vocal_estimate, truth);
  const AudioSignal est_accomp = voiced_region_mask(accomp_estimate, truth);

  ClipEvaluation out;
  out.id = clip.id;
  out.length = static_cast<double>(mixture.size());
  out.vocal = score_estimate(est_vocal, vocal, accomp, mix);
  out.accompaniment = score_estimate(est_accomp, accomp, vocal, mix);
  out.rpa = raw_pitch_accuracy(estimated_f0, truth, rpa_tolerance_cents);
  out.ok = true;
  return out;
}

namespace {

EvaluationSection summarise(std::optional<double> snr, std::vector<ClipEvaluation> clips) {
  std::sort(clips.begin(), clips.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  EvaluationSection section;
  section.snr_db = snr;
  std::vector<ClipScore> vocal, accomp;
  double rpa_sum = 0.0;
  for (const auto& c : clips) {
    if (!c.ok) {
      ++section.failures;
      continue;
    }
    vocal.push_back({c.id, c.length, c.vocal});
    accomp.push_back({c.id, c.length, c.accompaniment});
    rpa_sum += c.rpa;
  }
  if (vocal.empty()) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    section.vocal = {nan, nan, nan, {}};
    section.accompaniment = {nan, nan, nan, {}};
    section.mean_rpa = nan;
  } else {
    section.mean_rpa = rpa_sum / static_cast<double>(vocal.size());
    section.vocal = aggregate(std::move(vocal));
    section.accompaniment = aggregate(std::move(accomp));
  }
  section.clips = std::move(clips);
  return section;
}

}  // namespace

EvaluationReport evaluate(const std::vector<CorpusClip>& corpus, const PipelineConfig& base_cfg,
                          const EvaluateOptions& options) {
  require(!corpus.empty(), "corpus is empty");
  std::vector<std::optional<double>> conditions;
  if (options.snr_db.empty()) conditions.push_back(std::nullopt);
  for (double snr : options.snr_db) conditions.emplace_back(snr);

  // Cache slots are created up front so workers never insert concurrently.
  if (options.cache)
    for (std::size_t s = 0; s < conditions.size(); ++s)
      for (std::size_t c = 0; c < corpus.size(); ++c) (*options.cache)[{c, s}];

  EvaluationReport report;
  for (std::size_t s = 0; s < conditions.size(); ++s) {
    std::vector<ClipEvaluation> results(corpus.size());
    detail::parallel_for(corpus.size(), options.jobs, [&](std::size_t c) {
      const auto& clip = corpus[c];
      ClipEvaluation& result = results[c];
      result.id = clip.id;
      try {
        require(clip.load_error.empty(), clip.load_error);
        AudioSignal mixture = clip.mixture;
        AudioSignal accomp_ref = clip.accompaniment;
        if (conditions[s]) std::tie(mixture, accomp_ref) = remix_at_snr(clip.vocal, clip.accompaniment, clip.f0, *conditions[s]);

        PipelineConfig cfg = base_cfg;
        RunOptions run_options;
        run_options.verbose = options.verbose;
        if (options.cache) run_options.cache = &options.cache->at({c, s});
        if (options.ground_truth_f0) run_options.ground_truth_f0 = clip.f0;
        const auto out = run(mixture, cfg, run_options);
        result = score_clip(clip, mixture, accomp_ref, out.separation.vocal, out.separation.accompaniment,
                            out.contour, options.rpa_tolerance_cents);
      } catch (const std::exception& ex) {
        result.ok = false;
        result.error = ex.what();
        result.length = static_cast<double>(clip.mixture.size());
        if (options.verbose) std::cerr << "[vocalsep] clip " << clip.id << " failed: " << ex.what() << "\n";
      }
    });
    report.sections.push_back(summarise(conditions[s], std::move(results)));
  }
  return report;
}

namespace {

nlohmann::json score_json(const SeparationScore& s) {
  return {{"sdr", s.sdr}, {"sir", s.sir}, {"sar", s.sar}, {"nsdr", s.nsdr}};
}

nlohmann::json global_json(const CorpusScore& s) {
  return {{"gnsdr", s.gnsdr}, {"gsir", s.gsir}, {"gsar", s.gsar}};
}

}  // namespace

nlohmann::json report_to_json(const EvaluationReport& report) {
  nlohmann::json sections = nlohmann::json::array();
  for (const auto& s : report.sections) {
    nlohmann::json clips = nlohmann::json::array();
    for (const auto& c : s.clips) {
      nlohmann::json entry = {{"id", c.id}, {"length", c.length}, {"ok", c.ok}};
      if (c.ok) {
        entry["vocal"] = score_json(c.vocal);
        entry["accompaniment"] = score_json(c.accompaniment);
        entry["rpa"] = c.rpa;
      } else {
        entry["error"] = c.error;
      }
      clips.push_back(std::move(entry));
    }
    sections.push_back({
        {"snr_db", s.snr_db ? nlohmann::json(*s.snr_db) : nlohmann::json(nullptr)},
        {"vocal", global_json(s.vocal)},
        {"accompaniment", global_json(s.accompaniment)},
        {"mean_rpa", s.mean_rpa},
        {"failures", s.failures},
        {"clips", std::move(clips)},
    });
  }
  return {{"sections", std::move(sections)}};
}

std::string report_to_csv(const EvaluationReport& report) {
  std::ostringstream out;
  out << "snr_db,id,length,ok,vocal_sdr,vocal_sir,vocal_sar,vocal_nsdr,accomp_sdr,accomp_sir,accomp_sar,accomp_nsdr,rpa\n";
  for (const auto& s : report.sections) {
    const std::string snr = s.snr_db ? std::to_string(*s.snr_db) : "";
    for (const auto& c : s.clips) {
      out << snr << ',' << c.id << ',' << c.length << ',' << (c.ok ? 1 : 0);
      if (c.ok) {
        out << ',' << c.vocal.sdr << ',' << c.vocal.sir << ',' << c.vocal.sar << ',' << c.vocal.nsdr << ','
            << c.accompaniment.sdr << ',' << c.accompaniment.sir << ',' << c.accompaniment.sar << ','
            << c.accompaniment.nsdr << ',' << c.rpa;
      } else {
        out << ",,,,,,,,,";
      }
      out << '\n';
    }
    // Global rows carry GSIR/GSAR/GNSDR in the SIR/SAR/NSDR columns.
    out << snr << ",GLOBAL,,,," << s.vocal.gsir << ',' << s.vocal.gsar << ',' << s.vocal.gnsdr << ",,"
        << s.accompaniment.gsir << ',' << s.accompaniment.gsar << ',' << s.accompaniment.gnsdr << ','
        << s.mean_rpa << '\n';
  }
  return out.str();
}

}  // namespace vocalsep
