#include "doctest.h"
#include "synthetic.hpp"

#include "vocalsep/corpus.hpp"
#include "vocalsep/grid_search.hpp"
#include "vocalsep/io.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

using namespace vocalsep;
namespace fs = std::filesystem;

namespace {

double energy(const AudioSignal& s) {
  return std::inner_product(s.samples.begin(), s.samples.end(), s.samples.begin(), 0.0);
}

testing::SyntheticClip tiny_clip(std::uint64_t seed, double f0_low) {
  testing::SyntheticSpec spec;
  spec.seconds = 0.6;
  spec.loop_seconds = 0.2;
  spec.seed = seed;
  spec.f0_low = f0_low;
  spec.f0_high = f0_low + 60.0;
  return testing::make_synthetic_clip(spec);
}

CorpusClip to_corpus_clip(const std::string& id, const testing::SyntheticClip& s) {
  return {id, s.mixture, s.vocal, s.accompaniment, s.f0, ""};
}

const std::vector<CorpusClip>& tiny_corpus() {
  static const std::vector<CorpusClip> corpus{to_corpus_clip("b", tiny_clip(11, 200.0)),
                                              to_corpus_clip("a", tiny_clip(12, 150.0))};
  return corpus;
}

PipelineConfig fast_config() {
  auto cfg = PipelineConfig::defaults_for(16000);
  cfg.rpca_tolerance = 1e-5;
  return cfg;
}

// Writes the tiny corpus plus one entry with a missing vocal file.
fs::path write_corpus_dir() {
  const auto dir = fs::temp_directory_path() / "vocalsep_test_corpus";
  fs::remove_all(dir);
  fs::create_directories(dir / "audio");
  nlohmann::json manifest = nlohmann::json::array();
  for (const auto& c : tiny_corpus()) {
    write_wav(dir / "audio" / (c.id + "_mix.wav"), c.mixture);
    write_wav(dir / "audio" / (c.id + "_vocal.wav"), c.vocal);
    write_wav(dir / "audio" / (c.id + "_accomp.wav"), c.accompaniment);
    write_f0_csv(dir / "audio" / (c.id + "_f0.csv"), c.f0);
    manifest.push_back({{"id", c.id},
                        {"mixture_path", "audio/" + c.id + "_mix.wav"},
                        {"vocal_path", "audio/" + c.id + "_vocal.wav"},
                        {"accomp_path", (dir / "audio" / (c.id + "_accomp.wav")).string()},
                        {"f0_path", "audio/" + c.id + "_f0.csv"}});
  }
  manifest.push_back({{"id", "c"},
                      {"mixture_path", "audio/a_mix.wav"},
                      {"vocal_path", "audio/nowhere.wav"},
                      {"accomp_path", "audio/a_accomp.wav"},
                      {"f0_path", "audio/a_f0.csv"}});
  std::ofstream(dir / "manifest.json") << manifest.dump(2);
  return dir / "manifest.json";
}

}  // namespace

TEST_CASE("manifest paths resolve against the manifest directory") {
  const auto manifest = write_corpus_dir();
  const auto entries = read_manifest(manifest);
  REQUIRE(entries.size() == 3);
  CHECK(entries[0].id == "b");
  CHECK(entries[0].vocal_path == manifest.parent_path() / "audio/b_vocal.wav");
  CHECK(entries[0].accomp_path.is_absolute());

  const auto clips = load_corpus(entries);
  CHECK(clips[0].load_error.empty());
  CHECK(clips[0].vocal.samples.size() == tiny_corpus()[0].vocal.size());
  CHECK(clips[0].f0.frames() == tiny_corpus()[0].f0.frames());
  CHECK(!clips[2].load_error.empty());
}

TEST_CASE("malformed manifests are rejected") {
  const auto dir = fs::temp_directory_path() / "vocalsep_test_corpus_bad";
  fs::create_directories(dir);
  std::ofstream(dir / "obj.json") << R"({"id": "x"})";
  CHECK_THROWS_AS(read_manifest(dir / "obj.json"), InvalidInput);
  std::ofstream(dir / "missing_key.json") << R"([{"id": "x", "vocal_path": "v.wav"}])";
  CHECK_THROWS_AS(read_manifest(dir / "missing_key.json"), InvalidInput);
  std::ofstream(dir / "empty.json") << "[]";
  CHECK_THROWS_AS(read_manifest(dir / "empty.json"), InvalidInput);
  std::ofstream(dir / "broken.json") << "[{";
  CHECK_THROWS_AS(read_manifest(dir / "broken.json"), InvalidInput);
}

TEST_CASE("remixing hits the requested voiced-region SNR") {
  const auto& clip = tiny_corpus()[0];
  for (double snr : {-5.0, 0.0, 5.0, 12.5}) {
    const auto [mixture, accomp] = remix_at_snr(clip.vocal, clip.accompaniment, clip.f0, snr);
    const double ev = energy(voiced_region_mask(clip.vocal, clip.f0));
    const double ea = energy(voiced_region_mask(accomp, clip.f0));
    CHECK(10.0 * std::log10(ev / ea) == doctest::Approx(snr).epsilon(1e-9).scale(1.0));
    for (std::size_t i = 0; i < mixture.size(); i += 97)
      CHECK(mixture.samples[i] == clip.vocal.samples[i] + accomp.samples[i]);
  }
  const AudioSignal silent{std::vector<double>(clip.vocal.size(), 0.0), 16000};
  CHECK_THROWS_AS(remix_at_snr(silent, clip.accompaniment, clip.f0, 0.0), InvalidInput);
}

TEST_CASE("a perfect vocal estimate scores the cap minus the mixture SDR") {
  const auto& clip = tiny_corpus()[0];
  const auto eval = score_clip(clip, clip.mixture, clip.accompaniment, clip.vocal, clip.accompaniment, clip.f0);
  const double mix_sdr = sdr(voiced_region_mask(clip.mixture, clip.f0), voiced_region_mask(clip.vocal, clip.f0),
                             voiced_region_mask(clip.accompaniment, clip.f0));
  CHECK(eval.vocal.sdr == kRatioCapDb);
  CHECK(eval.vocal.nsdr == doctest::Approx(kRatioCapDb - mix_sdr).epsilon(1e-12));
  CHECK(eval.rpa == 1.0);
  const auto corpus = aggregate({{clip.id, eval.length, eval.vocal}});
  CHECK(corpus.gnsdr == eval.vocal.nsdr);
}

TEST_CASE("evaluate: single clip, failures and determinism") {
  const auto cfg = fast_config();
  const std::vector<CorpusClip> single{tiny_corpus()[0]};
  const auto one = evaluate(single, cfg);
  REQUIRE(one.sections.size() == 1);
  const auto& s = one.sections[0];
  CHECK(s.failures == 0);
  CHECK(s.vocal.gnsdr == s.clips[0].vocal.nsdr);
  CHECK(s.vocal.gsir == s.clips[0].vocal.sir);
  CHECK(s.accompaniment.gsar == s.clips[0].accompaniment.sar);
  CHECK(s.mean_rpa == s.clips[0].rpa);

  auto corpus = tiny_corpus();
  CorpusClip broken;
  broken.id = "0-broken";
  broken.load_error = "missing vocal";
  corpus.push_back(broken);
  EvaluateOptions serial;
  const auto report = evaluate(corpus, cfg, serial);
  EvaluateOptions parallel;
  parallel.jobs = 3;
  const auto report_parallel = evaluate(corpus, cfg, parallel);

  const auto& r = report.sections[0];
  CHECK(report.failures() == 1);
  REQUIRE(r.clips.size() == 3);
  CHECK(r.clips[0].id == "0-broken");
  CHECK(!r.clips[0].ok);
  CHECK(r.clips[0].error == "missing vocal");
  CHECK(r.clips[1].id == "a");
  CHECK(r.clips[2].id == "b");
  CHECK(r.vocal.gnsdr == doctest::Approx((r.clips[1].vocal.nsdr * r.clips[1].length +
                                          r.clips[2].vocal.nsdr * r.clips[2].length) /
                                         (r.clips[1].length + r.clips[2].length)));
  CHECK(report_to_json(report) == report_to_json(report_parallel));
}

TEST_CASE("evaluate remixes each SNR into its own section") {
  EvaluateOptions options;
  options.snr_db = {-5.0, 0.0, 5.0};
  options.ground_truth_f0 = true;
  const std::vector<CorpusClip> single{tiny_corpus()[1]};
  const auto report = evaluate(single, fast_config(), options);
  REQUIRE(report.sections.size() == 3);
  CHECK(*report.sections[0].snr_db == -5.0);
  CHECK(*report.sections[2].snr_db == 5.0);
  // More vocal energy in the mix makes the vocal easier to recover.
  CHECK(report.sections[0].clips[0].vocal.sdr < report.sections[2].clips[0].vocal.sdr);
  for (const auto& s : report.sections) CHECK(s.clips[0].rpa == 1.0);
}

TEST_CASE("report serialisation") {
  auto corpus = tiny_corpus();
  corpus.resize(1);
  CorpusClip broken;
  broken.id = "z";
  broken.load_error = "bad";
  corpus.push_back(broken);
  EvaluateOptions options;
  options.ground_truth_f0 = true;
  const auto report = evaluate(corpus, fast_config(), options);
  const auto j = report_to_json(report);
  CHECK(j.at("sections").size() == 1);
  const auto& section = j.at("sections")[0];
  CHECK(section.at("snr_db").is_null());
  CHECK(section.at("failures") == 1);
  CHECK(section.at("clips")[0].at("ok") == true);
  CHECK(section.at("clips")[0].contains("vocal"));
  CHECK(section.at("clips")[1].at("error") == "bad");
  CHECK(section.at("vocal").at("gnsdr") == report.sections[0].vocal.gnsdr);

  const auto csv = report_to_csv(report);
  std::istringstream lines(csv);
  std::string line;
  std::vector<std::string> rows;
  while (std::getline(lines, line)) rows.push_back(line);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].rfind("snr_db,id,length,ok,vocal_sdr", 0) == 0);
  CHECK(rows[1].rfind(",b,", 0) == 0);
  CHECK(rows[2] == ",z,0,0,,,,,,,,,");
  CHECK(rows[3].rfind(",GLOBAL,", 0) == 0);
  for (const auto& r : rows) CHECK(std::count(r.begin(), r.end(), ',') == 12);
}

TEST_CASE("grid axes enumerate inclusive arithmetic sweeps") {
  const auto count = [](double start, double stop, double step) { return GridAxis{"lambda", start, stop, step}.values().size(); };
  CHECK(count(0.6, 1.2, 0.1) == 7);
  CHECK(count(0.6, 1.1, 0.1) == 6);
  CHECK(count(20, 90, 10) == 8);
  CHECK(count(0, 2.0, 0.2) == 11);
  CHECK(count(0.8, 0.8, 1.0) == 1);
  const auto lambdas = GridAxis{"lambda", 0.6, 1.2, 0.1}.values();
  CHECK(lambdas[3] == 0.9);
  CHECK(lambdas.back() == 1.2);
  CHECK(GridAxis{"alpha", 0, 2.0, 0.2}.values()[7] == 1.4);
  CHECK_THROWS_AS(GridAxis({"w", 1, 2, 0}).values(), InvalidInput);
  CHECK_THROWS_AS(GridAxis({"w", 2, 1, 1}).values(), InvalidInput);
}

TEST_CASE("grid spec parsing and parameters") {
  const auto axes = axes_from_json(nlohmann::json::parse(
      R"({"axes": [{"parameter": "lambda", "start": 0.6, "stop": 1.2, "step": 0.1},
                   {"parameter": "w", "start": 20, "stop": 90, "step": 10}]})"));
  REQUIRE(axes.size() == 2);
  CHECK(axes[1].parameter == "w");
  CHECK(axes_from_json(nlohmann::json::parse(R"([{"parameter": "alpha", "start": 0, "stop": 2, "step": 0.2}])")).size() == 1);
  CHECK_THROWS_AS(axes_from_json(nlohmann::json::parse(R"([{"parameter": "alpha"}])")), InvalidInput);

  PipelineConfig cfg;
  apply_parameter(cfg, "lambda", 1.1);
  CHECK(cfg.lambda_sep == 1.1);
  CHECK(cfg.lambda_f0 == 1.1);
  apply_parameter(cfg, "n_partials", 14.0);
  CHECK(cfg.n_partials == 14);
  CHECK_THROWS_AS(apply_parameter(cfg, "beta", 1.0), InvalidInput);
  CHECK_THROWS_AS(validate(GridSearchSpec{}), InvalidInput);
  CHECK_THROWS_AS(validate(GridSearchSpec{{{"beta", 0, 1, 1}}}), InvalidInput);
  CHECK(parse_objective("rpa") == GridObjective::rpa);
  CHECK_THROWS_AS(parse_objective("sdr"), InvalidInput);
}

TEST_CASE("a 1x1 grid equals a direct evaluation") {
  const auto cfg = fast_config();
  GridSearchSpec spec{{{"lambda", 0.8, 0.8, 0.1}}, GridObjective::gnsdr};
  const auto grid = grid_search(tiny_corpus(), spec, cfg);
  const auto report = evaluate(tiny_corpus(), cfg);
  REQUIRE(grid.cells.size() == 1);
  CHECK(grid.cells[0].values == std::vector<double>{0.8});
  CHECK(grid.cells[0].objective == report.sections[0].vocal.gnsdr);
  CHECK(grid.cells[0].gnsdr_accomp == report.sections[0].accompaniment.gnsdr);
  CHECK(grid.cells[0].mean_rpa == report.sections[0].mean_rpa);

  spec.objective = GridObjective::rpa;
  CHECK(grid_search(tiny_corpus(), spec, cfg).cells[0].objective == report.sections[0].mean_rpa);
}

TEST_CASE("grid search covers every point, sorts by objective and records failures") {
  auto corpus = tiny_corpus();
  CorpusClip broken;
  broken.id = "broken";
  broken.load_error = "unreadable";
  corpus.push_back(broken);
  GridSearchSpec spec{{{"lambda", 0.8, 1.0, 0.2}, {"w", 30, 50, 10}}, GridObjective::gnsdr};
  GridSearchOptions options;
  options.ground_truth_f0 = true;
  const auto grid = grid_search(corpus, spec, fast_config(), options);
  REQUIRE(grid.cells.size() == 6);
  CHECK(grid.parameters == std::vector<std::string>{"lambda", "w"});
  std::set<std::vector<double>> points;
  for (const auto& cell : grid.cells) {
    points.insert(cell.values);
    CHECK(cell.failures == 1);
    CHECK(std::isfinite(cell.objective));
  }
  CHECK(points.size() == 6);
  for (std::size_t i = 1; i < grid.cells.size(); ++i) CHECK(grid.cells[i - 1].objective >= grid.cells[i].objective);

  // Each cell agrees with a direct evaluation at that point.
  auto point = fast_config();
  apply_parameter(point, "lambda", grid.cells[3].values[0]);
  apply_parameter(point, "w", grid.cells[3].values[1]);
  EvaluateOptions eval;
  eval.ground_truth_f0 = true;
  CHECK(evaluate(corpus, point, eval).sections[0].vocal.gnsdr == grid.cells[3].objective);

  const auto csv = grid_to_csv(grid);
  CHECK(csv.rfind("lambda,w,objective,gnsdr_vocal,gnsdr_accomp,mean_rpa,failures\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 7);

  spec.objective = GridObjective::rpa;
  CHECK_THROWS_AS(grid_search(corpus, spec, fast_config(), options), InvalidInput);
  CHECK_THROWS_AS(grid_search({}, spec, fast_config()), InvalidInput);
}

TEST_CASE("a corpus where every clip fails still yields a table") {
  CorpusClip broken;
  broken.id = "x";
  broken.load_error = "gone";
  GridSearchSpec spec{{{"alpha", 0.0, 0.4, 0.2}}, GridObjective::gnsdr};
  const auto grid = grid_search({broken}, spec, fast_config());
  REQUIRE(grid.cells.size() == 3);
  for (const auto& cell : grid.cells) {
    CHECK(std::isnan(cell.objective));
    CHECK(cell.failures == 1);
  }
}
