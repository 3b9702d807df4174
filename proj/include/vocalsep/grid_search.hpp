#pragma once

#include "vocalsep/corpus.hpp"
#include "vocalsep/pipeline.hpp"

#include "json.hpp"

#include <optional>
#include <string>
#include <vector>

namespace vocalsep {

/// Inclusive arithmetic sweep of one PipelineConfig parameter.
/// Parameter names: lambda (sets lambda_sep and lambda_f0), lambda_sep, lambda_f0, w,
/// alpha, gamma, n_partials, f0_min, f0_max, tukey_shape.
struct GridAxis {
  std::string parameter;
  double start = 0.0;
  double stop = 0.0;
  double step = 1.0;

  std::vector<double> values() const;
};

enum class GridObjective { gnsdr, rpa };

struct GridSearchSpec {
  std::vector<GridAxis> axes;
  GridObjective objective = GridObjective::gnsdr;
};

void validate(const GridSearchSpec& spec);

/// Axes from `[{"parameter": ..., "start": ..., "stop": ..., "step": ...}, ...]` or
/// `{"axes": [...]}`.
std::vector<GridAxis> axes_from_json(const nlohmann::json& j);
GridObjective parse_objective(const std::string& name);

/// Sets one named parameter on a config.
void apply_parameter(PipelineConfig& cfg, const std::string& parameter, double value);

struct GridCell {
  std::vector<double> values;  // one per axis, in axis order
  double objective = 0.0;
  double gnsdr_vocal = 0.0;
  double gnsdr_accomp = 0.0;
  double mean_rpa = 0.0;
  std::size_t failures = 0;
};

struct GridSearchResult {
  std::vector<std::string> parameters;
  GridObjective objective = GridObjective::gnsdr;
  std::vector<GridCell> cells;  // best objective first
};

struct GridSearchOptions {
  bool ground_truth_f0 = false;     // harmonic masks from the reference F0 contours
  std::optional<double> snr_db;     // remix condition; unset uses the given mixtures
  int jobs = 1;
  bool verbose = false;
};

/// Evaluates the corpus at every grid point. Clip failures are counted per cell. RPCA
/// results are shared between cells that use the same lambda.
GridSearchResult grid_search(const std::vector<CorpusClip>& corpus, const GridSearchSpec& spec,
                             const PipelineConfig& cfg, const GridSearchOptions& options = {});

std::string grid_to_csv(const GridSearchResult& result);

}  // namespace vocalsep
