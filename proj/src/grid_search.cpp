#include "vocalsep/grid_search.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <sstream>

namespace vocalsep {

std::vector<double> GridAxis::values() const {
  require(step > 0, "grid axis step must be positive");
  require(stop >= start, "grid axis stop must not precede start");
  const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    // Round to 12 decimals so 0.6 + 3 * 0.1 prints and compares as 0.9.
    out[i] = std::round((start + static_cast<double>(i) * step) * 1e12) / 1e12;
  }
  return out;
}

void validate(const GridSearchSpec& spec) {
  require(!spec.axes.empty(), "grid search needs at least one axis");
  for (const auto& axis : spec.axes) {
    require(!axis.parameter.empty(), "grid axis needs a parameter name");
    (void)axis.values();
    PipelineConfig probe;
    apply_parameter(probe, axis.parameter, axis.start);
  }
}

GridObjective parse_objective(const std::string& name) {
  if (name == "gnsdr") return GridObjective::gnsdr;
  if (name == "rpa") return GridObjective::rpa;
  throw InvalidInput("objective must be 'gnsdr' or 'rpa', got '" + name + "'");
}

std::vector<GridAxis> axes_from_json(const nlohmann::json& j) {
  const nlohmann::json& list = j.is_object() && j.contains("axes") ? j.at("axes") : j;
  require(list.is_array(), "axes must be a JSON list");
  std::vector<GridAxis> axes;
  try {
    for (const auto& item : list)
      axes.push_back({item.at("parameter").get<std::string>(), item.at("start").get<double>(),
                      item.at("stop").get<double>(), item.at("step").get<double>()});
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput("malformed grid axis: " + std::string(e.what()));
  }
  return axes;
}

void apply_parameter(PipelineConfig& cfg, const std::string& parameter, double value) {
  if (parameter == "lambda") {
    cfg.lambda_sep = value;
    cfg.lambda_f0 = value;
  } else if (parameter == "lambda_sep") {
    cfg.lambda_sep = value;
  } else if (parameter == "lambda_f0") {
    cfg.lambda_f0 = value;
  } else if (parameter == "w") {
    cfg.w = value;
  } else if (parameter == "alpha") {
    cfg.alpha = value;
  } else if (parameter == "gamma") {
    cfg.gamma = value;
  } else if (parameter == "n_partials") {
    cfg.n_partials = static_cast<int>(std::lround(value));
  } else if (parameter == "f0_min") {
    cfg.f0_min = value;
  } else if (parameter == "f0_max") {
    cfg.f0_max = value;
  } else if (parameter == "tukey_shape") {
    cfg.tukey_shape = value;
  } else {
    throw InvalidInput("unknown grid parameter '" + parameter + "'");
  }
}

GridSearchResult grid_search(const std::vector<CorpusClip>& corpus, const GridSearchSpec& spec,
                             const PipelineConfig& cfg, const GridSearchOptions& options) {
  validate(spec);
  require(!corpus.empty(), "grid search corpus is empty");
  require(!(options.ground_truth_f0 && spec.objective == GridObjective::rpa),
          "the rpa objective needs estimated F0, not ground-truth F0");

  GridSearchResult result;
  result.objective = spec.objective;
  std::vector<std::vector<double>> axis_values;
  for (const auto& axis : spec.axes) {
    result.parameters.push_back(axis.parameter);
    axis_values.push_back(axis.values());
  }

  EvaluateOptions eval;
  eval.ground_truth_f0 = options.ground_truth_f0;
  eval.jobs = options.jobs;
  eval.verbose = options.verbose;
  if (options.snr_db) eval.snr_db = {*options.snr_db};
  CorpusRpcaCache cache;
  eval.cache = &cache;

  // Odometer over the axes, last axis fastest.
  std::vector<std::size_t> index(axis_values.size(), 0);
  auto advance = [&] {
    for (std::size_t a = axis_values.size(); a-- > 0;) {
      if (++index[a] < axis_values[a].size()) return true;
      index[a] = 0;
    }
    return false;
  };
  do {
    GridCell cell;
    PipelineConfig point = cfg;
    for (std::size_t a = 0; a < axis_values.size(); ++a) {
      cell.values.push_back(axis_values[a][index[a]]);
      apply_parameter(point, spec.axes[a].parameter, axis_values[a][index[a]]);
    }
    const auto report = evaluate(corpus, point, eval);
    const auto& section = report.sections.front();
    cell.gnsdr_vocal = section.vocal.gnsdr;
    cell.gnsdr_accomp = section.accompaniment.gnsdr;
    cell.mean_rpa = section.mean_rpa;
    cell.failures = section.failures;
    cell.objective = spec.objective == GridObjective::gnsdr ? cell.gnsdr_vocal : cell.mean_rpa;
    if (options.verbose)
      std::cerr << "[vocalsep] grid cell " << result.cells.size() << " objective " << cell.objective << "\n";
    result.cells.push_back(std::move(cell));
  } while (advance());

  // Best first; NaN (all clips failed) last; stable so equal objectives keep grid order.
  std::stable_sort(result.cells.begin(), result.cells.end(), [](const GridCell& x, const GridCell& y) {
    if (std::isnan(x.objective)) return false;
    if (std::isnan(y.objective)) return true;
    return x.objective > y.objective;
  });
  return result;
}

std::string grid_to_csv(const GridSearchResult& result) {
  std::ostringstream out;
  for (const auto& p : result.parameters) out << p << ',';
  out << "objective,gnsdr_vocal,gnsdr_accomp,mean_rpa,failures\n";
  for (const auto& cell : result.cells) {
    for (double v : cell.values) out << v << ',';
    out << cell.objective << ',' << cell.gnsdr_vocal << ',' << cell.gnsdr_accomp << ',' << cell.mean_rpa << ','
        << cell.failures << '\n';
  }
  return out.str();
}

}  // namespace vocalsep
