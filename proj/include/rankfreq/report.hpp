#pragma once

// JSON and TSV encodings of models, fits and experiment reports. Numbers are
// written in shortest round-trip form so outputs are byte-stable.

#include <optional>
#include <ostream>
#include <span>
#include <string>

#include "json.hpp"

#include "rankfreq/core.hpp"
#include "rankfreq/fit.hpp"
#include "rankfreq/golomb.hpp"
#include "rankfreq/infometrics.hpp"
#include "rankfreq/mixlab.hpp"
#include "rankfreq/models.hpp"

namespace rankfreq {

using Json = nlohmann::ordered_json;

// Shortest decimal that parses back to the same double; integral values
// print without a fraction ("5"), non-finite values as "nan"/"inf"/"-inf".
std::string format_number(double value);

Json to_json(const GroupKey& key);

// {family: "geometric"|"zipf"|"mixture", q|s, N, components, weights, labels}
Json model_to_json(const ParametricModel& model);
ParametricModel model_from_json(const Json& doc);

Json to_json(const FitResult& fit);
FitResult fit_result_from_json(const Json& doc);
Json to_json(const ComparisonReport& report);
ComparisonReport comparison_from_json(const Json& doc);

Json to_json(const BoxStats& stats);
Json to_json(const ExperimentReport& report);
ExperimentReport experiment_from_json(const Json& doc);

// {components, q_range: [lo, hi], law, tokens, labels, seed, mode}
Json to_json(const MixtureExperimentSpec& spec);
MixtureExperimentSpec experiment_spec_from_json(const Json& doc);

Json to_json(const CodeStats& stats);
CodeStats code_stats_from_json(const Json& doc);

// rank, observed_prob, model_prob
void write_pointwise_tsv(std::ostream& out, const PointwiseComparison& cmp);

// step, population, entropy_bits, perplexity, geometric_r2, zipf_r2, plus a
// "# pearson_population_perplexity" footer when a correlation is given.
void write_trajectory_tsv(std::ostream& out, std::span<const TrajectoryPoint> points,
                          std::optional<double> correlation = std::nullopt);

// component, q, tokens, geometric_r2, zipf_r2, preferred; last row "pooled".
void write_experiment_tsv(std::ostream& out, const ExperimentReport& report);

}  // namespace rankfreq
