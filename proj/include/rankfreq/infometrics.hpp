#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "rankfreq/core.hpp"
#include "rankfreq/fit.hpp"
#include "rankfreq/models.hpp"

namespace rankfreq {

// Plug-in Shannon entropy in bits, no bias correction.
double empirical_entropy(const RankedDistribution& dist);

// 2^H, the effective number of equally likely types.
double perplexity(const RankedDistribution& dist);

// Both distributions as probabilities over ranks 1..min(N_a, N_b),
// renormalized over that shared range.
std::pair<std::vector<double>, std::vector<double>> normalize_for_comparison(
    const RankedDistribution& a, const RankedDistribution& b);

struct PointwiseRow {
  Rank rank = 0;
  double observed = 0.0;
  double model = 0.0;
};

struct PointwiseComparison {
  std::vector<PointwiseRow> rows;
  double observed_entropy_bits = 0.0;
  // Entropy of the model as given (e.g. the full unbounded geometric).
  double model_entropy_bits = 0.0;
  // Entropy of the model renormalized to the observed ranks.
  double model_support_entropy_bits = 0.0;
};

// Observed vs model probabilities per rank, with the model renormalized to
// 1..N. Throws Error(domain) when the model support does not cover 1..N.
PointwiseComparison pointwise_compare(const RankedDistribution& dist,
                                      const ParametricModel& model);

struct TrajectoryPoint {
  std::size_t step = 0;  // 1-based
  double population = 0.0;
  double entropy_bits = 0.0;  // cumulative
  double perplexity = 0.0;    // cumulative
  double step_entropy_bits = 0.0;
  double step_perplexity = 0.0;
  ComparisonReport report;  // fits of the cumulative table
};

// Merges tables cumulatively (shared labels add up) and reports metrics for
// every prefix. Population defaults to cumulative tokens; a supplied series
// must have one value per table (Error(domain) otherwise) and must be
// non-decreasing.
std::vector<TrajectoryPoint> trajectory(std::span<const FrequencyTable> tables,
                                        std::optional<std::span<const double>> populations =
                                            std::nullopt,
                                        FitMode mode = FitMode::regression);

}  // namespace rankfreq
