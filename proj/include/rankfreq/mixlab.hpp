#pragma once

// Aggregation experiments: pooling samples of geometric sub-populations and
// tracking which family fits the pool.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rankfreq/core.hpp"
#include "rankfreq/fit.hpp"
#include "rankfreq/models.hpp"

namespace rankfreq {

// Sums counts per label. Shared labels merge, disjoint labels union. The
// result carries no group key. Throws Error(empty_input) for an empty list.
FrequencyTable pool(std::span<const FrequencyTable> tables);

struct AggregateStep {
  std::size_t step = 0;  // 1-based
  ComparisonReport step_report;
  ComparisonReport cumulative_report;
};

std::vector<AggregateStep> cumulative_aggregate(std::span<const FrequencyTable> tables,
                                                FitMode mode = FitMode::regression);

// How component decay ratios are drawn from [q_lo, q_hi].
enum class HeterogeneityLaw {
  log_uniform_rank,  // log expected rank 1/(1-q) uniform
  uniform_q,
};

std::string to_string(HeterogeneityLaw law);
HeterogeneityLaw parse_heterogeneity_law(std::string_view text);
std::string to_string(LabelSharing sharing);
LabelSharing parse_label_sharing(std::string_view text);

struct MixtureExperimentSpec {
  std::size_t components = 1;
  double q_lo = 0.7;
  double q_hi = 0.98;
  HeterogeneityLaw law = HeterogeneityLaw::log_uniform_rank;
  // One value for every component, or one per component.
  std::vector<Count> tokens{100000};
  LabelSharing labels = LabelSharing::disjoint;
  std::uint64_t seed = 0;
  FitMode mode = FitMode::regression;

  // Throws Error(domain) when K = 0, the q range is not 0 < lo <= hi < 1,
  // or the token list is empty, zero, or of the wrong length.
  void validate() const;
  Count tokens_for(std::size_t component) const;
  bool operator==(const MixtureExperimentSpec&) const = default;
};

// Median and quartiles (linear interpolation between order statistics).
struct BoxStats {
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
  bool operator==(const BoxStats&) const = default;
};

BoxStats box_stats(std::vector<double> values);

struct ComponentResult {
  double q = 0.0;
  Count tokens = 0;
  ComparisonReport report;
  bool operator==(const ComponentResult&) const = default;
};

struct ExperimentReport {
  std::vector<ComponentResult> components;
  ComparisonReport pooled;
  Count pooled_tokens = 0;
  BoxStats geometric_r2;
  BoxStats zipf_r2;
  bool operator==(const ExperimentReport&) const = default;
};

// Decay ratio of component i. Pure in (spec, i).
double component_q(const MixtureExperimentSpec& spec, std::size_t component);

// Samples each component from an unbounded geometric, fits every component
// and the pooled table. Bit-deterministic given the spec struct; components run
// concurrently on independent streams.
ExperimentReport run_mixture_experiment(const MixtureExperimentSpec& spec);

struct SizeFit {
  double population = 0.0;
  double geometric_r2 = 0.0;
};

// Pearson correlation of population size with geometric R².
// Throws Error(insufficient_data) below 3 entries and
// Error(undefined_correlation) for a constant series.
double size_fit_correlation(std::span<const SizeFit> entries);

// Populations of log-uniform size, each assembled from local communities of
// `community_tokens` tokens. Every community is geometric over one shared
// label pool with its own decay ratio (log-uniform in expected rank), so
// larger populations mix more heterogeneous communities.
struct SizeFitExperimentSpec {
  std::size_t populations = 51;
  Count min_tokens = 1000;
  Count max_tokens = 1000000;
  Count community_tokens = 10000;
  double q_lo = 0.5;
  double q_hi = 0.95;
  std::uint64_t seed = 0;

  void validate() const;
};

struct SizeFitExperiment {
  std::vector<SizeFit> entries;
  double correlation = 0.0;
};

SizeFitExperiment run_size_fit_experiment(const SizeFitExperimentSpec& spec);

}  // namespace rankfreq
