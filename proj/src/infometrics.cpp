#include "rankfreq/infometrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rankfreq/error.hpp"

namespace rankfreq {

namespace {

double entropy_bits(std::span<const double> probs) {
  double h = 0.0;
  for (double p : probs) {
    if (p > 0.0) h -= p * std::log2(p);
  }
  return h;
}

std::vector<double> renormalized_head(std::span<const double> probs, std::size_t n) {
  std::vector<double> out(probs.begin(), probs.begin() + static_cast<std::ptrdiff_t>(n));
  const double mass = std::accumulate(out.begin(), out.end(), 0.0);
  for (double& p : out) p /= mass;
  return out;
}

}  // namespace

double empirical_entropy(const RankedDistribution& dist) {
  // Never negative; a single type gives exactly 0.
  return std::max(0.0, entropy_bits(dist.probs()));
}

double perplexity(const RankedDistribution& dist) {
  return std::exp2(empirical_entropy(dist));
}

std::pair<std::vector<double>, std::vector<double>> normalize_for_comparison(
    const RankedDistribution& a, const RankedDistribution& b) {
  const std::size_t n = std::min(a.size(), b.size());
  return {renormalized_head(a.probs(), n), renormalized_head(b.probs(), n)};
}

PointwiseComparison pointwise_compare(const RankedDistribution& dist,
                                      const ParametricModel& model) {
  const auto support = support_size(model);
  if (support && *support < dist.size()) {
    throw Error(ErrorKind::domain, "model support does not cover observed ranks");
  }
  std::vector<double> model_probs(dist.size());
  for (std::size_t r = 1; r <= dist.size(); ++r) model_probs[r - 1] = pmf(model, r);
  const double mass = std::accumulate(model_probs.begin(), model_probs.end(), 0.0);
  for (double& p : model_probs) p /= mass;

  PointwiseComparison out;
  out.rows.reserve(dist.size());
  for (std::size_t r = 1; r <= dist.size(); ++r) {
    out.rows.push_back({r, dist.prob_at(r), model_probs[r - 1]});
  }
  out.observed_entropy_bits = empirical_entropy(dist);
  out.model_entropy_bits = model_entropy(model);
  out.model_support_entropy_bits = entropy_bits(model_probs);
  return out;
}

std::vector<TrajectoryPoint> trajectory(std::span<const FrequencyTable> tables,
                                        std::optional<std::span<const double>> populations,
                                        FitMode mode) {
  if (tables.empty()) throw Error(ErrorKind::empty_input, "trajectory needs at least one table");
  if (populations) {
    if (populations->size() != tables.size()) {
      throw Error(ErrorKind::domain, "need one population value per step");
    }
    if (!std::is_sorted(populations->begin(), populations->end())) {
      throw Error(ErrorKind::domain, "population series must be non-decreasing");
    }
  }

  std::vector<TrajectoryPoint> points;
  points.reserve(tables.size());
  FrequencyTable cumulative;
  for (std::size_t i = 0; i < tables.size(); ++i) {
    for (const auto& [label, count] : tables[i].entries()) cumulative.add(label, count);
    const auto dist = rank(cumulative);
    const auto step_dist = rank(tables[i]);

    TrajectoryPoint point;
    point.step = i + 1;
    point.population = populations ? (*populations)[i]
                                   : static_cast<double>(cumulative.total_tokens());
    point.entropy_bits = empirical_entropy(dist);
    point.perplexity = std::exp2(point.entropy_bits);
    point.step_entropy_bits = empirical_entropy(step_dist);
    point.step_perplexity = std::exp2(point.step_entropy_bits);
    point.report = compare(dist, mode);
    points.push_back(std::move(point));
  }
  return points;
}

}  // namespace rankfreq
