#include "rankfreq/mixlab.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "rankfreq/error.hpp"
#include "rankfreq/random.hpp"

namespace rankfreq {

namespace {

// Stream ids under a master seed.
constexpr std::uint64_t kParameterStream = 1;
constexpr std::uint64_t kSizeStream = 2;

// Runs fn(i) for i in [0, n) on a small worker pool. Each index writes only
// its own slot, so results do not depend on scheduling.
template <class Fn>
void parallel_for(std::size_t n, Fn fn) {
  const std::size_t workers =
      std::min<std::size_t>(n, std::max(1u, std::thread::hardware_concurrency()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::jthread> threads;
  threads.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  threads.clear();
  if (failure) std::rethrow_exception(failure);
}

double draw_log_uniform_rank_q(double u, double q_lo, double q_hi) {
  const double lo = std::log(1.0 / (1.0 - q_lo));
  const double hi = std::log(1.0 / (1.0 - q_hi));
  const double expected_rank = std::exp(lo + u * (hi - lo));
  return std::clamp(1.0 - 1.0 / expected_rank, q_lo, q_hi);
}

void add_into(FrequencyTable& target, const FrequencyTable& source) {
  for (const auto& [label, count] : source.entries()) target.add(label, count);
}

}  // namespace

FrequencyTable pool(std::span<const FrequencyTable> tables) {
  if (tables.empty()) throw Error(ErrorKind::empty_input, "nothing to pool");
  FrequencyTable pooled;
  for (const auto& t : tables) add_into(pooled, t);
  return pooled;
}

std::vector<AggregateStep> cumulative_aggregate(std::span<const FrequencyTable> tables,
                                                FitMode mode) {
  if (tables.empty()) throw Error(ErrorKind::empty_input, "nothing to aggregate");
  std::vector<AggregateStep> steps;
  steps.reserve(tables.size());
  FrequencyTable cumulative;
  for (std::size_t i = 0; i < tables.size(); ++i) {
    add_into(cumulative, tables[i]);
    AggregateStep step;
    step.step = i + 1;
    step.step_report = compare(rank(tables[i]), mode);
    step.cumulative_report = compare(rank(cumulative), mode);
    steps.push_back(std::move(step));
  }
  return steps;
}

std::string to_string(HeterogeneityLaw law) {
  return law == HeterogeneityLaw::log_uniform_rank ? "log_uniform_rank" : "uniform_q";
}

HeterogeneityLaw parse_heterogeneity_law(std::string_view text) {
  if (text == "log_uniform_rank") return HeterogeneityLaw::log_uniform_rank;
  if (text == "uniform_q") return HeterogeneityLaw::uniform_q;
  throw Error(ErrorKind::domain, "unknown heterogeneity law '" + std::string(text) + "'");
}

std::string to_string(LabelSharing sharing) {
  return sharing == LabelSharing::disjoint ? "disjoint" : "shared";
}

LabelSharing parse_label_sharing(std::string_view text) {
  if (text == "disjoint") return LabelSharing::disjoint;
  if (text == "shared") return LabelSharing::shared;
  throw Error(ErrorKind::domain, "unknown label sharing '" + std::string(text) + "'");
}

void MixtureExperimentSpec::validate() const {
  if (components == 0) throw Error(ErrorKind::domain, "experiment needs K >= 1");
  if (!(q_lo > 0.0 && q_lo <= q_hi && q_hi < 1.0)) {
    throw Error(ErrorKind::domain, "q range must satisfy 0 < q_lo <= q_hi < 1");
  }
  if (tokens.empty() || (tokens.size() != 1 && tokens.size() != components)) {
    throw Error(ErrorKind::domain, "tokens must be one value or one per component");
  }
  if (std::find(tokens.begin(), tokens.end(), Count{0}) != tokens.end()) {
    throw Error(ErrorKind::domain, "component token counts must be >= 1");
  }
}

Count MixtureExperimentSpec::tokens_for(std::size_t component) const {
  return tokens.size() == 1 ? tokens.front() : tokens.at(component);
}

BoxStats box_stats(std::vector<double> values) {
  if (values.empty()) throw Error(ErrorKind::empty_input, "no values to summarize");
  std::sort(values.begin(), values.end());
  auto quantile = [&](double p) {
    const double pos = p * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
  };
  return {values.front(), quantile(0.25), quantile(0.5), quantile(0.75), values.back()};
}

double component_q(const MixtureExperimentSpec& spec, std::size_t component) {
  if (spec.q_lo == spec.q_hi) return spec.q_lo;
  const double u = CounterStream(spec.seed, kParameterStream).uniform(component);
  if (spec.law == HeterogeneityLaw::uniform_q) {
    return spec.q_lo + u * (spec.q_hi - spec.q_lo);
  }
  return draw_log_uniform_rank_q(u, spec.q_lo, spec.q_hi);
}

ExperimentReport run_mixture_experiment(const MixtureExperimentSpec& spec) {
  spec.validate();
  const std::size_t k = spec.components;
  std::vector<FrequencyTable> tables(k);
  ExperimentReport report;
  report.components.resize(k);

  parallel_for(k, [&](std::size_t i) {
    const double q = component_q(spec, i);
    const Count n = spec.tokens_for(i);
    const std::string prefix =
        spec.labels == LabelSharing::disjoint ? "c" + std::to_string(i) + "." : "";
    tables[i] = sample(GeometricModel(q), n, derive_seed(spec.seed, i + 1), prefix);
    report.components[i] = {q, n, compare(rank(tables[i]), spec.mode)};
  });

  const auto pooled = pool(tables);
  report.pooled = compare(rank(pooled), spec.mode);
  report.pooled_tokens = pooled.total_tokens();

  std::vector<double> geo;
  std::vector<double> zipf;
  for (const auto& c : report.components) {
    geo.push_back(c.report.geometric.r2);
    zipf.push_back(c.report.zipf.r2);
  }
  report.geometric_r2 = box_stats(std::move(geo));
  report.zipf_r2 = box_stats(std::move(zipf));
  return report;
}

double size_fit_correlation(std::span<const SizeFit> entries) {
  std::vector<double> sizes;
  std::vector<double> r2;
  for (const auto& e : entries) {
    sizes.push_back(e.population);
    r2.push_back(e.geometric_r2);
  }
  return pearson(sizes, r2);
}

void SizeFitExperimentSpec::validate() const {
  if (populations < 3) throw Error(ErrorKind::domain, "need at least 3 populations");
  if (min_tokens == 0 || min_tokens > max_tokens) {
    throw Error(ErrorKind::domain, "token range must satisfy 1 <= min <= max");
  }
  if (community_tokens == 0) throw Error(ErrorKind::domain, "community size must be >= 1");
  if (!(q_lo > 0.0 && q_lo <= q_hi && q_hi < 1.0)) {
    throw Error(ErrorKind::domain, "q range must satisfy 0 < q_lo <= q_hi < 1");
  }
}

SizeFitExperiment run_size_fit_experiment(const SizeFitExperimentSpec& spec) {
  spec.validate();
  SizeFitExperiment out;
  out.entries.resize(spec.populations);
  const CounterStream sizes(spec.seed, kSizeStream);
  const double log_lo = std::log(static_cast<double>(spec.min_tokens));
  const double log_hi = std::log(static_cast<double>(spec.max_tokens));

  parallel_for(spec.populations, [&](std::size_t j) {
    const auto tokens = static_cast<Count>(
        std::llround(std::exp(log_lo + sizes.uniform(j) * (log_hi - log_lo))));
    const std::uint64_t pop_seed = derive_seed(spec.seed, j + 1);
    const CounterStream params(pop_seed, kParameterStream);
    FrequencyTable table;
    Count remaining = tokens;
    for (std::size_t c = 0; remaining > 0; ++c) {
      const Count n = std::min(remaining, spec.community_tokens);
      remaining -= n;
      const double q = spec.q_lo == spec.q_hi
                           ? spec.q_lo
                           : draw_log_uniform_rank_q(params.uniform(c), spec.q_lo, spec.q_hi);
      add_into(table, sample(GeometricModel(q), n, derive_seed(pop_seed, c + 1)));
    }
    out.entries[j] = {static_cast<double>(tokens),
                      fit_geometric_semilog(rank(table)).r2};
  });

  out.correlation = size_fit_correlation(out.entries);
  return out;
}

}  // namespace rankfreq
