#include <cmath>
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "rankfreq/fit.hpp"
#include "rankfreq/mixlab.hpp"

using namespace rankfreq;

namespace {

FrequencyTable random_table(std::mt19937_64& rng) {
  FrequencyTable::Entries e;
  for (int i = 0; i < 20; ++i) e["t" + std::to_string(rng() % 40)] += 1 + rng() % 9;
  return FrequencyTable(e);
}

MixtureExperimentSpec small_spec(std::uint64_t seed) {
  MixtureExperimentSpec spec;
  spec.components = 8;
  spec.q_lo = 0.7;
  spec.q_hi = 0.999;
  spec.tokens = {20000};
  spec.seed = seed;
  return spec;
}

}  // namespace

TEST_CASE("pool is associative and commutative and conserves tokens") {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 30; ++trial) {
    const auto a = random_table(rng), b = random_table(rng), c = random_table(rng);
    const std::vector<FrequencyTable> ab{a, b}, ba{b, a}, bc{b, c};
    const std::vector<FrequencyTable> left{pool(ab), c}, right{a, pool(bc)}, all{a, b, c};
    CHECK(pool(ab) == pool(ba));
    CHECK(pool(left) == pool(right));
    CHECK(pool(all).total_tokens() == a.total_tokens() + b.total_tokens() + c.total_tokens());
  }
  FrequencyTable x({{"a", 1}}, GroupKey(std::vector<GroupKey::Dimension>{{"g", "1"}}));
  FrequencyTable y({{"b", 2}});
  const std::vector<FrequencyTable> xy{x, y};
  CHECK(pool(xy).size() == 2);
  CHECK_FALSE(pool(xy).group());
  CHECK(error_kind([] { pool({}); }) == ErrorKind::empty_input);
}

TEST_CASE("pooling same-model samples preserves the model") {
  const ParametricModel model = GeometricModel(0.85);
  std::vector<FrequencyTable> parts;
  for (std::uint64_t i = 0; i < 10; ++i) parts.push_back(sample(model, 100000, 500 + i));
  const auto pooled = rank(pool(parts));
  CHECK(pooled.total_tokens() == 1000000);
  CHECK(ks_distance(pooled, model) <= 0.005);
}

TEST_CASE("cumulative aggregate") {
  std::vector<FrequencyTable> parts;
  for (std::uint64_t i = 0; i < 4; ++i) parts.push_back(sample(GeometricModel(0.8), 5000, i));
  const auto steps = cumulative_aggregate(parts);
  REQUIRE(steps.size() == 4);
  CHECK(steps[0].step == 1);
  CHECK(steps[0].step_report == steps[0].cumulative_report);
  CHECK(steps[3].cumulative_report.n_tokens == 20000);
  CHECK(steps[3].step_report.n_tokens == 5000);
}

TEST_CASE("box stats interpolate linearly") {
  const auto b = box_stats({4, 1, 3, 2});
  CHECK(b.min == 1);
  CHECK(b.q1 == doctest::Approx(1.75));
  CHECK(b.median == doctest::Approx(2.5));
  CHECK(b.q3 == doctest::Approx(3.25));
  CHECK(b.max == 4);
  CHECK(box_stats({7}).median == 7);
  CHECK(error_kind([] { box_stats({}); }) == ErrorKind::empty_input);
}

TEST_CASE("experiment spec validation") {
  MixtureExperimentSpec spec;
  spec.components = 3;
  spec.tokens = {10, 20, 30};
  CHECK_NOTHROW(spec.validate());
  CHECK(spec.tokens_for(2) == 30);
  spec.tokens = {10, 20};
  CHECK(error_kind([&] { spec.validate(); }) == ErrorKind::domain);
  spec.tokens = {0};
  CHECK(error_kind([&] { spec.validate(); }) == ErrorKind::domain);
  spec.tokens = {10};
  CHECK(spec.tokens_for(2) == 10);
  spec.q_lo = 0.9;
  spec.q_hi = 0.8;
  CHECK(error_kind([&] { spec.validate(); }) == ErrorKind::domain);
  spec.q_hi = 1.0;
  CHECK(error_kind([&] { spec.validate(); }) == ErrorKind::domain);
  spec = {};
  spec.components = 0;
  CHECK(error_kind([&] { spec.validate(); }) == ErrorKind::domain);
  CHECK(parse_heterogeneity_law("uniform_q") == HeterogeneityLaw::uniform_q);
  CHECK(parse_label_sharing("shared") == LabelSharing::shared);
  CHECK(error_kind([] { parse_label_sharing("both"); }) == ErrorKind::domain);
}

TEST_CASE("component decay ratios") {
  MixtureExperimentSpec spec;
  spec.components = 2000;
  spec.q_lo = 0.5;
  spec.q_hi = 0.99;
  spec.seed = 77;
  // log expected rank should be uniform between log 2 and log 100.
  double mean_log_rank = 0;
  for (std::size_t i = 0; i < spec.components; ++i) {
    const double q = component_q(spec, i);
    CHECK(q >= 0.5);
    CHECK(q <= 0.99);
    CHECK(q == component_q(spec, i));
    mean_log_rank += std::log(1 / (1 - q));
  }
  mean_log_rank /= spec.components;
  CHECK(mean_log_rank == doctest::Approx((std::log(2.0) + std::log(100.0)) / 2).epsilon(0.02));

  spec.law = HeterogeneityLaw::uniform_q;
  double mean_q = 0;
  for (std::size_t i = 0; i < spec.components; ++i) mean_q += component_q(spec, i);
  CHECK(mean_q / spec.components == doctest::Approx(0.745).epsilon(0.02));

  spec.q_lo = spec.q_hi = 0.8;
  CHECK(component_q(spec, 5) == 0.8);
}

TEST_CASE("mixture experiment is deterministic and reports every component") {
  const auto a = run_mixture_experiment(small_spec(3));
  const auto b = run_mixture_experiment(small_spec(3));
  CHECK(a == b);
  REQUIRE(a.components.size() == 8);
  CHECK(a.pooled_tokens == 160000);
  for (std::size_t i = 0; i < 8; ++i) {
    CHECK(a.components[i].tokens == 20000);
    CHECK(a.components[i].q == component_q(small_spec(3), i));
  }
  CHECK(a.geometric_r2.median >= a.geometric_r2.min);
  CHECK_FALSE(run_mixture_experiment(small_spec(4)) == a);

  auto shared = small_spec(3);
  shared.labels = LabelSharing::shared;
  const auto s = run_mixture_experiment(shared);
  CHECK(s.pooled.n_types < a.pooled.n_types);
}

TEST_CASE("heterogeneous pools turn power-law, homogeneous ones do not") {
  int emerged = 0, control = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    MixtureExperimentSpec spec;
    spec.components = 51;
    spec.q_lo = 0.7;
    spec.q_hi = 0.99995;
    spec.tokens = {100000};
    spec.seed = seed;
    const auto het = run_mixture_experiment(spec);
    emerged += het.pooled.zipf.r2 > het.pooled.geometric.r2 &&
               het.geometric_r2.median > het.zipf_r2.median;
    spec.q_lo = spec.q_hi = 0.9;
    const auto hom = run_mixture_experiment(spec);
    control += hom.pooled.zipf.r2 <= hom.pooled.geometric.r2;
  }
  CHECK(emerged == 5);
  CHECK(control == 5);
}

TEST_CASE("population size against geometric fit") {
  const std::vector<SizeFit> entries{{10, 0.99}, {100, 0.95}, {1000, 0.9}};
  CHECK(size_fit_correlation(entries) < -0.9);
  const std::vector<SizeFit> two{{1, 1}, {2, 2}};
  CHECK(error_kind([&] { size_fit_correlation(two); }) == ErrorKind::insufficient_data);

  SizeFitExperimentSpec spec;
  spec.seed = 1;
  const auto a = run_size_fit_experiment(spec);
  REQUIRE(a.entries.size() == 51);
  for (const auto& e : a.entries) {
    CHECK(e.population >= 1000);
    CHECK(e.population <= 1000000);
  }
  CHECK(a.correlation < 0.0);
  CHECK(run_size_fit_experiment(spec).correlation == a.correlation);
  spec.populations = 2;
  CHECK(error_kind([&] { run_size_fit_experiment(spec); }) == ErrorKind::domain);
}

TEST_CASE("worked pooling examples") {
  const std::vector<FrequencyTable> same{FrequencyTable({{"a", 1}}), FrequencyTable({{"a", 2}})};
  CHECK(pool(same).entries() == FrequencyTable::Entries{{"a", 3}});
  const std::vector<FrequencyTable> diff{FrequencyTable({{"a", 1}}), FrequencyTable({{"b", 2}})};
  CHECK(pool(diff).entries() == FrequencyTable::Entries{{"a", 1}, {"b", 2}});

  const std::vector<FrequencyTable> single{FrequencyTable({{"a", 5}, {"b", 3}, {"c", 1}})};
  const auto steps = cumulative_aggregate(single);
  CHECK(steps[0].step_report == steps[0].cumulative_report);

  const std::vector<SizeFit> anti{{1, 3}, {2, 2}, {3, 1}};
  CHECK(size_fit_correlation(anti) == doctest::Approx(-1.0));
  const std::vector<SizeFit> equal_sizes{{5, 0.9}, {5, 0.8}, {5, 0.7}};
  CHECK(error_kind([&] { size_fit_correlation(equal_sizes); }) == ErrorKind::undefined_correlation);
}

TEST_CASE("same-model samples keep the geometric fit as they pool") {
  std::vector<FrequencyTable> parts;
  for (std::uint64_t i = 0; i < 10; ++i) parts.push_back(sample(GeometricModel(0.9), 100000, 60 + i));
  const auto steps = cumulative_aggregate(parts);
  std::vector<double> step_r2;
  for (const auto& s : steps) step_r2.push_back(s.step_report.geometric.r2);
  const double median = box_stats(step_r2).median;
  for (const auto& s : steps) CHECK(s.cumulative_report.geometric.r2 >= median - 0.01);
}

TEST_CASE("pooled drift turns power-law only when it spans the sample scale") {
  auto final_report = [](double e_lo, double e_hi, bool disjoint) {
    std::vector<FrequencyTable> parts;
    for (std::uint64_t i = 0; i < 10; ++i) {
      const double e = e_lo * std::pow(e_hi / e_lo, i / 9.0);
      parts.push_back(sample(GeometricModel(1 - 1 / e), 100000, 90 + i,
                             disjoint ? "s" + std::to_string(i) + "." : ""));
    }
    return cumulative_aggregate(parts).back().cumulative_report;
  };
  // q from 0.75 to 0.95 is expected rank 4 to 20: the pool stays geometric.
  for (bool disjoint : {true, false}) {
    const auto narrow = final_report(4, 20, disjoint);
    CHECK(narrow.geometric.r2 > narrow.zipf.r2);
  }
  const auto wide = final_report(4, 20000, false);
  CHECK(wide.zipf.r2 > wide.geometric.r2);
}
