#include <cmath>
#include <limits>
#include <sstream>

#include "doctest.h"
#include "helpers.hpp"
#include "rankfreq/report.hpp"

using namespace rankfreq;

namespace {

template <class T, class From>
T reparse(const Json& doc, From from) {
  return from(Json::parse(doc.dump()));
}

}  // namespace

TEST_CASE("numbers print in shortest round-trip form") {
  CHECK(format_number(5.0) == "5");
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(-2.5e-7) == "-2.5e-07");
  CHECK(format_number(std::nan("")) == "nan");
  CHECK(format_number(-std::numeric_limits<double>::infinity()) == "-inf");
  const double x = 0.1 + 0.2;
  CHECK(std::stod(format_number(x)) == x);
}

TEST_CASE("models round trip through json") {
  const std::vector<ParametricModel> models = {
      GeometricModel(0.8), GeometricModel(0.8, Rank{12}), ZipfModel(1.07, 400),
      MixtureModel({GeometricModel(0.5), ZipfModel(1.0, 9)}, {0.3, 0.7}, LabelSharing::shared)};
  for (const auto& m : models) {
    const auto back = reparse<ParametricModel>(model_to_json(m), model_from_json);
    CHECK(back == m);
  }
  CHECK(model_to_json(GeometricModel(0.8)).dump() == R"({"family":"geometric","q":0.8,"N":null})");
  const auto mix = model_from_json(Json::parse(
      R"({"family":"mixture","components":[{"family":"geometric","q":0.5},{"family":"geometric","q":0.9}]})"));
  CHECK(std::get<MixtureModel>(mix).weights() == std::vector<double>{0.5, 0.5});
  CHECK(error_kind([] { model_from_json(Json::parse(R"({"family":"lognormal"})")); }) ==
        ErrorKind::schema);
  CHECK(error_kind([] { model_from_json(Json::parse(R"({"family":"zipf","s":1})")); }) ==
        ErrorKind::schema);
  CHECK(error_kind([] { model_from_json(Json::parse(R"({"family":"geometric","q":"x"})")); }) ==
        ErrorKind::schema);
  CHECK(error_kind([] { model_from_json(Json::parse(R"({"family":"geometric","q":2})")); }) ==
        ErrorKind::domain);
}

TEST_CASE("reports round trip through json") {
  const auto d = rank(sample(ZipfModel(1.0, 300), 20000, 5));
  for (auto mode : {FitMode::regression, FitMode::mle}) {
    const auto report = compare(d, mode);
    CHECK(reparse<ComparisonReport>(to_json(report), comparison_from_json) == report);
    CHECK(reparse<FitResult>(to_json(report.zipf), fit_result_from_json) == report.zipf);
  }
  const auto doc = to_json(compare(d, FitMode::regression));
  CHECK(doc["n_tokens"].is_number_integer());
  CHECK(doc["geometric"]["params"].contains("q"));
  CHECK(doc["zipf"]["params"].contains("s"));

  MixtureExperimentSpec spec;
  spec.components = 3;
  spec.tokens = {1000, 2000, 3000};
  spec.seed = 9;
  spec.labels = LabelSharing::shared;
  CHECK(reparse<MixtureExperimentSpec>(to_json(spec), experiment_spec_from_json) == spec);
  const auto exp = run_mixture_experiment(spec);
  CHECK(reparse<ExperimentReport>(to_json(exp), experiment_from_json) == exp);

  const auto stats = geometric_code_stats(0.9);
  CHECK(reparse<CodeStats>(to_json(stats), code_stats_from_json) == stats);
  CHECK(to_json(GroupKey({{"region", "DE"}, {"decade", "1910"}})).dump() ==
        R"({"region":"DE","decade":"1910"})");
}

TEST_CASE("tsv writers") {
  const auto d = RankedDistribution::from_frequencies({3, 1});
  std::ostringstream pw;
  write_pointwise_tsv(pw, pointwise_compare(d, ZipfModel(0.0, 2)));
  CHECK(pw.str() == "rank\tobserved_prob\tmodel_prob\n1\t0.75\t0.5\n2\t0.25\t0.5\n");

  const std::vector<FrequencyTable> tables(3, FrequencyTable({{"a", 4}, {"b", 2}, {"c", 1}}));
  const auto points = trajectory(tables);
  std::ostringstream tr;
  write_trajectory_tsv(tr, points, 0.5);
  const auto text = tr.str();
  CHECK(text.rfind("step\tpopulation\tentropy_bits\tperplexity\tgeometric_r2\tzipf_r2\n1\t7\t", 0) == 0);
  CHECK(text.find("\n3\t21\t") != std::string::npos);
  const std::string footer = "# pearson_population_perplexity\t0.5\n";
  CHECK(text.substr(text.size() - footer.size()) == footer);

  MixtureExperimentSpec spec;
  spec.components = 2;
  spec.tokens = {500};
  const auto exp = run_mixture_experiment(spec);
  std::ostringstream ex;
  write_experiment_tsv(ex, exp);
  const auto etext = ex.str();
  CHECK(etext.rfind("component\tq\ttokens\tgeometric_r2\tzipf_r2\tpreferred\n0\t", 0) == 0);
  CHECK(etext.find("\npooled\t\t1000\t") != std::string::npos);
}
