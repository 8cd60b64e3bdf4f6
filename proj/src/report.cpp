#include "rankfreq/report.hpp"

#include <charconv>
#include <cmath>

#include "rankfreq/error.hpp"

namespace rankfreq {

namespace {

template <class T>
T required(const Json& doc, const char* key) {
  if (!doc.is_object() || !doc.contains(key)) {
    throw Error(ErrorKind::schema, std::string("missing field '") + key + "'");
  }
  try {
    return doc.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::schema, std::string("bad field '") + key + "': " + e.what());
  }
}

// Integral doubles are stored as JSON integers so token counts read naturally.
Json number(double value) {
  if (std::isfinite(value) && value == std::floor(value) && std::abs(value) < 9.0e15) {
    return static_cast<std::int64_t>(value);
  }
  return value;
}

BaseModel base_from_json(const Json& doc) {
  auto model = model_from_json(doc);
  if (auto* g = std::get_if<GeometricModel>(&model)) return *g;
  if (auto* z = std::get_if<ZipfModel>(&model)) return *z;
  throw Error(ErrorKind::schema, "mixture components must be geometric or zipf");
}

BoxStats box_from_json(const Json& doc) {
  return {required<double>(doc, "min"), required<double>(doc, "q1"),
          required<double>(doc, "median"), required<double>(doc, "q3"),
          required<double>(doc, "max")};
}

}  // namespace

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

Json to_json(const GroupKey& key) {
  Json doc = Json::object();
  for (const auto& [name, value] : key.dimensions()) doc[name] = value;
  return doc;
}

Json model_to_json(const ParametricModel& model) {
  Json doc;
  doc["family"] = family_name(model);
  if (const auto* g = std::get_if<GeometricModel>(&model)) {
    doc["q"] = g->q();
    doc["N"] = g->truncation() ? Json(*g->truncation()) : Json(nullptr);
  } else if (const auto* z = std::get_if<ZipfModel>(&model)) {
    doc["s"] = z->s();
    doc["N"] = z->support();
  } else {
    const auto& m = std::get<MixtureModel>(model);
    Json comps = Json::array();
    for (const auto& c : m.components()) comps.push_back(model_to_json(to_parametric(c)));
    doc["components"] = std::move(comps);
    doc["weights"] = m.weights();
    doc["labels"] = to_string(m.sharing());
  }
  return doc;
}

ParametricModel model_from_json(const Json& doc) {
  const auto family = required<std::string>(doc, "family");
  auto truncation = [&]() -> std::optional<Rank> {
    if (!doc.contains("N") || doc["N"].is_null()) return std::nullopt;
    return required<Rank>(doc, "N");
  };
  if (family == "geometric") return GeometricModel(required<double>(doc, "q"), truncation());
  if (family == "zipf") return ZipfModel(required<double>(doc, "s"), required<Rank>(doc, "N"));
  if (family == "mixture") {
    const auto& comps = doc.at("components");
    std::vector<BaseModel> components;
    for (const auto& c : comps) components.push_back(base_from_json(c));
    std::vector<double> weights;
    if (doc.contains("weights")) {
      weights = required<std::vector<double>>(doc, "weights");
    } else {
      weights.assign(components.size(), 1.0 / static_cast<double>(components.size()));
    }
    const auto sharing = doc.contains("labels")
                             ? parse_label_sharing(required<std::string>(doc, "labels"))
                             : LabelSharing::disjoint;
    return MixtureModel(std::move(components), std::move(weights), sharing);
  }
  throw Error(ErrorKind::schema, "unknown model family '" + family + "'");
}

Json to_json(const FitResult& fit) {
  Json doc;
  doc["family"] = to_string(fit.family);
  doc["method"] = to_string(fit.method);
  Json params;
  params[fit.family == Family::geometric ? "q" : "s"] = fit.parameter;
  params["intercept"] = fit.intercept;
  doc["params"] = std::move(params);
  doc["r2"] = fit.r2;
  doc["loglik"] = fit.loglik;
  doc["ks"] = fit.ks;
  doc["degenerate"] = fit.degenerate;
  return doc;
}

FitResult fit_result_from_json(const Json& doc) {
  FitResult fit;
  fit.family = parse_family(required<std::string>(doc, "family"));
  fit.method = parse_fit_mode(required<std::string>(doc, "method"));
  const auto& params = doc.at("params");
  fit.parameter = required<double>(params, fit.family == Family::geometric ? "q" : "s");
  fit.intercept = required<double>(params, "intercept");
  fit.r2 = required<double>(doc, "r2");
  fit.loglik = required<double>(doc, "loglik");
  fit.ks = required<double>(doc, "ks");
  fit.degenerate = required<bool>(doc, "degenerate");
  return fit;
}

Json to_json(const ComparisonReport& report) {
  Json doc;
  doc["mode"] = to_string(report.mode);
  doc["preferred"] = to_string(report.preferred);
  doc["n_types"] = report.n_types;
  doc["n_tokens"] = number(report.n_tokens);
  doc["geometric"] = to_json(report.geometric);
  doc["zipf"] = to_json(report.zipf);
  return doc;
}

ComparisonReport comparison_from_json(const Json& doc) {
  ComparisonReport report;
  report.mode = parse_fit_mode(required<std::string>(doc, "mode"));
  report.preferred = parse_family(required<std::string>(doc, "preferred"));
  report.n_types = required<std::size_t>(doc, "n_types");
  report.n_tokens = required<double>(doc, "n_tokens");
  report.geometric = fit_result_from_json(doc.at("geometric"));
  report.zipf = fit_result_from_json(doc.at("zipf"));
  return report;
}

Json to_json(const BoxStats& stats) {
  Json doc;
  doc["min"] = stats.min;
  doc["q1"] = stats.q1;
  doc["median"] = stats.median;
  doc["q3"] = stats.q3;
  doc["max"] = stats.max;
  return doc;
}

Json to_json(const ExperimentReport& report) {
  Json doc;
  Json comps = Json::array();
  for (std::size_t i = 0; i < report.components.size(); ++i) {
    const auto& c = report.components[i];
    Json entry;
    entry["index"] = i;
    entry["q"] = c.q;
    entry["tokens"] = c.tokens;
    entry["report"] = to_json(c.report);
    comps.push_back(std::move(entry));
  }
  doc["components"] = std::move(comps);
  doc["pooled"] = to_json(report.pooled);
  doc["pooled_tokens"] = report.pooled_tokens;
  Json summary;
  summary["geometric_r2"] = to_json(report.geometric_r2);
  summary["zipf_r2"] = to_json(report.zipf_r2);
  doc["summary"] = std::move(summary);
  return doc;
}

ExperimentReport experiment_from_json(const Json& doc) {
  ExperimentReport report;
  for (const auto& entry : doc.at("components")) {
    report.components.push_back({required<double>(entry, "q"),
                                 required<Count>(entry, "tokens"),
                                 comparison_from_json(entry.at("report"))});
  }
  report.pooled = comparison_from_json(doc.at("pooled"));
  report.pooled_tokens = required<Count>(doc, "pooled_tokens");
  report.geometric_r2 = box_from_json(doc.at("summary").at("geometric_r2"));
  report.zipf_r2 = box_from_json(doc.at("summary").at("zipf_r2"));
  return report;
}

Json to_json(const MixtureExperimentSpec& spec) {
  Json doc;
  doc["components"] = spec.components;
  doc["q_range"] = {spec.q_lo, spec.q_hi};
  doc["law"] = to_string(spec.law);
  doc["tokens"] = spec.tokens.size() == 1 ? Json(spec.tokens.front()) : Json(spec.tokens);
  doc["labels"] = to_string(spec.labels);
  doc["seed"] = spec.seed;
  doc["mode"] = to_string(spec.mode);
  return doc;
}

MixtureExperimentSpec experiment_spec_from_json(const Json& doc) {
  MixtureExperimentSpec spec;
  spec.components = required<std::size_t>(doc, "components");
  const auto range = required<std::vector<double>>(doc, "q_range");
  if (range.size() != 2) throw Error(ErrorKind::schema, "q_range must be [lo, hi]");
  spec.q_lo = range[0];
  spec.q_hi = range[1];
  if (doc.contains("law")) spec.law = parse_heterogeneity_law(required<std::string>(doc, "law"));
  if (doc.contains("tokens")) {
    spec.tokens = doc["tokens"].is_array() ? required<std::vector<Count>>(doc, "tokens")
                                           : std::vector<Count>{required<Count>(doc, "tokens")};
  }
  if (doc.contains("labels")) {
    spec.labels = parse_label_sharing(required<std::string>(doc, "labels"));
  }
  spec.seed = required<std::uint64_t>(doc, "seed");
  if (doc.contains("mode")) spec.mode = parse_fit_mode(required<std::string>(doc, "mode"));
  spec.validate();
  return spec;
}

Json to_json(const CodeStats& stats) {
  Json doc;
  doc["q"] = stats.q;
  doc["m"] = stats.m;
  doc["entropy_bits"] = stats.entropy_bits;
  doc["expected_length_bits"] = stats.expected_length_bits;
  doc["efficiency"] = stats.efficiency;
  return doc;
}

CodeStats code_stats_from_json(const Json& doc) {
  return {required<double>(doc, "q"), required<std::uint64_t>(doc, "m"),
          required<double>(doc, "entropy_bits"), required<double>(doc, "expected_length_bits"),
          required<double>(doc, "efficiency")};
}

void write_pointwise_tsv(std::ostream& out, const PointwiseComparison& cmp) {
  out << "rank\tobserved_prob\tmodel_prob\n";
  for (const auto& row : cmp.rows) {
    out << row.rank << '\t' << format_number(row.observed) << '\t'
        << format_number(row.model) << '\n';
  }
}

void write_trajectory_tsv(std::ostream& out, std::span<const TrajectoryPoint> points,
                          std::optional<double> correlation) {
  out << "step\tpopulation\tentropy_bits\tperplexity\tgeometric_r2\tzipf_r2\n";
  for (const auto& p : points) {
    out << p.step << '\t' << format_number(p.population) << '\t'
        << format_number(p.entropy_bits) << '\t' << format_number(p.perplexity) << '\t'
        << format_number(p.report.geometric.r2) << '\t' << format_number(p.report.zipf.r2)
        << '\n';
  }
  if (correlation) {
    out << "# pearson_population_perplexity\t" << format_number(*correlation) << '\n';
  }
}

void write_experiment_tsv(std::ostream& out, const ExperimentReport& report) {
  out << "component\tq\ttokens\tgeometric_r2\tzipf_r2\tpreferred\n";
  for (std::size_t i = 0; i < report.components.size(); ++i) {
    const auto& c = report.components[i];
    out << i << '\t' << format_number(c.q) << '\t' << c.tokens << '\t'
        << format_number(c.report.geometric.r2) << '\t' << format_number(c.report.zipf.r2)
        << '\t' << to_string(c.report.preferred) << '\n';
  }
  out << "pooled\t\t" << report.pooled_tokens << '\t'
      << format_number(report.pooled.geometric.r2) << '\t'
      << format_number(report.pooled.zipf.r2) << '\t' << to_string(report.pooled.preferred)
      << '\n';
}

}  // namespace rankfreq
