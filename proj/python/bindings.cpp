#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "rankfreq/core.hpp"
#include "rankfreq/error.hpp"
#include "rankfreq/fit.hpp"
#include "rankfreq/golomb.hpp"
#include "rankfreq/infometrics.hpp"
#include "rankfreq/mixlab.hpp"
#include "rankfreq/models.hpp"
#include "rankfreq/report.hpp"

namespace py = pybind11;
using namespace rankfreq;

namespace {

py::object to_python(const Json& doc) {
  return py::module_::import("json").attr("loads")(doc.dump());
}

// The model variants have no default state, so pybind11's variant caster
// cannot be used; dispatch on the bound class instead.
BaseModel as_base(py::handle h) {
  if (py::isinstance<GeometricModel>(h)) return h.cast<GeometricModel>();
  if (py::isinstance<ZipfModel>(h)) return h.cast<ZipfModel>();
  throw py::type_error("expected GeometricModel or ZipfModel");
}

ParametricModel as_model(py::handle h) {
  if (py::isinstance<MixtureModel>(h)) return h.cast<MixtureModel>();
  return to_parametric(as_base(h));
}

}  // namespace

PYBIND11_MODULE(_rankfreq, m) {
  m.doc() = "Rank-frequency fits, entropy, mixture experiments and Golomb coding";

  static py::exception<Error> error_type(m, "RankfreqError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      PyErr_SetString(error_type.ptr(), e.what());
    }
  });

  // core
  py::class_<FrequencyTable>(m, "FrequencyTable")
      .def(py::init([](const std::map<std::string, Count>& entries) {
             return FrequencyTable(FrequencyTable::Entries(entries.begin(), entries.end()));
           }),
           py::arg("entries"))
      .def_property_readonly("entries", &FrequencyTable::entries)
      .def_property_readonly("total_tokens", &FrequencyTable::total_tokens)
      .def_property_readonly("group",
                             [](const FrequencyTable& t) -> std::optional<std::string> {
                               if (!t.group()) return std::nullopt;
                               return t.group()->to_string();
                             })
      .def("__len__", &FrequencyTable::size)
      .def("__eq__", [](const FrequencyTable& a, const FrequencyTable& b) { return a == b; });

  py::class_<RankedDistribution>(m, "RankedDistribution")
      .def_static("from_frequencies", &RankedDistribution::from_frequencies,
                  py::arg("frequencies"), py::arg("labels") = std::vector<std::string>{})
      .def_property_readonly("labels",
                             [](const RankedDistribution& d) {
                               return std::vector<std::string>(d.labels().begin(), d.labels().end());
                             })
      .def_property_readonly("counts",
                             [](const RankedDistribution& d) {
                               return std::vector<double>(d.counts().begin(), d.counts().end());
                             })
      .def_property_readonly("probs",
                             [](const RankedDistribution& d) {
                               return std::vector<double>(d.probs().begin(), d.probs().end());
                             })
      .def_property_readonly("total_tokens", &RankedDistribution::total_tokens)
      .def("__len__", &RankedDistribution::size);

  m.def(
      "load_counts",
      [](const std::string& text, const std::string& schema) {
        std::istringstream in(text);
        return load_counts(in, Schema::parse(schema));
      },
      py::arg("text"), py::arg("schema") = "type,count");
  m.def("count_conditioned_tokens", [](const std::vector<ConditionedToken>& tokens) {
    return count_conditioned_tokens(tokens);
  });
  m.def("filter_min_count", &filter_min_count, py::arg("table"), py::arg("threshold"));
  m.def("rank", &rank, py::arg("table"));

  // models
  py::class_<GeometricModel>(m, "GeometricModel")
      .def(py::init<double, std::optional<Rank>>(), py::arg("q"), py::arg("N") = std::nullopt)
      .def_property_readonly("q", &GeometricModel::q)
      .def_property_readonly("N", &GeometricModel::truncation);
  py::class_<ZipfModel>(m, "ZipfModel")
      .def(py::init<double, Rank>(), py::arg("s"), py::arg("N"))
      .def_property_readonly("s", &ZipfModel::s)
      .def_property_readonly("N", &ZipfModel::support);
  py::class_<MixtureModel>(m, "MixtureModel")
      .def(py::init([](const py::list& items, std::vector<double> weights, bool shared) {
             std::vector<BaseModel> components;
             for (auto item : items) components.push_back(as_base(item));
             return MixtureModel(std::move(components), std::move(weights),
                                 shared ? LabelSharing::shared : LabelSharing::disjoint);
           }),
           py::arg("components"), py::arg("weights"), py::arg("shared_labels") = false);

  m.def(
      "pmf", [](py::handle model, Rank r) { return pmf(as_model(model), r); },
      py::arg("model"), py::arg("rank"));
  m.def(
      "cdf", [](py::handle model, Rank r) { return cdf(as_model(model), r); },
      py::arg("model"), py::arg("rank"));
  m.def(
      "model_entropy", [](py::handle model) { return model_entropy(as_model(model)); },
      py::arg("model"));
  m.def(
      "sample",
      [](py::handle model, Count n, std::uint64_t seed) {
        return sample(as_model(model), n, seed);
      },
      py::arg("model"), py::arg("n_tokens"), py::arg("seed"));
  m.def("solve_geometric_for_entropy", &solve_geometric_for_entropy, py::arg("target_bits"));

  // fit
  py::class_<FitResult>(m, "FitResult")
      .def_property_readonly("family", [](const FitResult& f) { return to_string(f.family); })
      .def_property_readonly("method", [](const FitResult& f) { return to_string(f.method); })
      .def_readonly("parameter", &FitResult::parameter)
      .def_readonly("intercept", &FitResult::intercept)
      .def_readonly("r2", &FitResult::r2)
      .def_readonly("loglik", &FitResult::loglik)
      .def_readonly("ks", &FitResult::ks)
      .def_readonly("degenerate", &FitResult::degenerate)
      .def("to_dict", [](const FitResult& f) { return to_python(to_json(f)); });
  py::class_<ComparisonReport>(m, "ComparisonReport")
      .def_readonly("geometric", &ComparisonReport::geometric)
      .def_readonly("zipf", &ComparisonReport::zipf)
      .def_property_readonly("preferred",
                             [](const ComparisonReport& r) { return to_string(r.preferred); })
      .def_readonly("n_types", &ComparisonReport::n_types)
      .def_readonly("n_tokens", &ComparisonReport::n_tokens)
      .def("to_dict", [](const ComparisonReport& r) { return to_python(to_json(r)); });

  m.def("fit_geometric_semilog",
        [](const RankedDistribution& d) { return fit_geometric_semilog(d); });
  m.def("fit_zipf_loglog", [](const RankedDistribution& d) { return fit_zipf_loglog(d); });
  m.def("fit_geometric_mle", [](const RankedDistribution& d) { return fit_geometric_mle(d); });
  m.def("fit_zipf_mle", [](const RankedDistribution& d) { return fit_zipf_mle(d); });
  m.def(
      "ks_distance",
      [](const RankedDistribution& d, py::handle model) { return ks_distance(d, as_model(model)); },
      py::arg("dist"), py::arg("model"));
  m.def(
      "compare",
      [](const RankedDistribution& d, const std::string& mode) {
        return compare(d, parse_fit_mode(mode));
      },
      py::arg("dist"), py::arg("mode") = "regression");
  m.def("pearson", [](const std::vector<double>& xs, const std::vector<double>& ys) {
    return pearson(xs, ys);
  });

  // infometrics
  m.def("empirical_entropy", &empirical_entropy, py::arg("dist"));
  m.def("perplexity", &perplexity, py::arg("dist"));
  m.def("normalize_for_comparison", &normalize_for_comparison);
  m.def("pointwise_compare", [](const RankedDistribution& d, py::handle model) {
    const auto cmp = pointwise_compare(d, as_model(model));
    py::list rows;
    for (const auto& r : cmp.rows) rows.append(py::make_tuple(r.rank, r.observed, r.model));
    py::dict out;
    out["rows"] = rows;
    out["observed_entropy_bits"] = cmp.observed_entropy_bits;
    out["model_entropy_bits"] = cmp.model_entropy_bits;
    out["model_support_entropy_bits"] = cmp.model_support_entropy_bits;
    return out;
  });

  // mixlab
  m.def("pool", [](const std::vector<FrequencyTable>& tables) { return pool(tables); });
  m.def(
      "run_mixture_experiment",
      [](std::size_t k, double q_lo, double q_hi, std::vector<Count> tokens,
         const std::string& labels, std::uint64_t seed, const std::string& law,
         const std::string& mode) {
        MixtureExperimentSpec spec;
        spec.components = k;
        spec.q_lo = q_lo;
        spec.q_hi = q_hi;
        spec.tokens = std::move(tokens);
        spec.labels = parse_label_sharing(labels);
        spec.seed = seed;
        spec.law = parse_heterogeneity_law(law);
        spec.mode = parse_fit_mode(mode);
        return to_python(to_json(run_mixture_experiment(spec)));
      },
      py::arg("k"), py::arg("q_lo"), py::arg("q_hi"), py::arg("tokens"),
      py::arg("labels") = "disjoint", py::kw_only(), py::arg("seed"),
      py::arg("law") = "log_uniform_rank", py::arg("mode") = "regression");

  // golomb
  py::class_<GolombCode>(m, "GolombCode")
      .def(py::init<std::uint64_t>(), py::arg("m"))
      .def_property_readonly("m", &GolombCode::m)
      .def("encode", &GolombCode::encode, py::arg("rank"))
      .def("decode",
           [](const GolombCode& c, const std::string& bits) {
             const auto d = c.decode(bits);
             return py::make_tuple(d.rank, d.consumed);
           })
      .def("codeword_length", &GolombCode::codeword_length, py::arg("rank"));
  m.def("optimal_m", &optimal_m, py::arg("q"));
  m.def(
      "expected_length",
      [](py::handle model, const GolombCode& code) {
        return expected_length(as_model(model), code);
      },
      py::arg("model"), py::arg("code"));
  m.def(
      "code_stats",
      [](py::handle model, const GolombCode& code) {
        return to_python(to_json(code_stats(as_model(model), code)));
      },
      py::arg("model"), py::arg("code"));
}
