#include "rankfreq/cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "rankfreq/core.hpp"
#include "rankfreq/error.hpp"
#include "rankfreq/fit.hpp"
#include "rankfreq/golomb.hpp"
#include "rankfreq/infometrics.hpp"
#include "rankfreq/mixlab.hpp"
#include "rankfreq/models.hpp"
#include "rankfreq/report.hpp"

namespace rankfreq {

namespace {

struct RunConfig {
  std::vector<std::string> inputs;
  std::string schema = "type,count";
  Count min_count = 1;
  std::string mode;
  std::string r2_space = "transformed";
  std::string transform;
  std::optional<std::uint64_t> seed;
  std::string format;  // empty: the subcommand's default
  std::string output;

  // simulate
  std::optional<std::size_t> k;
  std::string q_range = "0.7:0.98";
  std::string tokens = "100000";
  std::string labels = "disjoint";
  std::string law = "log_uniform_rank";
  std::string spec_file;
  std::string model_file;

  // trajectory
  std::string population;

  // plotdata
  std::string with_model;

  // code
  std::optional<double> q;
  std::optional<std::uint64_t> m;
};

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(text);
  while (std::getline(in, cur, sep)) parts.push_back(cur);
  return parts;
}

double parse_double(const std::string& text, const char* what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorKind::domain, std::string("bad ") + what + " '" + text + "'");
  }
}

Count parse_count_flag(const std::string& text, const char* what) {
  try {
    std::size_t used = 0;
    const auto v = std::stoull(text, &used);
    if (used != text.size() || text.front() == '-') throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorKind::domain, std::string("bad ") + what + " '" + text + "'");
  }
}

std::string read_file(const std::string& path) {
  if (path == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::empty_input, "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json read_json(const std::string& path) {
  const auto text = read_file(path);
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::parse, "'" + path + "' is not valid JSON: " + e.what());
  }
}

std::vector<FrequencyTable> load_file(const std::string& path, const Schema& schema) {
  std::istringstream in(read_file(path));
  return load_counts(in, schema);
}

const std::string& single_input(const RunConfig& cfg) {
  if (cfg.inputs.size() != 1) throw Error(ErrorKind::domain, "expected exactly one --input");
  return cfg.inputs.front();
}

// Tables of one input file, each filtered by the minimum count.
std::vector<FrequencyTable> load_filtered(const RunConfig& cfg) {
  auto tables = load_file(single_input(cfg), Schema::parse(cfg.schema));
  for (auto& t : tables) t = filter_min_count(t, cfg.min_count);
  return tables;
}

// One step table per input file; a file with several groups is pooled.
std::vector<FrequencyTable> load_steps(const RunConfig& cfg) {
  if (cfg.inputs.empty()) throw Error(ErrorKind::domain, "expected at least one --input");
  const auto schema = Schema::parse(cfg.schema);
  std::vector<FrequencyTable> steps;
  if (cfg.inputs.size() == 1 && !schema.group_columns.empty()) {
    for (auto& t : load_file(cfg.inputs.front(), schema)) {
      steps.push_back(filter_min_count(t, cfg.min_count));
    }
    return steps;
  }
  for (const auto& path : cfg.inputs) {
    steps.push_back(filter_min_count(pool(load_file(path, schema)), cfg.min_count));
  }
  return steps;
}

Json group_json(const FrequencyTable& t) {
  return t.group() ? to_json(*t.group()) : Json(nullptr);
}

std::string group_text(const FrequencyTable& t) {
  return t.group() ? t.group()->to_string() : "";
}

std::vector<FitMode> modes_for(const std::string& mode, const char* fallback) {
  const std::string m = mode.empty() ? fallback : mode;
  if (m == "both") return {FitMode::regression, FitMode::mle};
  return {parse_fit_mode(m)};
}

void check_format(const RunConfig& cfg) {
  if (cfg.format != "json" && cfg.format != "tsv") {
    throw Error(ErrorKind::domain, "format must be json or tsv");
  }
}

std::string dump(const Json& doc) { return doc.dump(2) + "\n"; }

const char* kComparisonTsvHeader =
    "group\tmode\tn_types\tn_tokens\tgeometric_param\tgeometric_r2\tgeometric_loglik\t"
    "geometric_ks\tzipf_param\tzipf_r2\tzipf_loglik\tzipf_ks\tpreferred";

void comparison_tsv_row(std::ostream& out, const std::string& group,
                        const ComparisonReport& r) {
  out << group << '\t' << to_string(r.mode) << '\t' << r.n_types << '\t'
      << format_number(r.n_tokens);
  for (const auto* f : {&r.geometric, &r.zipf}) {
    out << '\t' << format_number(f->parameter) << '\t' << format_number(f->r2) << '\t'
        << format_number(f->loglik) << '\t' << format_number(f->ks);
  }
  out << '\t' << to_string(r.preferred) << '\n';
}

// ---------------------------------------------------------------------------
// Subcommands. Each returns the primary output as a string.

std::string cmd_fit(const RunConfig& cfg, bool full) {
  check_format(cfg);
  const auto space = parse_r2_space(cfg.r2_space);
  const auto modes = modes_for(cfg.mode, full ? "both" : "regression");
  const auto tables = load_filtered(cfg);

  std::ostringstream tsv;
  tsv << (full ? std::string(kComparisonTsvHeader) + "\tentropy_bits\tperplexity"
               : std::string(kComparisonTsvHeader))
      << '\n';
  Json results = Json::array();
  for (const auto& t : tables) {
    const auto dist = rank(t);
    Json entry;
    entry["group"] = group_json(t);
    const double h = empirical_entropy(dist);
    if (full) {
      entry["n_types"] = dist.size();
      entry["n_tokens"] = t.total_tokens();
      entry["entropy_bits"] = h;
      entry["perplexity"] = std::exp2(h);
    }
    for (auto mode : modes) {
      const auto report = compare(dist, mode, space);
      if (full) {
        entry[to_string(mode)] = to_json(report);
      } else {
        entry["report"] = to_json(report);
      }
      std::ostringstream row;
      comparison_tsv_row(row, group_text(t), report);
      std::string line = row.str();
      if (full) {
        line.pop_back();
        line += "\t" + format_number(h) + "\t" + format_number(std::exp2(h)) + "\n";
      }
      tsv << line;
    }
    results.push_back(std::move(entry));
  }
  if (cfg.format == "tsv") return tsv.str();
  Json doc;
  doc["results"] = std::move(results);
  return dump(doc);
}

std::string cmd_entropy(const RunConfig& cfg) {
  check_format(cfg);
  const auto tables = load_filtered(cfg);
  std::ostringstream tsv;
  tsv << "group\tn_types\tn_tokens\tentropy_bits\tperplexity\n";
  Json results = Json::array();
  for (const auto& t : tables) {
    const auto dist = rank(t);
    const double h = empirical_entropy(dist);
    Json entry;
    entry["group"] = group_json(t);
    entry["n_types"] = dist.size();
    entry["n_tokens"] = t.total_tokens();
    entry["entropy_bits"] = h;
    entry["perplexity"] = std::exp2(h);
    results.push_back(std::move(entry));
    tsv << group_text(t) << '\t' << dist.size() << '\t' << t.total_tokens() << '\t'
        << format_number(h) << '\t' << format_number(std::exp2(h)) << '\n';
  }
  if (cfg.format == "tsv") return tsv.str();
  Json doc;
  doc["results"] = std::move(results);
  return dump(doc);
}

MixtureExperimentSpec spec_from_flags(const RunConfig& cfg) {
  if (!cfg.spec_file.empty()) {
    auto doc = read_json(cfg.spec_file);
    if (cfg.seed) doc["seed"] = *cfg.seed;
    if (!doc.contains("seed")) {
      throw Error(ErrorKind::domain, "simulate requires an explicit seed");
    }
    return experiment_spec_from_json(doc);
  }
  if (!cfg.seed) throw Error(ErrorKind::domain, "simulate requires --seed");
  MixtureExperimentSpec spec;
  spec.components = cfg.k.value_or(1);
  const auto range = split(cfg.q_range, ':');
  if (range.size() == 1) {
    spec.q_lo = spec.q_hi = parse_double(range[0], "q range");
  } else if (range.size() == 2) {
    spec.q_lo = parse_double(range[0], "q range");
    spec.q_hi = parse_double(range[1], "q range");
  } else {
    throw Error(ErrorKind::domain, "q range must be lo:hi");
  }
  spec.tokens.clear();
  for (const auto& t : split(cfg.tokens, ',')) spec.tokens.push_back(parse_count_flag(t, "tokens"));
  spec.labels = parse_label_sharing(cfg.labels);
  spec.law = parse_heterogeneity_law(cfg.law);
  spec.seed = *cfg.seed;
  spec.mode = parse_fit_mode(cfg.mode.empty() ? "regression" : cfg.mode);
  spec.validate();
  return spec;
}

// Samples a single model document into a type/count table.
std::string sample_model(const RunConfig& cfg) {
  const auto doc = read_json(cfg.model_file);
  const auto model = model_from_json(doc);
  std::optional<std::uint64_t> seed = cfg.seed;
  if (!seed && doc.contains("seed")) seed = doc["seed"].get<std::uint64_t>();
  if (!seed) throw Error(ErrorKind::domain, "sampling requires an explicit seed");
  Count n = parse_count_flag(cfg.tokens, "tokens");
  if (n == 0) throw Error(ErrorKind::domain, "tokens must be >= 1");
  const auto table = sample(model, n, *seed);
  const auto dist = rank(table);
  std::ostringstream out;
  out << "type\tcount\n";
  for (std::size_t r = 1; r <= dist.size(); ++r) {
    out << dist.labels()[r - 1] << '\t' << format_number(dist.count_at(r)) << '\n';
  }
  return out.str();
}

std::string cmd_simulate(const RunConfig& cfg) {
  check_format(cfg);
  if (!cfg.model_file.empty()) return sample_model(cfg);
  const auto spec = spec_from_flags(cfg);
  const auto report = run_mixture_experiment(spec);
  if (cfg.format == "tsv") {
    std::ostringstream out;
    write_experiment_tsv(out, report);
    return out.str();
  }
  Json doc;
  doc["spec"] = to_json(spec);
  doc["report"] = to_json(report);
  return dump(doc);
}

std::string cmd_aggregate(const RunConfig& cfg) {
  check_format(cfg);
  const auto steps = cumulative_aggregate(load_steps(cfg),
                                          parse_fit_mode(cfg.mode.empty() ? "regression" : cfg.mode));
  if (cfg.format == "tsv") {
    std::ostringstream out;
    out << "step\tstep_geometric_r2\tstep_zipf_r2\tcumulative_geometric_r2\t"
           "cumulative_zipf_r2\tcumulative_preferred\n";
    for (const auto& s : steps) {
      out << s.step << '\t' << format_number(s.step_report.geometric.r2) << '\t'
          << format_number(s.step_report.zipf.r2) << '\t'
          << format_number(s.cumulative_report.geometric.r2) << '\t'
          << format_number(s.cumulative_report.zipf.r2) << '\t'
          << to_string(s.cumulative_report.preferred) << '\n';
    }
    return out.str();
  }
  Json arr = Json::array();
  for (const auto& s : steps) {
    Json entry;
    entry["step"] = s.step;
    entry["step_report"] = to_json(s.step_report);
    entry["cumulative_report"] = to_json(s.cumulative_report);
    arr.push_back(std::move(entry));
  }
  Json doc;
  doc["steps"] = std::move(arr);
  return dump(doc);
}

std::string cmd_trajectory(const RunConfig& cfg) {
  const auto tables = load_steps(cfg);
  std::optional<std::vector<double>> populations;
  if (!cfg.population.empty()) {
    populations.emplace();
    for (const auto& p : split(cfg.population, ',')) {
      populations->push_back(parse_double(p, "population"));
    }
  }
  std::optional<std::span<const double>> pop_span;
  if (populations) pop_span = std::span<const double>(*populations);
  const auto points =
      trajectory(tables, pop_span, parse_fit_mode(cfg.mode.empty() ? "regression" : cfg.mode));

  std::optional<double> correlation;
  if (populations) {
    std::vector<double> pops;
    std::vector<double> ppl;
    for (const auto& p : points) {
      pops.push_back(p.population);
      ppl.push_back(p.perplexity);
    }
    try {
      correlation = pearson(pops, ppl);
    } catch (const Error&) {
      correlation = std::nan("");
    }
  }

  if (cfg.format == "json") {
    Json arr = Json::array();
    for (const auto& p : points) {
      Json entry;
      entry["step"] = p.step;
      entry["population"] = p.population;
      entry["entropy_bits"] = p.entropy_bits;
      entry["perplexity"] = p.perplexity;
      entry["step_entropy_bits"] = p.step_entropy_bits;
      entry["step_perplexity"] = p.step_perplexity;
      entry["report"] = to_json(p.report);
      arr.push_back(std::move(entry));
    }
    Json doc;
    doc["points"] = std::move(arr);
    if (correlation) {
      doc["pearson_population_perplexity"] =
          std::isnan(*correlation) ? Json(nullptr) : Json(*correlation);
    }
    return dump(doc);
  }
  if (cfg.format != "tsv") throw Error(ErrorKind::domain, "format must be json or tsv");
  std::ostringstream out;
  write_trajectory_tsv(out, points, correlation);
  return out.str();
}

std::string cmd_plotdata(const RunConfig& cfg) {
  const auto tables = load_filtered(cfg);
  const bool grouped = !Schema::parse(cfg.schema).group_columns.empty();
  const bool semilog = cfg.transform == "semilog" || cfg.transform == "both";
  const bool loglog = cfg.transform == "loglog" || cfg.transform == "both";
  if (!cfg.transform.empty() && !semilog && !loglog) {
    throw Error(ErrorKind::domain, "transform must be semilog, loglog or both");
  }

  std::ostringstream out;
  if (grouped) out << "group\t";
  out << "rank\tcount\tprob\tlog2_count\tlog2_rank";
  if (!cfg.with_model.empty()) out << "\tmodel_prob";
  if (semilog) out << "\tfit_semilog_log2_count";
  if (loglog) out << "\tfit_loglog_log2_count";
  out << '\n';

  for (const auto& t : tables) {
    const auto dist = rank(t);
    std::optional<PointwiseComparison> cmp;
    if (cfg.with_model == "geometric") {
      cmp = pointwise_compare(dist, fitted_model(fit_geometric_semilog(dist), dist.size()));
    } else if (cfg.with_model == "zipf") {
      cmp = pointwise_compare(dist, fitted_model(fit_zipf_loglog(dist), dist.size()));
    } else if (!cfg.with_model.empty()) {
      cmp = pointwise_compare(dist, model_from_json(read_json(cfg.with_model)));
    }
    std::optional<FitResult> semi;
    std::optional<FitResult> loglog_fit;
    if (semilog) semi = fit_geometric_semilog(dist);
    if (loglog) loglog_fit = fit_zipf_loglog(dist);

    for (std::size_t r = 1; r <= dist.size(); ++r) {
      const double rr = static_cast<double>(r);
      if (grouped) out << group_text(t) << '\t';
      out << r << '\t' << format_number(dist.count_at(r)) << '\t'
          << format_number(dist.prob_at(r)) << '\t' << format_number(std::log2(dist.count_at(r)))
          << '\t' << format_number(std::log2(rr));
      if (cmp) out << '\t' << format_number(cmp->rows[r - 1].model);
      if (semi) out << '\t' << format_number(semi->intercept + std::log2(semi->parameter) * rr);
      if (loglog_fit) {
        out << '\t' << format_number(loglog_fit->intercept - loglog_fit->parameter * std::log2(rr));
      }
      out << '\n';
    }
  }
  return out.str();
}

std::string cmd_code(const RunConfig& cfg) {
  check_format(cfg);
  std::optional<ParametricModel> model;
  if (cfg.q) {
    model = GeometricModel(*cfg.q);
  } else if (!cfg.model_file.empty()) {
    const auto doc = read_json(cfg.model_file);
    if (doc.contains("params")) {
      // A fit result; geometric fits carry q.
      const auto fit = fit_result_from_json(doc);
      if (fit.family != Family::geometric) {
        throw Error(ErrorKind::domain, "code needs a geometric fit");
      }
      model = GeometricModel(fit.parameter);
    } else {
      model = model_from_json(doc);
    }
  } else {
    throw Error(ErrorKind::domain, "code requires --q or --model");
  }

  std::uint64_t m = 0;
  if (cfg.m) {
    m = *cfg.m;
  } else if (const auto* g = std::get_if<GeometricModel>(&*model)) {
    m = optimal_m(g->q());
  } else {
    m = best_m_by_search(*model, 128);
  }
  const auto stats = code_stats(*model, GolombCode(m));
  if (cfg.format == "tsv") {
    std::ostringstream out;
    out << "q\tm\tentropy_bits\texpected_length_bits\tefficiency\n"
        << format_number(stats.q) << '\t' << stats.m << '\t' << format_number(stats.entropy_bits)
        << '\t' << format_number(stats.expected_length_bits) << '\t'
        << format_number(stats.efficiency) << '\n';
    return out.str();
  }
  return dump(to_json(stats));
}

void add_input_options(CLI::App* sub, RunConfig& cfg, bool many) {
  auto* opt = sub->add_option("-i,--input", cfg.inputs,
                              many ? "Input files in step order ('-' for stdin)"
                                   : "Input file ('-' for stdin)");
  opt->required();
  sub->add_option("--schema", cfg.schema, "Columns: type,count[,group...]");
  sub->add_option("--min-count", cfg.min_count, "Drop types below this count")
      ->check(CLI::PositiveNumber);
}

void add_output_options(CLI::App* sub, RunConfig& cfg, const std::string& default_format) {
  sub->add_option("--format", cfg.format, "json or tsv (default " + default_format + ")");
  sub->add_option("-o,--output", cfg.output, "Write output to this file");
}

int exit_code_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::insufficient_data:
    case ErrorKind::empty_result:
      return kExitInsufficientData;
    default:
      return kExitInputError;
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Rank-frequency analysis: geometric vs power-law fits, entropy, "
               "mixture experiments and Golomb coding"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto* fit = app.add_subcommand("fit", "Fit both families and report entropy/perplexity");
  add_input_options(fit, cfg, false);
  fit->add_option("--mode", cfg.mode, "regression, mle or both (default both)");
  fit->add_option("--r2-space", cfg.r2_space, "transformed or raw");
  add_output_options(fit, cfg, "json");

  auto* cmp = app.add_subcommand("compare", "Compare geometric and Zipf fits");
  add_input_options(cmp, cfg, false);
  cmp->add_option("--mode", cfg.mode, "regression or mle (default regression)");
  cmp->add_option("--r2-space", cfg.r2_space, "transformed or raw");
  add_output_options(cmp, cfg, "json");

  auto* ent = app.add_subcommand("entropy", "Entropy and perplexity per group");
  add_input_options(ent, cfg, false);
  add_output_options(ent, cfg, "json");

  auto* sim = app.add_subcommand("simulate", "Mixture experiment, or sample one model");
  sim->add_option("--k", cfg.k, "Number of components");
  sim->add_option("--q-range", cfg.q_range, "lo:hi range of decay ratios");
  sim->add_option("--tokens", cfg.tokens, "Tokens per component (one value or a list)");
  sim->add_option("--labels", cfg.labels, "disjoint or shared");
  sim->add_option("--law", cfg.law, "log_uniform_rank or uniform_q");
  sim->add_option("--spec", cfg.spec_file, "Experiment spec JSON");
  sim->add_option("--model", cfg.model_file, "Sample this model JSON instead");
  sim->add_option("--mode", cfg.mode, "regression or mle");
  sim->add_option("--seed", cfg.seed, "Random seed (required)");
  add_output_options(sim, cfg, "json");

  auto* agg = app.add_subcommand("aggregate", "Per-step vs cumulative fits");
  add_input_options(agg, cfg, true);
  agg->add_option("--mode", cfg.mode, "regression or mle");
  add_output_options(agg, cfg, "json");

  auto* traj = app.add_subcommand("trajectory", "Cumulative entropy/perplexity per step");
  add_input_options(traj, cfg, true);
  traj->add_option("--population", cfg.population, "Comma-separated population per step");
  traj->add_option("--mode", cfg.mode, "regression or mle");
  add_output_options(traj, cfg, "tsv");

  auto* plot = app.add_subcommand("plotdata", "Plot-ready rank/frequency series");
  add_input_options(plot, cfg, false);
  plot->add_option("--with-model", cfg.with_model, "geometric, zipf or a model JSON file");
  plot->add_option("--transform", cfg.transform, "Fitted lines: semilog, loglog or both");
  plot->add_option("-o,--output", cfg.output, "Write output to this file");

  auto* code = app.add_subcommand("code", "Golomb code statistics for a geometric source");
  code->add_option("--q", cfg.q, "Decay ratio in (0, 1)");
  code->add_option("--model", cfg.model_file, "Model or geometric fit JSON");
  code->add_option("--m", cfg.m, "Override the code parameter")->check(CLI::PositiveNumber);
  add_output_options(code, cfg, "json");

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }

  if (cfg.format.empty()) cfg.format = traj->parsed() ? "tsv" : "json";

  try {
    std::string result;
    if (fit->parsed()) {
      result = cmd_fit(cfg, true);
    } else if (cmp->parsed()) {
      result = cmd_fit(cfg, false);
    } else if (ent->parsed()) {
      result = cmd_entropy(cfg);
    } else if (sim->parsed()) {
      result = cmd_simulate(cfg);
    } else if (agg->parsed()) {
      result = cmd_aggregate(cfg);
    } else if (traj->parsed()) {
      result = cmd_trajectory(cfg);
    } else if (plot->parsed()) {
      result = cmd_plotdata(cfg);
    } else if (code->parsed()) {
      result = cmd_code(cfg);
    }
    if (cfg.output.empty()) {
      out << result;
    } else {
      std::ofstream file(cfg.output, std::ios::binary);
      if (!file) throw Error(ErrorKind::domain, "cannot write '" + cfg.output + "'");
      file << result;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
  return kExitOk;
}

}  // namespace rankfreq
