#include "rankfreq/fit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rankfreq/error.hpp"

namespace rankfreq {

std::string to_string(Family family) {
  return family == Family::geometric ? "geometric" : "zipf";
}

std::string to_string(FitMode mode) {
  return mode == FitMode::regression ? "regression" : "mle";
}

std::string to_string(R2Space space) {
  return space == R2Space::transformed ? "transformed" : "raw";
}

Family parse_family(std::string_view text) {
  if (text == "geometric") return Family::geometric;
  if (text == "zipf") return Family::zipf;
  throw Error(ErrorKind::domain, "unknown family '" + std::string(text) + "'");
}

FitMode parse_fit_mode(std::string_view text) {
  if (text == "regression") return FitMode::regression;
  if (text == "mle") return FitMode::mle;
  throw Error(ErrorKind::domain, "unknown fit mode '" + std::string(text) + "'");
}

R2Space parse_r2_space(std::string_view text) {
  if (text == "transformed") return R2Space::transformed;
  if (text == "raw") return R2Space::raw;
  throw Error(ErrorKind::domain, "unknown R² space '" + std::string(text) + "'");
}

namespace {

constexpr double kFlatSlope = 1e-12;

bool all_equal(std::span<const double> ys) {
  return std::all_of(ys.begin(), ys.end(), [&](double y) { return y == ys.front(); });
}

std::vector<double> log2_counts(const RankedDistribution& dist) {
  std::vector<double> ys;
  ys.reserve(dist.size());
  for (double c : dist.counts()) ys.push_back(std::log2(c));
  return ys;
}

void require_types(const RankedDistribution& dist, std::size_t minimum) {
  if (dist.size() < minimum) {
    throw Error(ErrorKind::insufficient_data,
                "need at least " + std::to_string(minimum) + " types, have " +
                    std::to_string(dist.size()));
  }
}

void require_tokens(const RankedDistribution& dist) {
  if (dist.total_tokens() < 2.0) {
    throw Error(ErrorKind::insufficient_data, "need at least 2 tokens");
  }
}

// R² of a model's expected counts against the observations, in the requested
// space.
double model_r2(const RankedDistribution& dist, const ParametricModel& model,
                R2Space space) {
  std::vector<double> ys;
  std::vector<double> preds;
  ys.reserve(dist.size());
  preds.reserve(dist.size());
  for (std::size_t r = 1; r <= dist.size(); ++r) {
    const double expected = dist.total_tokens() * pmf(model, r);
    if (space == R2Space::transformed) {
      ys.push_back(std::log2(dist.count_at(r)));
      preds.push_back(std::log2(expected));
    } else {
      ys.push_back(dist.count_at(r));
      preds.push_back(expected);
    }
  }
  return coefficient_of_determination(ys, preds);
}

// R² of a regression line y = a + b x, with x given per rank.
double line_r2(const RankedDistribution& dist, std::span<const double> xs,
               const LinearFit& line, R2Space space) {
  std::vector<double> ys;
  std::vector<double> preds;
  ys.reserve(xs.size());
  preds.reserve(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double yhat = line.intercept + line.slope * xs[i];
    if (space == R2Space::transformed) {
      ys.push_back(std::log2(dist.counts()[i]));
      preds.push_back(yhat);
    } else {
      ys.push_back(dist.counts()[i]);
      preds.push_back(std::exp2(yhat));
    }
  }
  return coefficient_of_determination(ys, preds);
}

void attach_model_scores(FitResult& fit, const RankedDistribution& dist) {
  const auto model = fitted_model(fit, dist.size());
  fit.loglik = log_likelihood(dist, model);
  fit.ks = ks_distance(dist, model);
}

double zipf_loglik(double s, double weighted_log_rank, double tokens, std::size_t n) {
  double h = 0.0;
  for (std::size_t r = n; r >= 1; --r) h += std::pow(static_cast<double>(r), -s);
  return -s * weighted_log_rank - tokens * std::log(h);
}

}  // namespace

LinearFit ordinary_least_squares(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw Error(ErrorKind::domain, "series lengths differ");
  if (xs.size() < 2) throw Error(ErrorKind::insufficient_data, "need at least 2 points");
  if (all_equal(ys)) return {0.0, ys.front(), 1.0};

  const double n = static_cast<double>(xs.size());
  const double mean_x = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double mean_y = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mean_x;
    sxx += dx * dx;
    sxy += dx * (ys[i] - mean_y);
  }
  if (sxx == 0.0) throw Error(ErrorKind::domain, "regressor is constant");

  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = mean_y - fit.slope * mean_x;
  std::vector<double> preds(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) preds[i] = fit.intercept + fit.slope * xs[i];
  fit.r2 = coefficient_of_determination(ys, preds);
  return fit;
}

double coefficient_of_determination(std::span<const double> ys,
                                    std::span<const double> predictions) {
  if (ys.size() != predictions.size()) throw Error(ErrorKind::domain, "series lengths differ");
  if (ys.empty()) throw Error(ErrorKind::insufficient_data, "no observations");
  double ss_res = 0.0;
  for (std::size_t i = 0; i < ys.size(); ++i) {
    const double e = ys[i] - predictions[i];
    ss_res += e * e;
  }
  if (all_equal(ys)) {
    const double scale = std::max(1.0, std::abs(ys.front()));
    return ss_res <= 1e-18 * scale * scale * static_cast<double>(ys.size()) ? 1.0 : 0.0;
  }
  const double mean = std::accumulate(ys.begin(), ys.end(), 0.0) / static_cast<double>(ys.size());
  double ss_tot = 0.0;
  for (double y : ys) ss_tot += (y - mean) * (y - mean);
  return 1.0 - ss_res / ss_tot;
}

FitResult fit_geometric_semilog(const RankedDistribution& dist, R2Space space) {
  require_types(dist, 3);
  std::vector<double> xs(dist.size());
  std::iota(xs.begin(), xs.end(), 1.0);
  const auto ys = log2_counts(dist);
  const auto line = ordinary_least_squares(xs, ys);

  FitResult fit;
  fit.family = Family::geometric;
  fit.method = FitMode::regression;
  fit.intercept = line.intercept;
  fit.degenerate = line.slope >= -kFlatSlope;
  fit.parameter = fit.degenerate ? 1.0 : std::exp2(line.slope);
  fit.r2 = space == R2Space::transformed ? line.r2 : line_r2(dist, xs, line, space);
  attach_model_scores(fit, dist);
  return fit;
}

FitResult fit_zipf_loglog(const RankedDistribution& dist, R2Space space) {
  require_types(dist, 3);
  std::vector<double> xs(dist.size());
  for (std::size_t r = 1; r <= dist.size(); ++r) xs[r - 1] = std::log2(static_cast<double>(r));
  const auto ys = log2_counts(dist);
  const auto line = ordinary_least_squares(xs, ys);

  FitResult fit;
  fit.family = Family::zipf;
  fit.method = FitMode::regression;
  fit.intercept = line.intercept;
  fit.degenerate = line.slope >= -kFlatSlope;
  fit.parameter = fit.degenerate ? 0.0 : -line.slope;
  fit.r2 = space == R2Space::transformed ? line.r2 : line_r2(dist, xs, line, space);
  attach_model_scores(fit, dist);
  return fit;
}

FitResult fit_geometric_mle(const RankedDistribution& dist, R2Space space) {
  require_types(dist, 1);
  require_tokens(dist);
  double weighted = 0.0;
  for (std::size_t r = 1; r <= dist.size(); ++r) {
    weighted += static_cast<double>(r) * dist.count_at(r);
  }
  const double mean_rank = weighted / dist.total_tokens();

  FitResult fit;
  fit.family = Family::geometric;
  fit.method = FitMode::mle;
  fit.degenerate = mean_rank <= 1.0;
  fit.parameter = fit.degenerate ? 1e-9 : 1.0 - 1.0 / mean_rank;
  const double q = fit.parameter;
  fit.intercept = std::log2(dist.total_tokens() * (1.0 - q)) - std::log2(q);
  const GeometricModel model(q);
  fit.loglik = log_likelihood(dist, model);
  fit.ks = ks_distance(dist, model);
  fit.r2 = model_r2(dist, model, space);
  return fit;
}

FitResult fit_zipf_mle(const RankedDistribution& dist, R2Space space) {
  require_types(dist, 2);
  require_tokens(dist);
  const std::size_t n = dist.size();
  const double tokens = dist.total_tokens();
  double weighted_log_rank = 0.0;
  for (std::size_t r = 1; r <= n; ++r) {
    weighted_log_rank += dist.count_at(r) * std::log(static_cast<double>(r));
  }
  auto objective = [&](double s) { return zipf_loglik(s, weighted_log_rank, tokens, n); };

  // The log-likelihood is concave in s.
  constexpr double kLo = 0.0;
  constexpr double kHi = 10.0;
  constexpr double kTol = 1e-6;
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = kLo;
  double b = kHi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = objective(c);
  double fd = objective(d);
  while (b - a > kTol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = objective(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = objective(d);
    }
  }
  double s = 0.5 * (a + b);
  double best = objective(s);
  for (double edge : {kLo, kHi}) {
    const double value = objective(edge);
    if (value >= best) {
      best = value;
      s = edge;
    }
  }

  FitResult fit;
  fit.family = Family::zipf;
  fit.method = FitMode::mle;
  fit.parameter = s;
  const ZipfModel model(s, n);
  fit.intercept = std::log2(tokens / model.normalizer());
  fit.loglik = best;
  fit.ks = ks_distance(dist, model);
  fit.r2 = model_r2(dist, model, space);
  return fit;
}

ParametricModel fitted_model(const FitResult& fit, std::size_t n_types) {
  if (n_types == 0) throw Error(ErrorKind::domain, "fitted model needs a support");
  if (fit.family == Family::zipf) return ZipfModel(fit.parameter, n_types);
  if (fit.method == FitMode::mle) return GeometricModel(fit.parameter);
  if (fit.degenerate || fit.parameter >= 1.0) return ZipfModel(0.0, n_types);
  return GeometricModel(fit.parameter, n_types);
}

double ks_distance(const RankedDistribution& dist, const ParametricModel& model) {
  const auto support = support_size(model);
  if (support && *support < dist.size()) {
    throw Error(ErrorKind::domain, "model support smaller than observed support");
  }
  double emp = 0.0;
  double mod = 0.0;
  double d = 0.0;
  for (std::size_t r = 1; r <= dist.size(); ++r) {
    emp += dist.prob_at(r);
    mod += pmf(model, r);
    d = std::max(d, std::abs(std::min(emp, 1.0) - std::min(mod, 1.0)));
  }
  return std::clamp(d, 0.0, 1.0);
}

double log_likelihood(const RankedDistribution& dist, const ParametricModel& model) {
  const auto support = support_size(model);
  if (support && *support < dist.size()) {
    throw Error(ErrorKind::domain, "model support smaller than observed support");
  }
  double ll = 0.0;
  for (std::size_t r = 1; r <= dist.size(); ++r) {
    ll += dist.count_at(r) * std::log(pmf(model, r));
  }
  return ll;
}

ComparisonReport compare(const RankedDistribution& dist, FitMode mode, R2Space space) {
  require_types(dist, 3);
  ComparisonReport report;
  report.mode = mode;
  report.n_types = dist.size();
  report.n_tokens = dist.total_tokens();
  if (mode == FitMode::regression) {
    report.geometric = fit_geometric_semilog(dist, space);
    report.zipf = fit_zipf_loglog(dist, space);
    report.preferred =
        report.zipf.r2 > report.geometric.r2 ? Family::zipf : Family::geometric;
  } else {
    report.geometric = fit_geometric_mle(dist, space);
    report.zipf = fit_zipf_mle(dist, space);
    report.preferred =
        report.zipf.loglik > report.geometric.loglik ? Family::zipf : Family::geometric;
  }
  return report;
}

double pearson(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw Error(ErrorKind::domain, "series lengths differ");
  if (xs.size() < 3) {
    throw Error(ErrorKind::insufficient_data, "correlation needs at least 3 points");
  }
  if (all_equal(xs) || all_equal(ys)) {
    throw Error(ErrorKind::undefined_correlation, "constant series");
  }
  const double n = static_cast<double>(xs.size());
  const double mean_x = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double mean_y = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxx = 0.0;
  double syy = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mean_x;
    const double dy = ys[i] - mean_y;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

}  // namespace rankfreq
