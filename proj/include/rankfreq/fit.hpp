#pragma once

// Geometric vs Zipf fits of ranked distributions.
//
// Regression fits are unweighted OLS on transformed coordinates:
//   geometric: log2 f_r = a + b r        (q = 2^b)
//   zipf:      log2 f_r = a - s log2 r
// MLE fits treat every token as a draw of its type's rank. Log base 2 for
// coordinates, natural log for likelihoods.

#include <span>
#include <string>
#include <vector>

#include "rankfreq/core.hpp"
#include "rankfreq/models.hpp"

namespace rankfreq {

enum class Family { geometric, zipf };
enum class FitMode { regression, mle };
// Space in which R² is scored: log-transformed frequencies or raw ones.
enum class R2Space { transformed, raw };

std::string to_string(Family family);
std::string to_string(FitMode mode);
std::string to_string(R2Space space);
Family parse_family(std::string_view text);
FitMode parse_fit_mode(std::string_view text);
R2Space parse_r2_space(std::string_view text);

struct FitResult {
  Family family = Family::geometric;
  FitMode method = FitMode::regression;
  // q̂ for geometric, ŝ for zipf.
  double parameter = 0.0;
  // Intercept of the fitted line in log2-frequency coordinates: at r = 0 for
  // geometric, at log2 r = 0 for zipf.
  double intercept = 0.0;
  double r2 = 0.0;
  double loglik = 0.0;  // nats
  double ks = 0.0;
  // Boundary estimate: flat series (q̂ = 1) or all tokens on rank 1.
  bool degenerate = false;

  bool operator==(const FitResult&) const = default;
};

struct ComparisonReport {
  FitMode mode = FitMode::regression;
  FitResult geometric;
  FitResult zipf;
  Family preferred = Family::geometric;
  std::size_t n_types = 0;
  double n_tokens = 0.0;

  bool operator==(const ComparisonReport&) const = default;
};

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

// y = intercept + slope x. R² is 1 for an exactly constant y.
LinearFit ordinary_least_squares(std::span<const double> xs, std::span<const double> ys);

// R² of predictions against observations. A constant y scores 1 when matched
// exactly and 0 otherwise.
double coefficient_of_determination(std::span<const double> ys,
                                    std::span<const double> predictions);

// Throw Error(insufficient_data) when N < 3.
FitResult fit_geometric_semilog(const RankedDistribution& dist,
                                R2Space space = R2Space::transformed);
FitResult fit_zipf_loglog(const RankedDistribution& dist,
                          R2Space space = R2Space::transformed);

// q̂ = 1 - 1/r̄ with r̄ the token-weighted mean rank; unbounded model.
// Throws Error(insufficient_data) when total tokens < 2.
FitResult fit_geometric_mle(const RankedDistribution& dist,
                            R2Space space = R2Space::transformed);

// Golden-section search for ŝ in [0, 10] (tolerance 1e-6), N fixed to the
// observed support. Throws Error(insufficient_data) when N < 2 or tokens < 2.
FitResult fit_zipf_mle(const RankedDistribution& dist,
                       R2Space space = R2Space::transformed);

// Model implied by a fit over `n_types` observed ranks. Regression fits give
// models truncated to the observed support (a flat geometric fit becomes the
// uniform zipf s = 0); the geometric MLE is unbounded.
ParametricModel fitted_model(const FitResult& fit, std::size_t n_types);

// max_r |F_emp(r) - F_model(r)| over observed ranks. Throws Error(domain)
// when the model support is smaller than the observed support.
double ks_distance(const RankedDistribution& dist, const ParametricModel& model);

// Σ_r counts[r] ln pmf(r). Throws Error(domain) on support mismatch.
double log_likelihood(const RankedDistribution& dist, const ParametricModel& model);

// Both family fits in the given mode. Regression prefers the higher R²,
// MLE the higher log-likelihood; exact ties go to geometric.
ComparisonReport compare(const RankedDistribution& dist, FitMode mode,
                         R2Space space = R2Space::transformed);

// Sample Pearson correlation. Throws Error(domain) on length mismatch,
// Error(insufficient_data) for fewer than 3 points and
// Error(undefined_correlation) when either series is constant.
double pearson(std::span<const double> xs, std::span<const double> ys);

}  // namespace rankfreq
