#pragma once

// Parametric rank distributions: geometric, Zipf, and finite mixtures of the
// two. Ranks start at 1. All models are immutable values.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "rankfreq/core.hpp"

namespace rankfreq {

using Rank = std::uint64_t;

// pmf(r) = (1-q) q^(r-1) / Z, Z = 1 unbounded or 1 - q^N truncated at N.
class GeometricModel {
 public:
  // Throws Error(domain) unless 0 < q < 1 and truncation (if any) >= 1.
  explicit GeometricModel(double q, std::optional<Rank> truncation = std::nullopt);

  double q() const noexcept { return q_; }
  const std::optional<Rank>& truncation() const noexcept { return truncation_; }
  // Mean rank of the unbounded model, 1/(1-q).
  double expected_rank() const noexcept { return 1.0 / (1.0 - q_); }

  bool operator==(const GeometricModel&) const = default;

 private:
  double q_;
  std::optional<Rank> truncation_;
};

// pmf(r) = r^-s / H(N, s) on 1..N. s = 0 is the uniform distribution.
class ZipfModel {
 public:
  // Throws Error(domain) unless s >= 0 and N >= 1.
  ZipfModel(double s, Rank support);

  double s() const noexcept { return s_; }
  Rank support() const noexcept { return support_; }
  // Generalized harmonic number H(N, s).
  double normalizer() const noexcept { return normalizer_; }

  bool operator==(const ZipfModel& o) const noexcept {
    return s_ == o.s_ && support_ == o.support_;
  }

 private:
  double s_;
  Rank support_;
  double normalizer_;
};

using BaseModel = std::variant<GeometricModel, ZipfModel>;

enum class LabelSharing { disjoint, shared };

// Weighted mixture over the union label space. With disjoint labels every
// component contributes its own labels; with shared labels component ranks
// coincide, so pmf over the shared ranks is the weighted sum. Mixture rank r
// is the r-th most probable label of the union. Unbounded components are
// enumerated until their tail mass drops below 1e-12.
class MixtureModel {
 public:
  // Throws Error(domain) on empty components, size mismatch, negative weights
  // or weights not summing to 1 within 1e-12.
  MixtureModel(std::vector<BaseModel> components, std::vector<double> weights,
               LabelSharing sharing = LabelSharing::disjoint);

  const std::vector<BaseModel>& components() const noexcept { return components_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  LabelSharing sharing() const noexcept { return sharing_; }

  // Label probabilities of the union space in descending order; computed once
  // and shared between copies.
  const std::vector<double>& rank_probs() const;

  bool operator==(const MixtureModel& o) const noexcept {
    return components_ == o.components_ && weights_ == o.weights_ &&
           sharing_ == o.sharing_;
  }

 private:
  struct Cache;

  std::vector<BaseModel> components_;
  std::vector<double> weights_;
  LabelSharing sharing_;
  std::shared_ptr<Cache> cache_;
};

using ParametricModel = std::variant<GeometricModel, ZipfModel, MixtureModel>;

ParametricModel to_parametric(const BaseModel& model);

// Number of ranks with positive mass; nullopt for an unbounded geometric.
std::optional<Rank> support_size(const ParametricModel& model);

// Throws Error(domain) for r outside the support.
double pmf(const ParametricModel& model, Rank r);
double cdf(const ParametricModel& model, Rank r);
// P(rank > r).
double tail_mass(const ParametricModel& model, Rank r);

// Shannon entropy in bits. Unbounded geometric uses the closed form, every
// other model sums over its support.
double model_entropy(const ParametricModel& model);

// Entropy of the unbounded geometric: [-q log2 q - (1-q) log2(1-q)] / (1-q).
double geometric_entropy_bits(double q);

// n draws by inverse CDF on a counter stream. Labels are "r<rank>", or
// "c<i>.r<rank>" for components of a disjoint mixture.
FrequencyTable sample(const ParametricModel& model, Count n_tokens, std::uint64_t seed,
                      const std::string& label_prefix = "");

// Unbounded geometric whose entropy matches target_bits within 1e-9
// (bisection on q). Throws Error(domain) for target_bits <= 0.
GeometricModel solve_geometric_for_entropy(double target_bits);

std::string family_name(const ParametricModel& model);

}  // namespace rankfreq
