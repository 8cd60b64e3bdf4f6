#include "rankfreq/models.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <mutex>
#include <numeric>

#include "rankfreq/error.hpp"
#include "rankfreq/random.hpp"

namespace rankfreq {

namespace {

constexpr double kTailCutoff = 1e-12;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// 1 - q^n without cancellation.
double one_minus_pow(double q, double n) { return -std::expm1(n * std::log(q)); }

double geometric_pmf(const GeometricModel& m, Rank r) {
  const double q = m.q();
  const double raw = (1.0 - q) * std::pow(q, static_cast<double>(r - 1));
  if (!m.truncation()) return raw;
  return raw / one_minus_pow(q, static_cast<double>(*m.truncation()));
}

double geometric_tail(const GeometricModel& m, Rank r) {
  const double q = m.q();
  if (!m.truncation()) return std::pow(q, static_cast<double>(r));
  const Rank n = *m.truncation();
  if (r >= n) return 0.0;
  const double qr = std::pow(q, static_cast<double>(r));
  const double qn = std::pow(q, static_cast<double>(n));
  return (qr - qn) / one_minus_pow(q, static_cast<double>(n));
}

double zipf_pmf(const ZipfModel& m, Rank r) {
  return std::pow(static_cast<double>(r), -m.s()) / m.normalizer();
}

void check_rank(Rank r, std::optional<Rank> support) {
  if (r == 0 || (support && r > *support)) {
    throw Error(ErrorKind::domain, "rank " + std::to_string(r) + " outside model support");
  }
}

// Last rank enumerated for a component: its support, or where the remaining
// tail mass drops below the cutoff.
Rank enumeration_limit(const BaseModel& model) {
  return std::visit(
      overloaded{
          [](const GeometricModel& g) -> Rank {
            const auto cut = static_cast<Rank>(
                std::ceil(std::log(kTailCutoff) / std::log(g.q())));
            const Rank limit = std::max<Rank>(cut, 1);
            return g.truncation() ? std::min(limit, *g.truncation()) : limit;
          },
          [](const ZipfModel& z) -> Rank { return z.support(); },
      },
      model);
}

double base_pmf(const BaseModel& model, Rank r) {
  return std::visit(
      overloaded{
          [r](const GeometricModel& g) {
            return g.truncation() && r > *g.truncation() ? 0.0 : geometric_pmf(g, r);
          },
          [r](const ZipfModel& z) { return r <= z.support() ? zipf_pmf(z, r) : 0.0; },
      },
      model);
}

// Maps a uniform variate to a rank by inverting the CDF.
class RankSampler {
 public:
  explicit RankSampler(const BaseModel& model) : model_(model) {
    if (const auto* z = std::get_if<ZipfModel>(&model_)) {
      cumulative_.resize(z->support());
      double acc = 0.0;
      for (Rank r = 1; r <= z->support(); ++r) {
        acc += std::pow(static_cast<double>(r), -z->s());
        cumulative_[r - 1] = acc;
      }
    } else {
      const auto& g = std::get<GeometricModel>(model_);
      log_q_ = std::log(g.q());
      if (g.truncation()) {
        truncated_mass_ = one_minus_pow(g.q(), static_cast<double>(*g.truncation()));
      }
    }
  }

  Rank draw(double u) const {
    if (!cumulative_.empty()) {
      const double target = u * cumulative_.back();
      const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), target);
      const auto idx = static_cast<Rank>(it - cumulative_.begin());
      return std::min<Rank>(idx + 1, cumulative_.size());
    }
    const auto& g = std::get<GeometricModel>(model_);
    const double v = std::floor(std::log1p(-u * truncated_mass_) / log_q_);
    constexpr double kMaxRank = 9.0e18;
    Rank r = 1 + static_cast<Rank>(std::min(v, kMaxRank));
    if (g.truncation()) r = std::min(r, *g.truncation());
    return r;
  }

 private:
  BaseModel model_;
  std::vector<double> cumulative_;
  double log_q_ = 0.0;
  double truncated_mass_ = 1.0;
};

// Tabulates rank draws. Dense counting when ranks stay small, otherwise a
// sort-and-run-length pass.
std::vector<std::pair<Rank, Count>> tabulate(std::vector<Rank>& draws) {
  std::vector<std::pair<Rank, Count>> out;
  if (draws.empty()) return out;
  const Rank max_rank = *std::max_element(draws.begin(), draws.end());
  if (max_rank <= 2 * draws.size() + 1024) {
    std::vector<Count> dense(max_rank + 1, 0);
    for (Rank r : draws) ++dense[r];
    for (Rank r = 1; r <= max_rank; ++r) {
      if (dense[r] > 0) out.emplace_back(r, dense[r]);
    }
    return out;
  }
  std::sort(draws.begin(), draws.end());
  for (std::size_t i = 0; i < draws.size();) {
    std::size_t j = i;
    while (j < draws.size() && draws[j] == draws[i]) ++j;
    out.emplace_back(draws[i], static_cast<Count>(j - i));
    i = j;
  }
  return out;
}

void add_ranks(FrequencyTable::Entries& entries, const std::string& prefix,
               std::vector<Rank>& draws) {
  for (const auto& [r, c] : tabulate(draws)) {
    entries[prefix + "r" + std::to_string(r)] += c;
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Model construction

GeometricModel::GeometricModel(double q, std::optional<Rank> truncation)
    : q_(q), truncation_(truncation) {
  if (!(q > 0.0 && q < 1.0)) {
    throw Error(ErrorKind::domain, "geometric decay q must lie in (0, 1)");
  }
  if (truncation && *truncation == 0) {
    throw Error(ErrorKind::domain, "geometric truncation must be >= 1");
  }
}

ZipfModel::ZipfModel(double s, Rank support) : s_(s), support_(support) {
  if (!(s >= 0.0) || !std::isfinite(s)) {
    throw Error(ErrorKind::domain, "zipf exponent must be finite and >= 0");
  }
  if (support == 0) throw Error(ErrorKind::domain, "zipf support must be >= 1");
  // Sum smallest terms first.
  double h = 0.0;
  for (Rank r = support; r >= 1; --r) h += std::pow(static_cast<double>(r), -s);
  normalizer_ = h;
}

struct MixtureModel::Cache {
  std::once_flag once;
  std::vector<double> probs;
};

MixtureModel::MixtureModel(std::vector<BaseModel> components, std::vector<double> weights,
                           LabelSharing sharing)
    : components_(std::move(components)),
      weights_(std::move(weights)),
      sharing_(sharing),
      cache_(std::make_shared<Cache>()) {
  if (components_.empty()) throw Error(ErrorKind::domain, "mixture has no components");
  if (components_.size() != weights_.size()) {
    throw Error(ErrorKind::domain, "mixture needs one weight per component");
  }
  double total = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw Error(ErrorKind::domain, "mixture weights must be finite and >= 0");
    }
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw Error(ErrorKind::domain, "mixture weights must sum to 1");
  }
}

const std::vector<double>& MixtureModel::rank_probs() const {
  std::call_once(cache_->once, [this] {
    auto& probs = cache_->probs;
    if (sharing_ == LabelSharing::disjoint) {
      for (std::size_t i = 0; i < components_.size(); ++i) {
        if (weights_[i] == 0.0) continue;
        const Rank limit = enumeration_limit(components_[i]);
        for (Rank r = 1; r <= limit; ++r) {
          probs.push_back(weights_[i] * base_pmf(components_[i], r));
        }
      }
    } else {
      Rank limit = 0;
      for (std::size_t i = 0; i < components_.size(); ++i) {
        if (weights_[i] > 0.0) limit = std::max(limit, enumeration_limit(components_[i]));
      }
      probs.assign(limit, 0.0);
      for (std::size_t i = 0; i < components_.size(); ++i) {
        if (weights_[i] == 0.0) continue;
        for (Rank r = 1; r <= limit; ++r) {
          probs[r - 1] += weights_[i] * base_pmf(components_[i], r);
        }
      }
    }
    std::erase_if(probs, [](double p) { return !(p > 0.0); });
    std::sort(probs.begin(), probs.end(), std::greater<>());
  });
  return cache_->probs;
}

ParametricModel to_parametric(const BaseModel& model) {
  return std::visit([](const auto& m) -> ParametricModel { return m; }, model);
}

// ---------------------------------------------------------------------------
// Distribution functions

std::optional<Rank> support_size(const ParametricModel& model) {
  return std::visit(
      overloaded{
          [](const GeometricModel& g) { return g.truncation(); },
          [](const ZipfModel& z) -> std::optional<Rank> { return z.support(); },
          [](const MixtureModel& m) -> std::optional<Rank> { return m.rank_probs().size(); },
      },
      model);
}

double pmf(const ParametricModel& model, Rank r) {
  check_rank(r, support_size(model));
  return std::visit(
      overloaded{
          [r](const GeometricModel& g) { return geometric_pmf(g, r); },
          [r](const ZipfModel& z) { return zipf_pmf(z, r); },
          [r](const MixtureModel& m) { return m.rank_probs()[r - 1]; },
      },
      model);
}

double tail_mass(const ParametricModel& model, Rank r) {
  return std::visit(
      overloaded{
          [r](const GeometricModel& g) { return geometric_tail(g, r); },
          [r](const ZipfModel& z) {
            double tail = 0.0;
            for (Rank k = z.support(); k > r; --k) tail += zipf_pmf(z, k);
            return tail;
          },
          [r](const MixtureModel& m) {
            const auto& p = m.rank_probs();
            double tail = 0.0;
            for (std::size_t k = p.size(); k > r; --k) tail += p[k - 1];
            return tail;
          },
      },
      model);
}

double cdf(const ParametricModel& model, Rank r) {
  if (r == 0) return 0.0;
  return std::visit(
      overloaded{
          [r](const GeometricModel& g) {
            if (g.truncation() && r >= *g.truncation()) return 1.0;
            return 1.0 - geometric_tail(g, r);
          },
          [r](const ZipfModel& z) {
            double acc = 0.0;
            const Rank top = std::min(r, z.support());
            for (Rank k = 1; k <= top; ++k) acc += zipf_pmf(z, k);
            return std::min(acc, 1.0);
          },
          [r](const MixtureModel& m) {
            const auto& p = m.rank_probs();
            const auto top = static_cast<std::size_t>(std::min<Rank>(r, p.size()));
            return std::min(std::accumulate(p.begin(), p.begin() + top, 0.0), 1.0);
          },
      },
      model);
}

double geometric_entropy_bits(double q) {
  return (-q * std::log2(q) - (1.0 - q) * std::log2(1.0 - q)) / (1.0 - q);
}

double model_entropy(const ParametricModel& model) {
  auto plogp = [](double p) { return p > 0.0 ? -p * std::log2(p) : 0.0; };
  return std::visit(
      overloaded{
          [&](const GeometricModel& g) {
            if (!g.truncation()) return geometric_entropy_bits(g.q());
            double h = 0.0;
            for (Rank r = 1; r <= *g.truncation(); ++r) h += plogp(geometric_pmf(g, r));
            return h;
          },
          [&](const ZipfModel& z) {
            double h = 0.0;
            for (Rank r = 1; r <= z.support(); ++r) h += plogp(zipf_pmf(z, r));
            return h;
          },
          [&](const MixtureModel& m) {
            double h = 0.0;
            for (double p : m.rank_probs()) h += plogp(p);
            return h;
          },
      },
      model);
}

// ---------------------------------------------------------------------------
// Sampling

FrequencyTable sample(const ParametricModel& model, Count n_tokens, std::uint64_t seed,
                      const std::string& label_prefix) {
  const CounterStream stream(seed);
  FrequencyTable::Entries entries;

  if (const auto* mix = std::get_if<MixtureModel>(&model)) {
    const auto& comps = mix->components();
    std::vector<double> cum(mix->weights().size());
    std::partial_sum(mix->weights().begin(), mix->weights().end(), cum.begin());
    std::vector<RankSampler> samplers(comps.begin(), comps.end());
    std::vector<std::vector<Rank>> draws(comps.size());
    for (Count i = 0; i < n_tokens; ++i) {
      const double u = stream.uniform(2 * i) * cum.back();
      auto idx = static_cast<std::size_t>(
          std::upper_bound(cum.begin(), cum.end(), u) - cum.begin());
      idx = std::min(idx, comps.size() - 1);
      draws[idx].push_back(samplers[idx].draw(stream.uniform(2 * i + 1)));
    }
    for (std::size_t c = 0; c < comps.size(); ++c) {
      const std::string prefix =
          mix->sharing() == LabelSharing::disjoint
              ? label_prefix + "c" + std::to_string(c) + "."
              : label_prefix;
      add_ranks(entries, prefix, draws[c]);
    }
    return FrequencyTable(std::move(entries));
  }

  const BaseModel base = std::visit(
      overloaded{
          [](const GeometricModel& g) -> BaseModel { return g; },
          [](const ZipfModel& z) -> BaseModel { return z; },
          [](const MixtureModel&) -> BaseModel { throw std::logic_error("unreachable"); },
      },
      model);
  const RankSampler sampler(base);
  std::vector<Rank> draws(n_tokens);
  for (Count i = 0; i < n_tokens; ++i) draws[i] = sampler.draw(stream.uniform(i));
  add_ranks(entries, label_prefix, draws);
  return FrequencyTable(std::move(entries));
}

// ---------------------------------------------------------------------------

GeometricModel solve_geometric_for_entropy(double target_bits) {
  if (!(target_bits > 0.0) || !std::isfinite(target_bits)) {
    throw Error(ErrorKind::domain, "target entropy must be positive");
  }
  double lo = 0.0;
  double hi = 1.0;
  const double q_max = std::nextafter(1.0, 0.0);
  if (geometric_entropy_bits(q_max) < target_bits) {
    throw Error(ErrorKind::domain, "target entropy exceeds double precision range");
  }
  // Entropy is strictly increasing in q.
  double mid = 0.5;
  for (int i = 0; i < 2000; ++i) {
    mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double h = geometric_entropy_bits(mid);
    if (h == target_bits) break;
    if (h < target_bits) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return GeometricModel(mid);
}

std::string family_name(const ParametricModel& model) {
  return std::visit(
      overloaded{
          [](const GeometricModel&) { return std::string("geometric"); },
          [](const ZipfModel&) { return std::string("zipf"); },
          [](const MixtureModel&) { return std::string("mixture"); },
      },
      model);
}

}  // namespace rankfreq
