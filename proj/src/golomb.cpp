#include "rankfreq/golomb.hpp"

#include <bit>
#include <cmath>
#include <limits>

#include "rankfreq/error.hpp"

namespace rankfreq {

namespace {

constexpr std::uint64_t kMaxM = std::uint64_t{1} << 62;

unsigned ceil_log2(std::uint64_t m) {
  return m <= 1 ? 0u : static_cast<unsigned>(std::bit_width(m - 1));
}

double remainder_bits(std::uint64_t rem, unsigned b, std::uint64_t cutoff) {
  if (b == 0) return 0.0;
  return rem < cutoff ? static_cast<double>(b - 1) : static_cast<double>(b);
}

}  // namespace

GolombCode::GolombCode(std::uint64_t m) : m_(m), b_(ceil_log2(m)), cutoff_(0) {
  if (m == 0 || m > kMaxM) throw Error(ErrorKind::domain, "Golomb parameter m out of range");
  cutoff_ = (std::uint64_t{1} << b_) - m_;
}

std::string GolombCode::encode(Rank r) const {
  if (r == 0) throw Error(ErrorKind::domain, "ranks start at 1");
  const std::uint64_t v = r - 1;
  const std::uint64_t quotient = v / m_;
  const std::uint64_t rem = v % m_;

  std::string out(quotient, '1');
  out += '0';
  if (b_ == 0) return out;
  unsigned width = b_;
  std::uint64_t value = rem + cutoff_;
  if (rem < cutoff_) {
    width = b_ - 1;
    value = rem;
  }
  for (unsigned i = width; i > 0; --i) out += ((value >> (i - 1)) & 1u) ? '1' : '0';
  return out;
}

std::size_t GolombCode::codeword_length(Rank r) const {
  if (r == 0) throw Error(ErrorKind::domain, "ranks start at 1");
  const std::uint64_t v = r - 1;
  return static_cast<std::size_t>(v / m_ + 1 +
                                  static_cast<std::uint64_t>(remainder_bits(v % m_, b_, cutoff_)));
}

GolombCode::Decoded GolombCode::decode(std::string_view bits) const {
  std::size_t pos = 0;
  auto next_bit = [&]() -> unsigned {
    if (pos >= bits.size()) throw Error(ErrorKind::decode, "truncated codeword");
    const char ch = bits[pos++];
    if (ch != '0' && ch != '1') throw Error(ErrorKind::decode, "bit strings hold only '0' and '1'");
    return ch == '1' ? 1u : 0u;
  };

  std::uint64_t quotient = 0;
  while (next_bit() == 1u) ++quotient;

  std::uint64_t rem = 0;
  if (b_ > 0) {
    std::uint64_t x = 0;
    for (unsigned i = 0; i + 1 < b_; ++i) x = (x << 1) | next_bit();
    if (x < cutoff_) {
      rem = x;
    } else {
      x = (x << 1) | next_bit();
      rem = x - cutoff_;
    }
    if (rem >= m_) throw Error(ErrorKind::decode, "remainder out of range");
  }
  return {quotient * m_ + rem + 1, pos};
}

std::uint64_t optimal_m(double q) {
  if (!(q > 0.0 && q < 1.0)) throw Error(ErrorKind::domain, "q must lie in (0, 1)");
  // The smallest m with q^m (1 + q) <= 1 is ceil(-log(1+q) / log q); step
  // from just below it to absorb rounding.
  const double estimate = std::ceil(-std::log1p(q) / std::log(q));
  std::uint64_t m = estimate > 2.0 ? static_cast<std::uint64_t>(estimate) - 1 : 1;
  auto satisfies = [q](std::uint64_t k) {
    const double qk = std::pow(q, static_cast<double>(k));
    return qk + qk * q <= 1.0;
  };
  while (m > 1 && satisfies(m - 1)) --m;
  while (!satisfies(m)) ++m;
  return m;
}

double expected_length(const ParametricModel& model, const GolombCode& code) {
  if (const auto* g = std::get_if<GeometricModel>(&model); g && !g->truncation()) {
    // v = r - 1 has quotient ~ Geometric(q^m) and remainder j with
    // probability (1-q) q^j / (1 - q^m).
    const double q = g->q();
    const double qm = std::pow(q, static_cast<double>(code.m()));
    const double one_minus_qm = -std::expm1(static_cast<double>(code.m()) * std::log(q));
    double len = qm / one_minus_qm + 1.0;
    double pj = (1.0 - q) / one_minus_qm;
    for (std::uint64_t j = 0; j < code.m(); ++j) {
      len += pj * remainder_bits(j, code.bits(), code.cutoff());
      pj *= q;
    }
    return len;
  }
  const auto support = support_size(model);
  double len = 0.0;
  for (Rank r = 1; r <= *support; ++r) {
    len += pmf(model, r) * static_cast<double>(code.codeword_length(r));
  }
  return len;
}

CodeStats code_stats(const ParametricModel& model, const GolombCode& code) {
  CodeStats stats;
  if (const auto* g = std::get_if<GeometricModel>(&model)) stats.q = g->q();
  stats.m = code.m();
  stats.entropy_bits = model_entropy(model);
  stats.expected_length_bits = expected_length(model, code);
  stats.efficiency = stats.entropy_bits / stats.expected_length_bits;
  return stats;
}

CodeStats geometric_code_stats(double q) {
  return code_stats(GeometricModel(q), GolombCode(optimal_m(q)));
}

std::uint64_t best_m_by_search(const ParametricModel& model, std::uint64_t max_m) {
  std::uint64_t best = 1;
  double best_len = std::numeric_limits<double>::infinity();
  for (std::uint64_t m = 1; m <= max_m; ++m) {
    const double len = expected_length(model, GolombCode(m));
    if (len < best_len) {
      best_len = len;
      best = m;
    }
  }
  return best;
}

}  // namespace rankfreq
