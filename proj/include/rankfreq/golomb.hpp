#pragma once

// Golomb codes over ranks. Rank r is coded as v = r - 1: the quotient v / m in
// unary (that many '1' bits closed by a '0'), then the remainder v % m in
// truncated binary. With b = ceil(log2 m) and c = 2^b - m, remainders below c
// take b - 1 bits and the rest are written as remainder + c in b bits.
//
// For a geometric source with decay q the code is optimal when m is the
// smallest integer with q^m + q^(m+1) <= 1.

#include <cstdint>
#include <string>
#include <string_view>

#include "rankfreq/models.hpp"

namespace rankfreq {

class GolombCode {
 public:
  // Throws Error(domain) for m = 0.
  explicit GolombCode(std::uint64_t m);

  std::uint64_t m() const noexcept { return m_; }
  unsigned bits() const noexcept { return b_; }
  std::uint64_t cutoff() const noexcept { return cutoff_; }

  // Codeword as a string of '0'/'1'. Throws Error(domain) for rank 0.
  std::string encode(Rank r) const;
  std::size_t codeword_length(Rank r) const;

  struct Decoded {
    Rank rank = 0;
    std::size_t consumed = 0;
    bool operator==(const Decoded&) const = default;
  };
  // Decodes the codeword at the front of `bits`. Throws Error(decode) on a
  // truncated codeword or a character other than '0'/'1'.
  Decoded decode(std::string_view bits) const;

  bool operator==(const GolombCode&) const = default;

 private:
  std::uint64_t m_;
  unsigned b_;
  std::uint64_t cutoff_;
};

// Smallest m with q^m + q^(m+1) <= 1. Throws Error(domain) unless 0 < q < 1.
std::uint64_t optimal_m(double q);

// Σ_r pmf(r) len(r) in bits/symbol. The unbounded geometric uses the exact
// closed form; other models sum over their support.
double expected_length(const ParametricModel& model, const GolombCode& code);

struct CodeStats {
  double q = 0.0;
  std::uint64_t m = 0;
  double entropy_bits = 0.0;
  double expected_length_bits = 0.0;
  double efficiency = 0.0;  // entropy / expected length
  bool operator==(const CodeStats&) const = default;
};

CodeStats code_stats(const ParametricModel& model, const GolombCode& code);

// Stats for the unbounded geometric q under its optimal code.
CodeStats geometric_code_stats(double q);

// m in [1, max_m] with the smallest expected length (first on ties).
std::uint64_t best_m_by_search(const ParametricModel& model, std::uint64_t max_m);

}  // namespace rankfreq
