#include <cmath>
#include <set>

#include "doctest.h"
#include "helpers.hpp"
#include "oracles.hpp"
#include "rankfreq/golomb.hpp"

using namespace rankfreq;

TEST_CASE("codewords match the reference construction") {
  for (std::uint64_t m : {1, 2, 3, 4, 5, 7, 8, 10, 64, 100}) {
    const GolombCode code(m);
    for (Rank r = 1; r <= 2000; ++r) {
      const auto word = code.encode(r);
      REQUIRE(word == oracle::golomb(r, m));
      CHECK(code.codeword_length(r) == word.size());
    }
  }
  CHECK(GolombCode(1).encode(3) == "110");
  CHECK(GolombCode(3).encode(1) == "00");
  CHECK(GolombCode(3).encode(2) == "010");
  CHECK(GolombCode(3).encode(3) == "011");
  CHECK(GolombCode(3).encode(4) == "100");
  CHECK(GolombCode(4).encode(6) == "1001");
  CHECK(GolombCode(3).bits() == 2);
  CHECK(GolombCode(3).cutoff() == 1);
}

TEST_CASE("decode inverts encode and reports consumed bits") {
  for (std::uint64_t m : {1, 2, 3, 5, 7, 64}) {
    const GolombCode code(m);
    std::string stream;
    for (Rank r = 1; r <= 10000; ++r) {
      const auto word = code.encode(r);
      CHECK(code.decode(word) == GolombCode::Decoded{r, word.size()});
      if (r % 97 == 0) stream += word;
    }
    std::string_view rest = stream;
    for (Rank r = 97; r <= 10000; r += 97) {
      const auto d = code.decode(rest);
      CHECK(d.rank == r);
      rest.remove_prefix(d.consumed);
    }
    CHECK(rest.empty());
  }
}

TEST_CASE("codes are prefix-free and satisfy Kraft") {
  for (std::uint64_t m : {1, 2, 3, 5, 7, 64}) {
    const GolombCode code(m);
    std::set<std::string> words;
    long double kraft = 0;
    for (Rank r = 1; r <= 10000; ++r) {
      words.insert(code.encode(r));
      kraft += std::ldexp(1.0L, -static_cast<int>(code.codeword_length(r)));
    }
    // In sorted order a prefix sits directly before some word it prefixes.
    bool prefix_free = true;
    for (auto it = words.begin(); std::next(it) != words.end(); ++it) {
      const auto& next = *std::next(it);
      if (next.compare(0, it->size(), *it) == 0) prefix_free = false;
    }
    CHECK(prefix_free);
    CHECK(words.size() == 10000);
    // Ranks past 10^4 share quotient groups of mass 2^-(q+1) each.
    const long double tail = std::ldexp(1.0L, -static_cast<int>(9999 / m));
    CHECK(kraft + tail <= 1.0L + 1e-15L);
  }
}

TEST_CASE("decode errors") {
  const GolombCode code(5);
  CHECK(error_kind([&] { code.decode(""); }) == ErrorKind::decode);
  CHECK(error_kind([&] { code.decode("111"); }) == ErrorKind::decode);
  CHECK(error_kind([&] { code.decode("10"); }) == ErrorKind::decode);
  CHECK(error_kind([&] { code.decode("0x1"); }) == ErrorKind::decode);
  CHECK(error_kind([&] { code.encode(0); }) == ErrorKind::domain);
  CHECK(error_kind([] { GolombCode(0); }) == ErrorKind::domain);
}

TEST_CASE("optimal m is the smallest with q^m + q^(m+1) <= 1") {
  CHECK(optimal_m(0.5) == 1);
  CHECK(optimal_m(0.8) == 3);
  CHECK(optimal_m(0.9) == 7);
  for (double q = 0.01; q < 0.999; q += 0.0137) {
    const auto m = optimal_m(q);
    CHECK(std::pow(q, m) + std::pow(q, m + 1) <= 1.0);
    if (m > 1) CHECK(std::pow(q, m - 1) + std::pow(q, m) > 1.0);
  }
  CHECK(error_kind([] { optimal_m(1.0); }) == ErrorKind::domain);
}

TEST_CASE("expected length closed form matches summation") {
  for (double q : {0.3, 0.5, 0.8, 0.9, 0.95}) {
    for (std::uint64_t m : {1, 2, 3, 6, 7, 13}) {
      CHECK(expected_length(GeometricModel(q), GolombCode(m)) ==
            doctest::Approx(oracle::golomb_expected_length(q, m)).epsilon(1e-10));
    }
  }
  // Truncated and Zipf sources are summed over their support.
  const ParametricModel z = ZipfModel(1.0, 50);
  long double e = 0;
  for (Rank r = 1; r <= 50; ++r) e += pmf(z, r) * oracle::golomb(r, 4).size();
  CHECK(expected_length(z, GolombCode(4)) == doctest::Approx(static_cast<double>(e)));
}

TEST_CASE("optimal m minimizes expected length") {
  for (double q : {0.5, 0.8, 0.9, 0.95}) {
    const GeometricModel g(q);
    const auto best = optimal_m(q);
    const double best_len = expected_length(g, GolombCode(best));
    for (std::uint64_t m = 1; m <= 128; ++m) {
      CHECK(expected_length(g, GolombCode(m)) >= best_len - 1e-12);
    }
    CHECK(best_m_by_search(g, 128) == best);
  }
}

TEST_CASE("source coding bound and efficiency") {
  const auto half = geometric_code_stats(0.5);
  CHECK(half.m == 1);
  CHECK(half.expected_length_bits == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(half.entropy_bits == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(half.efficiency == doctest::Approx(1.0).epsilon(1e-15));
  for (double q : {0.3, 0.6, 0.8, 0.9, 0.95, 0.99}) {
    for (std::uint64_t m : {1, 2, 4, 9}) {
      const auto s = code_stats(GeometricModel(q), GolombCode(m));
      CHECK(s.expected_length_bits > s.entropy_bits);
    }
    // Below q = 1/2 even m = 1 spends a whole bit per unary step.
    if (q >= 0.5) CHECK(geometric_code_stats(q).efficiency > 0.97);
  }
  CHECK(geometric_code_stats(0.3).efficiency < 0.9);
  const auto z = code_stats(ZipfModel(1.0, 100), GolombCode(4));
  CHECK(z.expected_length_bits > z.entropy_bits);
  CHECK(z.entropy_bits == doctest::Approx(oracle::zipf_entropy(1.0, 100)));
}

TEST_CASE("worked coding examples") {
  CHECK(optimal_m(1e-9) == 1);
  CHECK(optimal_m(0.618) == 1);
  CHECK(GolombCode(1).encode(1) == "0");
  CHECK(GolombCode(3).encode(5) == "1010");
  CHECK(GolombCode(1).decode("0").rank == 1);
  CHECK(GolombCode(3).decode("1010").rank == 5);
  const ParametricModel z = ZipfModel(1.0, 100);
  const auto best = best_m_by_search(z, 128);
  const auto s = code_stats(z, GolombCode(best));
  CHECK(s.expected_length_bits - s.entropy_bits > 0.01);
  for (double q : {0.5, 0.8, 0.9, 0.95}) {
    const auto g = code_stats(GeometricModel(q), GolombCode(optimal_m(q)));
    CHECK(g.efficiency > 0.97);
    CHECK(g.efficiency <= 1.0);
  }
}
