#pragma once

#include <cstdint>

namespace rankfreq {

// Counter-based random stream: draw i is a pure function of (seed, stream, i),
// so results never depend on evaluation order or thread schedule.
class CounterStream {
 public:
  CounterStream(std::uint64_t seed, std::uint64_t stream = 0) noexcept;

  std::uint64_t bits(std::uint64_t counter) const noexcept;
  // Uniform on [0, 1) with 53 bits of resolution.
  double uniform(std::uint64_t counter) const noexcept;

 private:
  std::uint64_t key_;
};

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Child seed for sub-experiment `index` of a master seed.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept {
  return mix64(mix64(seed) ^ mix64(index + 0x5851f42d4c957f2dULL));
}

inline CounterStream::CounterStream(std::uint64_t seed, std::uint64_t stream) noexcept
    : key_(mix64(seed ^ mix64(stream ^ 0xd1b54a32d192ed03ULL))) {}

inline std::uint64_t CounterStream::bits(std::uint64_t counter) const noexcept {
  return mix64(key_ ^ mix64(counter));
}

inline double CounterStream::uniform(std::uint64_t counter) const noexcept {
  return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
}

}  // namespace rankfreq
