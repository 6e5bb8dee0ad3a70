#pragma once

#include <cmath>
#include <cstdint>

namespace d2d {

// Fading families used as part of the stream id. SELECT is the stream
// consumed by the random relay baseline.
enum class Fade : std::uint32_t {
  SR = 0,
  RD = 1,
  CR = 2,
  RB = 3,
  CD = 4,
  SB = 5,
  CB = 6,
  PHI = 7,
  SELECT = 8,
};

// Pack (family, relay, subcarrier) into one 32-bit stream id. Counts are
// validated to fit 14 bits each.
constexpr std::uint32_t stream_id(Fade f, std::uint32_t relay, std::uint32_t subcarrier) {
  return (static_cast<std::uint32_t>(f) << 28) | (relay << 14) | subcarrier;
}

// Counter-based generator. Every variate is a pure function of
// (seed, trial, stream), so a simulation result never depends on the
// order draws happen to be made in, or on how trials are partitioned
// across workers.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed)
      : seed_(seed), base_(mix(seed ^ 0x2545f4914f6cdd1dULL)) {}

  std::uint64_t seed() const { return seed_; }

  // Uniform on [0, 1), 53 significant bits.
  double uniform(std::uint64_t trial, std::uint32_t stream) const {
    std::uint64_t h = mix(base_ ^ (trial * 0x9e3779b97f4a7c15ULL));
    h = mix(h ^ (static_cast<std::uint64_t>(stream) * 0xd1b54a32d192ed03ULL));
    return static_cast<double>(h >> 11) * 0x1.0p-53;
  }

  // Exponential with the given mean, by inversion. log1p keeps full
  // precision near u = 0 and maps u = 0 to exactly 0.
  double exponential(double mean, std::uint64_t trial, std::uint32_t stream) const {
    return -mean * std::log1p(-uniform(trial, stream));
  }

  // splitmix64 finalizer; full-avalanche 64-bit mix.
  static constexpr std::uint64_t mix(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
  }

 private:
  std::uint64_t seed_;
  std::uint64_t base_;
};

}  // namespace d2d
