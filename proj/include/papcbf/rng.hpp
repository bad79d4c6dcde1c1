#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>

namespace papcbf {

/*
 * Counter-based generator built on the SplitMix64 finalizer.
 *
 * Output n of a stream with key k is mix64(k + (n + 1) * 0x9E3779B97F4A7C15), i.e.
 * exactly SplitMix64 seeded with k. Streams are keyed by (seed, trial, purpose)
 * through stream_key(), so any trial can be regenerated independently of the
 * others and of the order in which trials run.
 */
class CounterRng {
 public:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

  static constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  static constexpr std::uint64_t stream_key(std::uint64_t seed, std::uint64_t trial,
                                            std::uint64_t purpose) {
    const std::uint64_t a = mix64(seed + kGamma);
    const std::uint64_t b = mix64(a ^ (trial * 0xD1B54A32D192ED03ULL + kGamma));
    return mix64(b ^ (purpose * 0xAEF17502108EF2D9ULL + kGamma));
  }

  constexpr explicit CounterRng(std::uint64_t key) : key_(key) {}

  constexpr std::uint64_t next() {
    ++counter_;
    return mix64(key_ + counter_ * kGamma);
  }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return double(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Circularly-symmetric complex Gaussian with E|x|^2 = variance (Box-Muller).
  std::complex<double> complex_normal(double variance = 1.0) {
    const double u1 = double((next() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
    const double u2 = uniform();
    const double r = std::sqrt(-std::log(u1) * variance);
    const double phi = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(phi), r * std::sin(phi)};
  }

  // Real standard normal (real part of a unit-variance complex draw, rescaled).
  double normal() { return std::sqrt(2.0) * complex_normal(1.0).real(); }

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace papcbf
