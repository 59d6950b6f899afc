#pragma once

#include <cstdint>
#include <limits>

#include "prodsv/numerics.hpp"

namespace prodsv {

/// Counter-based random stream. The output at position `c` is a pure
/// function of (key, c), and substream(i) derives an independent key, so a
/// tree of (master seed, trial, factor, entry) indices addresses a unique
/// stream without any shared state.
///
/// Only integer mixing is used to produce raw bits; floating-point
/// variates go through fixed formulas (no std:: distributions), so sample
/// values do not depend on the standard library implementation.
class SeedStream {
 public:
  using result_type = std::uint64_t;

  explicit SeedStream(std::uint64_t seed = 0);

  SeedStream substream(std::uint64_t index) const;

  std::uint64_t key() const { return key_; }
  std::uint64_t position() const { return counter_; }

  std::uint64_t next_u64();
  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform01();
  /// Standard real normal N(0, 1).
  double normal();
  /// Standard complex Gaussian: independent N(0, 1/2) real and imaginary
  /// parts, so E|x|^2 = 1.
  Complex complex_normal();
  /// Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound);

  // UniformRandomBitGenerator
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() { return next_u64(); }

 private:
  SeedStream(std::uint64_t key, std::uint64_t counter, int) : key_(key), counter_(counter) {}

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

}  // namespace prodsv
