#include "prodsv/rng.hpp"

#include <cmath>
#include <numbers>

namespace prodsv {

namespace {
constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kChildSalt = 0xD1B54A32D192ED03ULL;
}  // namespace

std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ULL;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBULL;
  x ^= x >> 31;
  return x;
}

SeedStream::SeedStream(std::uint64_t seed) : key_(mix64(seed + kGamma)) {}

SeedStream SeedStream::substream(std::uint64_t index) const {
  const std::uint64_t child = mix64(key_ ^ mix64((index + 1) * kChildSalt));
  return SeedStream(child, 0, 0);
}

std::uint64_t SeedStream::next_u64() {
  const std::uint64_t c = counter_++;
  return mix64(key_ + (c + 1) * kGamma);
}

double SeedStream::uniform01() {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double SeedStream::normal() {
  const double u1 = uniform01();
  const double u2 = uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Complex SeedStream::complex_normal() {
  // |x|^2 ~ Exp(1) with a uniform phase.
  const double r = std::sqrt(-std::log(uniform01()));
  const double theta = 2.0 * std::numbers::pi * uniform01();
  return {r * std::cos(theta), r * std::sin(theta)};
}

std::uint64_t SeedStream::below(std::uint64_t bound) {
  if (bound <= 1) return 0;
  const std::uint64_t limit = max() - max() % bound;
  std::uint64_t x = next_u64();
  while (x >= limit) x = next_u64();
  return x % bound;
}

}  // namespace prodsv
