#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <vector>

#include "oracles.hpp"
#include "prodsv/rng.hpp"

using namespace prodsv;

TEST(SeedStream, SameSeedSameSequence) {
  SeedStream a(42), b(42);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a.next_u64(), b.next_u64());
}

TEST(SeedStream, DifferentSeedsDiffer) {
  SeedStream a(1), b(2);
  int same = 0;
  for (int i = 0; i < 100; ++i) same += a.next_u64() == b.next_u64();
  EXPECT_EQ(same, 0);
}

TEST(SeedStream, SubstreamIsPureFunctionOfIndex) {
  SeedStream root(7);
  root.next_u64();  // advancing the parent does not move its children
  SeedStream c1 = root.substream(3);
  SeedStream c2 = SeedStream(7).substream(3);
  for (int i = 0; i < 100; ++i) ASSERT_EQ(c1.next_u64(), c2.next_u64());
}

TEST(SeedStream, SubstreamKeysAreDistinct) {
  SeedStream root(9);
  std::set<std::uint64_t> keys;
  for (std::uint64_t i = 0; i < 5000; ++i) keys.insert(root.substream(i).key());
  for (std::uint64_t i = 0; i < 50; ++i) {
    for (std::uint64_t j = 0; j < 50; ++j) keys.insert(root.substream(i).substream(j).key());
  }
  EXPECT_EQ(keys.size(), 5000u + 2500u);
}

TEST(SeedStream, PositionCounts) {
  SeedStream s(1);
  EXPECT_EQ(s.position(), 0u);
  s.next_u64();
  s.uniform01();
  EXPECT_EQ(s.position(), 2u);
}

TEST(SeedStream, UniformIsInOpenUnitInterval) {
  SeedStream s(5);
  double sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = s.uniform01();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  // mean 1/2, sd 1/sqrt(12 n)
  EXPECT_LE(std::abs(sum / n - 0.5), 4.0 / std::sqrt(12.0 * n));
}

TEST(SeedStream, NormalMoments) {
  SeedStream s(6);
  const int n = 200000;
  double m1 = 0.0, m2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = s.normal();
    m1 += x;
    m2 += x * x;
  }
  m1 /= n;
  m2 /= n;
  EXPECT_LE(std::abs(m1), 4.0 / std::sqrt(n));
  EXPECT_LE(std::abs(m2 - 1.0), 4.0 * std::sqrt(2.0 / n));
}

TEST(SeedStream, NormalMatchesCdfAtQuartiles) {
  SeedStream s(16);
  const int n = 100000;
  const double cuts[] = {-1.0, 0.0, 1.0};
  int counts[3] = {0, 0, 0};
  for (int i = 0; i < n; ++i) {
    const double x = s.normal();
    for (int k = 0; k < 3; ++k) counts[k] += x <= cuts[k];
  }
  for (int k = 0; k < 3; ++k) {
    const double p = oracle::normal_cdf(cuts[k]);
    EXPECT_LE(std::abs(counts[k] / double(n) - p), 4.0 * std::sqrt(p * (1 - p) / n));
  }
}

TEST(SeedStream, ComplexNormalConvention) {
  SeedStream s(8);
  const int n = 200000;
  double re2 = 0.0, im2 = 0.0, abs4 = 0.0;
  Complex mean(0, 0), pseudo(0, 0);
  for (int i = 0; i < n; ++i) {
    const Complex x = s.complex_normal();
    re2 += x.real() * x.real();
    im2 += x.imag() * x.imag();
    abs4 += std::norm(x) * std::norm(x);
    mean += x;
    pseudo += x * x;
  }
  EXPECT_NEAR(re2 / n, 0.5, 4.0 * 0.5 * std::sqrt(2.0 / n));
  EXPECT_NEAR(im2 / n, 0.5, 4.0 * 0.5 * std::sqrt(2.0 / n));
  EXPECT_LE(std::abs(mean) / n, 4.0 / std::sqrt(n));
  EXPECT_LE(std::abs(pseudo) / n, 4.0 * std::sqrt(2.0 / n));
  // E|x|^4 = 2, Var|x|^4 = 24 - 4 = 20
  EXPECT_NEAR(abs4 / n, 2.0, 4.0 * std::sqrt(20.0 / n));
}

TEST(SeedStream, BelowIsUniform) {
  SeedStream s(10);
  std::vector<int> counts(7, 0);
  const int n = 70000;
  for (int i = 0; i < n; ++i) {
    const auto k = s.below(7);
    ASSERT_LT(k, 7u);
    ++counts[k];
  }
  for (int c : counts) EXPECT_NEAR(c, n / 7.0, 4.0 * std::sqrt(n / 7.0));
  EXPECT_EQ(s.below(1), 0u);
  EXPECT_EQ(s.below(0), 0u);
}

TEST(SeedStream, WorksAsStdBitGenerator) {
  SeedStream s(11);
  static_assert(SeedStream::min() == 0);
  const auto x = s();
  SeedStream t(11);
  EXPECT_EQ(x, t.next_u64());
}

TEST(Mix64, KnownSplitMixOutput) {
  // SplitMix64 with state 0 produces this as its first output
  EXPECT_EQ(mix64(0x9E3779B97F4A7C15ULL), 0xE220A8397B1DCDAFULL);
}
