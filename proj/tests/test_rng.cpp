#include "cooc/rng.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdint>
#include <vector>

namespace cooc {
namespace {

TEST(Rng, SameKeySameStream) {
  Rng a(42, "test", 7);
  Rng b(42, "test", 7);
  for (int i = 0; i < 1000; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
}

TEST(Rng, DistinctKeysDistinctStreams) {
  Rng base(42, "test", 0);
  Rng other_seed(43, "test", 0);
  Rng other_purpose(42, "test2", 0);
  Rng other_index(42, "test", 1);
  const uint64_t x = base.next_u64();
  // A collision on the first draw across all three variations would be a
  // keying bug, not chance.
  EXPECT_FALSE(x == other_seed.next_u64() && x == other_purpose.next_u64() &&
               x == other_index.next_u64());
}

TEST(Rng, DoublesAreUniformInUnitInterval) {
  Rng rng(1, "unit");
  const int n = 100000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.next_double();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / n, 0.5, 0.005);
}

TEST(Rng, NextBelowStaysInRangeAndCoversIt) {
  Rng rng(2, "below");
  std::vector<int> seen(7, 0);
  for (int i = 0; i < 7000; ++i) {
    const uint64_t v = rng.next_below(7);
    ASSERT_LT(v, 7u);
    ++seen[static_cast<int>(v)];
  }
  for (int c : seen) EXPECT_GT(c, 800);
  EXPECT_EQ(rng.next_below(1), 0u);
}

TEST(Rng, GaussianMoments) {
  Rng rng(3, "gauss");
  const int n = 200000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double g = rng.next_gauss();
    sum += g;
    sq += g * g;
  }
  EXPECT_NEAR(sum / n, 0.0, 0.01);
  EXPECT_NEAR(sq / n, 1.0, 0.02);
}

TEST(Rng, PoissonMeanAndVarianceBothRegimes) {
  // Means below and above the product/PTRS switchover at 30.
  for (double mean : {0.3, 4.5, 200.0}) {
    Rng rng(4, "poisson", static_cast<uint64_t>(mean * 10));
    const int n = 100000;
    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < n; ++i) {
      const double k = static_cast<double>(rng.next_poisson(mean));
      sum += k;
      sq += k * k;
    }
    const double m = sum / n;
    const double var = sq / n - m * m;
    EXPECT_NEAR(m, mean, 5.0 * std::sqrt(mean / n)) << "mean " << mean;
    EXPECT_NEAR(var, mean, 0.05 * mean + 0.05) << "mean " << mean;
  }
}

TEST(Rng, GammaMeanBothShapeRegimes) {
  for (double shape : {0.4, 2.5, 9.0}) {
    Rng rng(5, "gamma", static_cast<uint64_t>(shape * 10));
    const int n = 100000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += rng.next_gamma(shape);
    // Gamma(shape, 1) has mean = shape, variance = shape.
    EXPECT_NEAR(sum / n, shape, 5.0 * std::sqrt(shape / n)) << "shape " << shape;
  }
}

TEST(AliasTable, MatchesWeights) {
  const std::vector<double> w = {0.5, 0.25, 0.125, 0.125};
  AliasTable table(w);
  Rng rng(6, "alias");
  std::vector<int> hits(w.size(), 0);
  const int n = 200000;
  for (int i = 0; i < n; ++i) ++hits[table.draw(rng)];
  for (size_t i = 0; i < w.size(); ++i) {
    const double freq = static_cast<double>(hits[i]) / n;
    EXPECT_NEAR(freq, w[i], 5.0 * std::sqrt(w[i] / n)) << "cell " << i;
  }
}

TEST(AliasTable, SingleCell) {
  AliasTable table({3.0});
  Rng rng(7, "alias1");
  for (int i = 0; i < 10; ++i) EXPECT_EQ(table.draw(rng), 0u);
}

}  // namespace
}  // namespace cooc
