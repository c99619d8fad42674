#include "lpl/rng.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <set>

TEST(rng, streams_are_reproducible) {
  lpl::Rng a(99), b(99);
  for (int k = 0; k < 1000; ++k) EXPECT_EQ(a.next_u64(), b.next_u64());
  lpl::Rng c(99), d(100);
  int diff = 0;
  for (int k = 0; k < 64; ++k) diff += c.next_u64() != d.next_u64();
  EXPECT_GT(diff, 60);
}

TEST(rng, normal_moments) {
  lpl::Rng rng(2024);
  const int n = 200000;
  double sum = 0.0, sumsq = 0.0;
  for (int k = 0; k < n; ++k) {
    const double x = rng.normal();
    sum += x;
    sumsq += x * x;
  }
  const double mean = sum / n;
  const double var = sumsq / n - mean * mean;
  EXPECT_NEAR(mean, 0.0, 0.01);
  EXPECT_NEAR(var, 1.0, 0.02);
}

TEST(rng, bounded_is_unbiased_and_in_range) {
  lpl::Rng rng(5);
  std::vector<int> counts(7, 0);
  const int n = 70000;
  for (int k = 0; k < n; ++k) {
    const auto v = rng.bounded(7);
    ASSERT_LT(v, 7u);
    ++counts[v];
  }
  for (int c : counts) EXPECT_NEAR(c, n / 7.0, 5.0 * std::sqrt(n / 7.0));
}

TEST(rng, trial_seeds_are_distinct) {
  std::set<std::uint64_t> seen;
  for (int p : {64, 128})
    for (int ti = 0; ti < 24; ++ti)
      for (int k = 0; k < 50; ++k)
        seen.insert(lpl::trial_seed(1234, p, ti, k));
  EXPECT_EQ(seen.size(), 2u * 24u * 50u);
  EXPECT_EQ(lpl::trial_seed(1, 2, 3, 4), lpl::trial_seed(1, 2, 3, 4));
  EXPECT_NE(lpl::trial_seed(1, 2, 3, 4), lpl::trial_seed(2, 2, 3, 4));
}
