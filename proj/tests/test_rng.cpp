#include "dirichlet_lab/parallel.hpp"
#include "dirichlet_lab/rng.hpp"

#include <gtest/gtest.h>

#include <stdexcept>

using namespace dlab;

TEST(Rng, SameSeedSameStream) {
  CounterRng a(42), b(42), c(43);
  for (int i = 0; i < 100; ++i) {
    const auto x = a();
    EXPECT_EQ(x, b());
    EXPECT_NE(x, c());
  }
}

TEST(Rng, SubstreamsAreIndependentOfDrawOrder) {
  CounterRng root(7);
  const auto first = root.substream(3)();
  root();
  root();
  EXPECT_EQ(root.substream(3)(), first);
  EXPECT_NE(root.substream(4)(), first);
}

TEST(Rng, UniformRanges) {
  CounterRng rng(1);
  double sum = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
    const auto k = rng.uniform_int(-3, 3);
    ASSERT_GE(k, -3);
    ASSERT_LE(k, 3);
  }
  EXPECT_NEAR(sum / 10000, 0.5, 0.02);
}

TEST(Rng, RandomUnimodularHasUnitDeterminant) {
  CounterRng rng(2);
  for (int d = 2; d <= 6; ++d) EXPECT_NEAR(random_unimodular(d, rng).determinant(), 1.0, 1e-10);
}

TEST(Parallel, PreservesOrderAndRethrows) {
  const auto out = parallel_map(100, 4, [](std::size_t i) { return static_cast<int>(i * i); });
  for (std::size_t i = 0; i < out.size(); ++i) EXPECT_EQ(out[i], static_cast<int>(i * i));
  EXPECT_THROW(parallel_map(10, 3,
                            [](std::size_t i) -> int {
                              if (i == 7) throw std::runtime_error("boom");
                              return 0;
                            }),
               std::runtime_error);
}
