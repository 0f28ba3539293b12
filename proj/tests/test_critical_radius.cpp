#include "dirichlet_lab/critical_radius.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace dlab;

TEST(CriticalRadius, RegisteredValues) {
  for (int d = 2; d <= 6; ++d) EXPECT_EQ(*exact_critical_radius(NormDescriptor::sup(d)), 1.0);
  EXPECT_NEAR(*exact_critical_radius(NormDescriptor::euclidean(2)), 1.0745699318235423, 1e-15);
  EXPECT_FALSE(exact_critical_radius(NormDescriptor::euclidean(9)));
  EXPECT_FALSE(exact_critical_radius(NormDescriptor::lp(2, 3.0)));
  EXPECT_FALSE(exact_critical_radius(parse_norm("cyl", 3)));
}

TEST(CriticalRadius, HexagonalWitness) {
  const auto hex = hexagonal_lattice();
  const double a = std::pow(4.0 / 3.0, 0.25);
  EXPECT_NEAR(hex.basis()(0, 0), a, 1e-15);
  EXPECT_NEAR(hex.basis()(0, 1), a / 2, 1e-15);
  EXPECT_NEAR(hex.basis()(1, 1), a * std::sqrt(3.0) / 2, 1e-15);
  EXPECT_NEAR(first_minimum(hex, NormDescriptor::euclidean(2)).value, a, 1e-12);
}

// The face-centred cubic lattice, built here from its textbook basis, is the
// densest lattice in R^3; its det-1 scaling has minimum 2^{1/6}.
TEST(CriticalRadius, FccMatchesRegisteredValueInDimensionThree) {
  Matrix fcc(3, 3);
  fcc << 1, 1, 0, 1, 0, 1, 0, 1, 1;
  const auto l = Lattice::normalized(fcc);
  const auto nu = NormDescriptor::euclidean(3);
  const double fcc_min = oracle::brute_first_minimum(l.basis(), [](const Vector& x) { return x.norm(); }, 1.0);
  EXPECT_NEAR(fcc_min, std::pow(2.0, 1.0 / 6.0), 1e-12);
  EXPECT_NEAR(*exact_critical_radius(nu), fcc_min, 1e-12);
  EXPECT_NEAR(first_minimum(*critical_witness(nu), nu).value, fcc_min, 1e-12);
}

TEST(CriticalRadius, RootLatticeWitnessesAttainRegisteredValues) {
  for (int d = 2; d <= 8; ++d) {
    const auto nu = NormDescriptor::euclidean(d);
    const auto w = critical_witness(nu);
    ASSERT_TRUE(w);
    EXPECT_NEAR(w->determinant(), 1.0, 1e-12);
    EXPECT_NEAR(first_minimum(*w, nu).value, *exact_critical_radius(nu), 1e-9) << "d = " << d;
  }
}

TEST(CriticalRadius, AttachedValueWins) {
  const auto nu = NormDescriptor::lp(2, 3.0).with_critical_radius({1.1, RadiusStatus::LowerBound});
  EXPECT_EQ(critical_radius(nu).value, 1.1);
}

// The cylinder max(|x_1, x_2|_2, |x_3|): stacking hexagonal layers of minimum
// r at height r is admissible with det (sqrt 3 / 2) r^3, so r = (2 / sqrt 3)^{1/3}.
TEST(CriticalRadius, EstimateIsLowerBoundCloseToCylinderValue) {
  const double analytic = std::cbrt(2.0 / std::sqrt(3.0));
  const auto cyl = parse_norm("cyl", 3);
  for (std::uint64_t seed = 1; seed <= 2; ++seed) {
    EstimateOptions opts;
    opts.seed = seed;
    const auto r = estimate_critical_radius(cyl, opts);
    EXPECT_EQ(r.status, RadiusStatus::LowerBound);
    EXPECT_LE(r.value, analytic + 1e-9);
    EXPECT_GT(r.value, analytic - 1e-3);
  }
}

TEST(CriticalRadius, EstimateNeverExceedsExactValue) {
  EstimateOptions opts;
  opts.iterations = 500;
  opts.restarts = 3;
  const auto r = estimate_critical_radius(NormDescriptor::euclidean(2), opts);
  EXPECT_LE(r.value, *exact_critical_radius(NormDescriptor::euclidean(2)) + 1e-9);
  EXPECT_GT(r.value, 1.07);
}

TEST(CriticalRadius, EstimateIsDeterministic) {
  EstimateOptions opts;
  opts.iterations = 200;
  opts.restarts = 2;
  opts.seed = 12;
  const auto nu = NormDescriptor::lp(2, 3.0);
  EXPECT_EQ(estimate_critical_radius(nu, opts).value, estimate_critical_radius(nu, opts).value);
}
