#include "dirichlet_lab/critical_loci.hpp"
#include "dirichlet_lab/dynamics.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace dlab;

namespace {

std::vector<int> random_permutation(int d, CounterRng& rng) {
  std::vector<int> p(d);
  std::iota(p.begin(), p.end(), 0);
  for (int i = d - 1; i > 0; --i) std::swap(p[i], p[rng.uniform_int(0, i)]);
  return p;
}

}  // namespace

TEST(Locus, HajosBasePointIsIntegerLattice) {
  auto desc = LocusDescriptor::hajos(3);
  desc.randomize = false;
  EXPECT_TRUE(sample_locus(desc, 1).basis().isIdentity());
}

TEST(Locus, HajosUnipotentExample) {
  Matrix u(2, 2);
  u << 1, 0.3, 0, 1;
  const Lattice l(permutation_matrix({0, 1}) * u * permutation_matrix({0, 1}));
  EXPECT_TRUE(l.basis().isApprox(u));
  EXPECT_NEAR(first_minimum(l, NormDescriptor::sup(2)).value, 1.0, 1e-12);
}

TEST(Locus, HexagonalBasePoint) {
  auto desc = LocusDescriptor::of(LocusKind::HexagonalEuclid2);
  desc.randomize = false;
  const auto l = sample_locus(desc, 0);
  const double a = std::pow(4.0 / 3.0, 0.25);
  Matrix expected(2, 2);
  expected << a, a / 2, 0, a * std::sqrt(3.0) / 2;
  EXPECT_TRUE(l.basis().isApprox(expected, 1e-14));
}

TEST(Locus, MembershipExamples) {
  EXPECT_TRUE(locus_membership(Lattice::integer(3), NormDescriptor::sup(3)));
  EXPECT_TRUE(locus_membership(hexagonal_lattice(), NormDescriptor::euclidean(2)));
  EXPECT_FALSE(locus_membership(Lattice::integer(2), NormDescriptor::euclidean(2)));
}

TEST(Locus, DescriptorValidation) {
  EXPECT_THROW(LocusDescriptor::hajos(3, {0, 0, 1}), InputError);
  EXPECT_THROW(LocusDescriptor::hajos(3, {0, 1}), InputError);
  LocusDescriptor bad{LocusKind::CylindricalZ1, 2, {}};
  EXPECT_THROW(bad.validate(), InputError);
}

// [PROPERTY] Hajos samples are sup-critical: lambda_1 = 1.
TEST(Locus, HajosSamplesHaveUnitSupMinimum) {
  CounterRng root(89);
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    CounterRng rng = root.substream(seed);
    const int d = 2 + static_cast<int>(seed % 4);
    const auto desc = LocusDescriptor::hajos(d, random_permutation(d, rng));
    const auto l = sample_locus(desc, seed);
    EXPECT_NEAR(l.determinant(), 1.0, 1e-9);
    EXPECT_NEAR(first_minimum(l, NormDescriptor::sup(d)).value, 1.0, 1e-9) << "seed " << seed;
  }
}

TEST(Locus, HexagonalSamplesAttainCriticalRadius) {
  const auto desc = LocusDescriptor::of(LocusKind::HexagonalEuclid2);
  const double r2 = std::pow(4.0 / 3.0, 0.25);
  for (std::uint64_t seed = 0; seed < 200; ++seed)
    EXPECT_NEAR(first_minimum(sample_locus(desc, seed), NormDescriptor::euclidean(2)).value, r2, 1e-9);
}

TEST(Locus, CylindricalSamplesHaveStatedShapes) {
  const double r = std::cbrt(2.0 / std::sqrt(3.0));
  const auto cyl = parse_norm("cyl", 3);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto z1 = sample_locus(LocusDescriptor::of(LocusKind::CylindricalZ1), seed).basis();
    EXPECT_EQ(z1(0, 2), 0.0);
    EXPECT_EQ(z1(1, 2), 0.0);
    const auto z2 = sample_locus(LocusDescriptor::of(LocusKind::CylindricalZ2), seed).basis();
    EXPECT_EQ(z2(2, 0), 0.0);
    for (const auto* b : {&z1, &z2}) {
      EXPECT_NEAR(b->determinant(), 1.0, 1e-12);
      EXPECT_NEAR(first_minimum(Lattice(*b), cyl).value, r, 1e-9);
    }
  }
}

TEST(Locus, CylindricalMembershipAgainstEstimatedRadius) {
  auto cyl = parse_norm("cyl", 3);
  cyl = cyl.with_critical_radius(estimate_critical_radius(cyl));
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    EXPECT_TRUE(locus_membership(sample_locus(LocusDescriptor::of(LocusKind::CylindricalZ1), seed), cyl));
    EXPECT_TRUE(locus_membership(sample_locus(LocusDescriptor::of(LocusKind::CylindricalZ2), seed), cyl));
  }
}

TEST(Locus, DirectionExamples) {
  auto id = LocusDescriptor::hajos(3);
  EXPECT_EQ(divergence_direction(Lattice::integer(3), WeightVector::unweighted(1, 2), id), DivergenceDirection::Forward);
  EXPECT_EQ(divergence_direction(Lattice::integer(3), WeightVector::unweighted(2, 1), id), DivergenceDirection::Forward);
  // Swap conjugation makes the unipotent lower triangular; e_2 is in the lattice.
  auto swap = LocusDescriptor::hajos(2, {1, 0});
  const auto l = sample_locus(swap, 4);
  EXPECT_EQ(standard_basis_vector_in(l), 1);
  EXPECT_EQ(divergence_direction(l, WeightVector::unweighted(1, 1), swap), DivergenceDirection::Forward);
  EXPECT_THROW(divergence_direction(hexagonal_lattice(), WeightVector::unweighted(1, 1),
                                    LocusDescriptor::of(LocusKind::HexagonalEuclid2)),
               DomainError);
}

TEST(Locus, SampleWithoutBasisVectorIsReportedAsBug) {
  Matrix b(2, 2);
  b << 1, 0.5, 0.5, 1.25;
  EXPECT_THROW(divergence_direction(Lattice(b), WeightVector::unweighted(1, 1), LocusDescriptor::hajos(2)),
               std::logic_error);
}

// [PROPERTY] Every sampled locus lattice diverges on its predicted side.
TEST(Locus, DivergenceRealized) {
  CounterRng root(97);
  const auto sup = [](int d) { return NormDescriptor::sup(d); };
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    CounterRng rng = root.substream(seed);
    const int d = 2 + static_cast<int>(seed % 3);
    const int m = 1 + static_cast<int>(rng.uniform_int(0, d - 2));
    const auto w = WeightVector::unweighted(m, d - m);
    const auto desc = LocusDescriptor::hajos(d, random_permutation(d, rng));
    const auto l = sample_locus(desc, seed);
    const double s = divergence_direction(l, w, desc) == DivergenceDirection::Forward ? 10.0 : -10.0;
    EXPECT_LE(first_minimum(apply_flow(l, w, s), sup(d)).value, 0.05) << "seed " << seed;
  }
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    CounterRng rng = root.substream(1000 + seed);
    const auto w = random_weights(2, 1, rng);
    for (auto kind : {LocusKind::CylindricalZ1, LocusKind::CylindricalZ2}) {
      const auto desc = LocusDescriptor::of(kind);
      const auto l = sample_locus(desc, seed);
      const double s = divergence_direction(l, w, desc) == DivergenceDirection::Forward ? 10.0 : -10.0;
      EXPECT_LE(first_minimum(apply_flow(l, w, s), parse_norm("cyl", 3)).value, 0.05);
    }
  }
}

// [PROPERTY] At most one of L, a_10 L is sup-critical.
TEST(Locus, FlowEscapesLocus) {
  CounterRng root(103);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    CounterRng rng = root.substream(seed);
    const int d = 2 + static_cast<int>(seed % 3);
    const auto w = random_weights(1, d - 1, rng);
    const auto desc = LocusDescriptor::hajos(d, random_permutation(d, rng));
    const auto l = sample_locus(desc, seed);
    const auto nu = NormDescriptor::sup(d);
    EXPECT_FALSE(locus_membership(l, nu) && locus_membership(apply_flow(l, w, 10.0), nu));
  }
}

TEST(Locus, SampleSerializationReproduces) {
  const auto desc = LocusDescriptor::hajos(4, {2, 0, 3, 1});
  const auto l = sample_locus(desc, 3);
  const auto j = nlohmann::json::parse(locus_sample_json(desc, 3, l).dump());
  const auto desc2 = locus_from_json(j["descriptor"]);
  EXPECT_EQ(sample_locus(desc2, j["seed"].get<std::uint64_t>()).basis(), l.basis());
  EXPECT_EQ(lattice_from_json(j["lattice"]).basis(), l.basis());
}
