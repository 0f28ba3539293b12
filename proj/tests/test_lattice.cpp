#include "dirichlet_lab/lattice.hpp"
#include "dirichlet_lab/lll.hpp"
#include "dirichlet_lab/rng.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

using namespace dlab;

TEST(Lattice, IntegerLatticeHasIdentityBasis) {
  const auto z = Lattice::integer(3);
  EXPECT_EQ(z.dimension(), 3);
  EXPECT_TRUE(z.basis().isIdentity());
  EXPECT_DOUBLE_EQ(z.determinant(), 1.0);
}

TEST(Lattice, RejectsBadBases) {
  EXPECT_THROW(Lattice(Matrix::Identity(2, 3)), InputError);
  EXPECT_THROW(Lattice(Matrix::Identity(1, 1)), InputError);
  Matrix nan = Matrix::Identity(2, 2);
  nan(0, 1) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(Lattice{nan}, InputError);
  EXPECT_THROW(Lattice(2.0 * Matrix::Identity(2, 2)), InputError);
  EXPECT_THROW(Lattice(Matrix::Zero(2, 2)), NumericalRankError);
}

TEST(Lattice, RelaxedToleranceAcceptsAnyDeterminant) {
  const Lattice scaled(3.0 * Matrix::Identity(2, 2), std::numeric_limits<double>::infinity());
  EXPECT_DOUBLE_EQ(scaled.determinant(), 9.0);
}

TEST(Lattice, NormalizedFixesSignAndScale) {
  Matrix b(2, 2);
  b << 0, 2, 3, 0;  // det -6
  const auto l = Lattice::normalized(b);
  EXPECT_NEAR(l.determinant(), 1.0, 1e-12);
}

TEST(Lattice, PointIsBasisTimesCoefficients) {
  Matrix b(2, 2);
  b << 1, 0.5, 0, 1;
  const Lattice l(b);
  const Vector v = l.point({2, -1});
  EXPECT_DOUBLE_EQ(v[0], 1.5);
  EXPECT_DOUBLE_EQ(v[1], -1.0);
}

TEST(Lattice, UnipotentOfA) {
  Matrix a(2, 1);
  a << 0.25, -0.75;
  const Matrix u = unipotent_of(MatrixA(a));
  Matrix expected(3, 3);
  expected << 1, 0, 0.25, 0, 1, -0.75, 0, 0, 1;
  EXPECT_TRUE(u.isApprox(expected));
  EXPECT_DOUBLE_EQ(lattice_from_matrix(MatrixA(a)).determinant(), 1.0);
}

TEST(Lattice, JsonRoundTrip) {
  CounterRng rng(3);
  const auto l = random_unimodular(4, rng);
  const nlohmann::json j = l;
  const auto back = lattice_from_json(nlohmann::json::parse(j.dump()));
  EXPECT_EQ(back.basis(), l.basis());
}

TEST(Lattice, MatrixAValidation) {
  EXPECT_THROW(MatrixA(Matrix(0, 1)), InputError);
  const MatrixA a(2, 3, 0.5);
  EXPECT_EQ(a.m(), 2);
  EXPECT_EQ(a.n(), 3);
  EXPECT_EQ(a.d(), 5);
}

// [PROPERTY] LLL keeps the lattice: the transform is integral and unimodular
// and maps the input basis to the output basis.
TEST(Lll, PreservesLatticeAndReduces) {
  CounterRng root(17);
  for (int trial = 0; trial < 200; ++trial) {
    CounterRng rng = root.substream(trial);
    const int d = 2 + trial % 5;
    Matrix b = random_unimodular(d, rng).basis();
    // Skew it so there is something to do.
    for (int c = 1; c < d; ++c) b.col(c) += static_cast<double>(rng.uniform_int(-50, 50)) * b.col(0);
    const auto res = detail::lll(b, 0.99);
    Matrix t = res.transform.cast<double>();
    EXPECT_NEAR(std::abs(t.determinant()), 1.0, 1e-9);
    EXPECT_TRUE((b * t).isApprox(res.basis, 1e-8));
    EXPECT_TRUE(is_lll_reduced(res.basis, 0.99, 1e-6));
    EXPECT_GT(res.basis.determinant(), 0.0);
  }
}

TEST(Lll, ReducesSkewedTwoDimensionalBasis) {
  Matrix b(2, 2);
  b << 1, 1e6, 0, 1;
  const auto r = lll_reduce(Lattice(b));
  EXPECT_TRUE(r.basis().cwiseAbs().isApprox(Matrix::Identity(2, 2)));
}

TEST(Lll, RejectsDeltaOutOfRange) {
  EXPECT_THROW(detail::lll(Matrix::Identity(2, 2), 0.2), DomainError);
  EXPECT_THROW(detail::lll(Matrix::Identity(2, 2), 1.0), DomainError);
}

TEST(Lll, DetectsRankDeficiency) {
  Matrix b(2, 2);
  b << 1, 2, 1, 2;
  EXPECT_THROW(detail::lll(b, 0.99), NumericalRankError);
}
