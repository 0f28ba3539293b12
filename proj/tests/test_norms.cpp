#include "dirichlet_lab/norms.hpp"
#include "dirichlet_lab/rng.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace dlab;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  int i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

Vector random_vector(int d, CounterRng& rng) {
  Vector v(d);
  for (int i = 0; i < d; ++i) v[i] = rng.normal();
  return v;
}

std::vector<NormDescriptor> sample_norms(int d) {
  std::vector<NormDescriptor> out{NormDescriptor::sup(d), NormDescriptor::euclidean(d), NormDescriptor::lp(d, 1.5),
                                  NormDescriptor::lp(d, 4.0), NormDescriptor::cylindrical(NormDescriptor::euclidean(d - 1)),
                                  NormDescriptor::cylindrical(NormDescriptor::sup(d - 1))};
  Matrix g = Matrix::Identity(d, d);
  g(0, d - 1) = 0.7;
  g(d - 1, 0) = -0.2;
  out.push_back(NormDescriptor::pullback(NormDescriptor::euclidean(d), g));
  return out;
}

}  // namespace

TEST(Norms, Values) {
  const Vector x = vec({3, -4});
  EXPECT_DOUBLE_EQ(NormDescriptor::sup(2)(x), 4.0);
  EXPECT_DOUBLE_EQ(NormDescriptor::euclidean(2)(x), 5.0);
  EXPECT_NEAR(NormDescriptor::lp(2, 3.0)(x), std::cbrt(27.0 + 64.0), 1e-12);
  const Vector y = vec({3, 4, -2});
  EXPECT_DOUBLE_EQ(NormDescriptor::cylindrical(NormDescriptor::euclidean(2))(y), 5.0);
  EXPECT_DOUBLE_EQ(NormDescriptor::cylindrical(NormDescriptor::euclidean(2))(vec({0.1, 0, -2})), 2.0);
}

TEST(Norms, RejectsBadInput) {
  EXPECT_THROW(NormDescriptor::lp(2, 1.0), InputError);
  EXPECT_THROW(NormDescriptor::sup(2)(vec({1, 2, 3})), InputError);
  EXPECT_THROW(parse_norm("l7", 2), InputError);
  EXPECT_THROW(NormDescriptor::pullback(NormDescriptor::sup(2), Matrix::Zero(2, 2)), NumericalRankError);
}

TEST(Norms, Parse) {
  EXPECT_EQ(parse_norm("sup", 3).kind(), NormKind::Sup);
  EXPECT_EQ(parse_norm("euclid", 3).kind(), NormKind::Euclidean);
  EXPECT_DOUBLE_EQ(parse_norm("lp:2.5", 3).p(), 2.5);
  const auto cyl = parse_norm("cyl", 3);
  EXPECT_EQ(cyl.kind(), NormKind::Cylindrical);
  EXPECT_EQ(cyl.inner().kind(), NormKind::Euclidean);
  EXPECT_EQ(cyl.inner().dimension(), 2);
  EXPECT_EQ(parse_norm("cyl:sup", 3).inner().kind(), NormKind::Sup);
}

// [PROPERTY] Norm axioms and the sandwich constants used to bound the search.
TEST(Norms, AxiomsAndSandwich) {
  CounterRng root(5);
  for (int d = 2; d <= 5; ++d) {
    for (const auto& nu : sample_norms(d)) {
      for (int k = 0; k < 200; ++k) {
        CounterRng rng = root.substream(d * 1000 + k);
        const Vector x = random_vector(d, rng);
        const Vector y = random_vector(d, rng);
        const double c = rng.uniform(-3.0, 3.0);
        const double nx = nu(x);
        EXPECT_NEAR(nu(c * x), std::abs(c) * nx, 1e-12 * (1 + nx)) << nu.name();
        EXPECT_LE(nu(x + y), nx + nu(y) + 1e-12) << nu.name();
        EXPECT_GE(nx, nu.c_lo() * x.norm() * (1 - 1e-12)) << nu.name();
        EXPECT_LE(nx, nu.c_hi() * x.norm() * (1 + 1e-12)) << nu.name();
      }
    }
  }
}

TEST(Norms, JsonRoundTrip) {
  for (const auto& nu : sample_norms(3)) {
    const nlohmann::json j = nu.with_critical_radius({1.25, RadiusStatus::LowerBound});
    const auto back = norm_from_json(nlohmann::json::parse(j.dump()));
    EXPECT_EQ(back.kind(), nu.kind());
    EXPECT_EQ(back.name(), nu.name());
    ASSERT_TRUE(back.attached_critical_radius());
    EXPECT_EQ(back.attached_critical_radius()->value, 1.25);
    EXPECT_EQ(back.attached_critical_radius()->status, RadiusStatus::LowerBound);
    const Vector x = vec({0.3, -1.1, 2.0});
    EXPECT_DOUBLE_EQ(back(x), nu(x));
  }
}

TEST(Weights, Validation) {
  EXPECT_NO_THROW(WeightVector({0.3, 0.7}, {1.0}));
  EXPECT_THROW(WeightVector({0.3, 0.6}, {1.0}), InputError);
  EXPECT_THROW(WeightVector({1.2, -0.2}, {1.0}), InputError);
  EXPECT_THROW(WeightVector({}, {1.0}), InputError);
  const auto w = WeightVector::from_flat({0.25, 0.75, 0.5, 0.5}, 2);
  EXPECT_EQ(w.m(), 2);
  EXPECT_EQ(w.n(), 2);
  EXPECT_DOUBLE_EQ(w.gamma(), 0.5);
  EXPECT_DOUBLE_EQ(w.min_weight(), 0.25);
}

TEST(Weights, RandomWeightsAreValid) {
  CounterRng root(9);
  for (int k = 0; k < 100; ++k) {
    CounterRng rng = root.substream(k);
    EXPECT_NO_THROW(random_weights(1 + k % 4, 1 + k % 3, rng));
  }
}

TEST(QuasiNorm, Values) {
  EXPECT_DOUBLE_EQ(quasi_norm(vec({0.5, 0.2}), {0.5, 0.5}), 0.25);
  EXPECT_DOUBLE_EQ(quasi_norm(vec({-3}), {1.0}), 3.0);
  EXPECT_THROW(quasi_norm(vec({1, 2}), {1.0}), InputError);
}

// [PROPERTY] |diag(t^{w_i}) x|_w = t |x|_w.
TEST(QuasiNorm, WeightedHomogeneity) {
  CounterRng root(21);
  for (int k = 0; k < 100; ++k) {
    CounterRng rng = root.substream(k);
    const auto w = random_weights(3, 1, rng);
    const Vector x = random_vector(3, rng);
    const double t = rng.uniform(0.1, 10.0);
    Vector y(3);
    for (int i = 0; i < 3; ++i) y[i] = std::pow(t, w.alpha()[i]) * x[i];
    const double base = quasi_norm(x, w.alpha());
    EXPECT_NEAR(quasi_norm(y, w.alpha()), t * base, 1e-10 * (1 + t * base));
  }
}
