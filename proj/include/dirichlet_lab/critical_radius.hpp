#ifndef DIRICHLET_LAB_CRITICAL_RADIUS_HPP
#define DIRICHLET_LAB_CRITICAL_RADIUS_HPP

#include "dirichlet_lab/core.hpp"
#include "dirichlet_lab/enumeration.hpp"
#include "dirichlet_lab/lattice.hpp"
#include "dirichlet_lab/norms.hpp"
#include "dirichlet_lab/rng.hpp"

#include <cmath>
#include <optional>
#include <utility>
#include <vector>

namespace dlab {

/// The det-1 hexagonal lattice: columns (a, 0) and (a/2, a sqrt(3)/2) with
/// a = (4/3)^{1/4}.
inline Lattice hexagonal_lattice(double rotation = 0.0) {
  const double a = std::pow(4.0 / 3.0, 0.25);
  Matrix b(2, 2);
  b << a, a / 2.0, 0.0, a * std::sqrt(3.0) / 2.0;
  Matrix rot(2, 2);
  rot << std::cos(rotation), -std::sin(rotation), std::sin(rotation), std::cos(rotation);
  return Lattice(rot * b);
}

namespace detail {

// Cartan (Gram) matrices of the root lattices A2, A3, D4, D5, E6, E7, E8.
// Each has minimal norm sqrt 2 and realizes the Hermite constant in its
// dimension.
inline Matrix root_lattice_gram(int d) {
  Matrix g = 2.0 * Matrix::Identity(d, d);
  auto link = [&](int i, int j) { g(i, j) = g(j, i) = -1.0; };
  switch (d) {
    case 2:
    case 3:
      for (int i = 0; i + 1 < d; ++i) link(i, i + 1);
      break;
    case 4:
      link(0, 1), link(1, 2), link(1, 3);
      break;
    case 5:
      link(0, 1), link(1, 2), link(2, 3), link(2, 4);
      break;
    case 6:
    case 7:
    case 8:
      for (int i = 0; i + 2 < d; ++i) link(i, i + 1);
      link(2, d - 1);
      break;
    default:
      throw DomainError("no root lattice registered for this dimension");
  }
  return g;
}

}  // namespace detail

/// A det-1 lattice attaining the registered critical radius of nu, when one
/// is known: Z^d for the sup norm, root lattices for Euclidean d = 2..8.
inline std::optional<Lattice> critical_witness(const NormDescriptor& nu) {
  const int d = nu.dimension();
  if (nu.kind() == NormKind::Sup) return Lattice::integer(d);
  if (nu.kind() == NormKind::Euclidean && d == 2) return hexagonal_lattice();
  if (nu.kind() == NormKind::Euclidean && d >= 3 && d <= 8) {
    Eigen::LLT<Matrix> llt(detail::root_lattice_gram(d));
    Matrix basis = llt.matrixU();
    return Lattice::normalized(std::move(basis));
  }
  return std::nullopt;
}

/// Registered exact critical radii: 1 for the sup norm in every dimension and
/// sqrt(gamma_d) (gamma_d the Hermite constant) for the Euclidean norm, d = 2..8.
inline std::optional<double> exact_critical_radius(const NormDescriptor& nu) {
  const int d = nu.dimension();
  if (nu.kind() == NormKind::Sup) return 1.0;
  if (nu.kind() != NormKind::Euclidean) return std::nullopt;
  // gamma_d^d for d = 2..8.
  static const double hermite_power[] = {0, 0, 4.0 / 3.0, 2.0, 4.0, 8.0, 64.0 / 3.0, 64.0, 256.0};
  if (d < 2 || d > 8) return std::nullopt;
  return std::pow(hermite_power[d], 1.0 / (2.0 * d));
}

struct EstimateOptions {
  std::uint64_t seed = 1;
  int iterations = 4000;  // per restart
  int restarts = 6;
  EnumerationOptions enumeration{};
};

/// Randomized hill-climb over det-1 bases maximizing lambda_1(., nu). The
/// value returned is lambda_1 of an explicit lattice, hence a certified lower
/// bound for r_nu.
inline CriticalRadius estimate_critical_radius(const NormDescriptor& nu, const EstimateOptions& opts = {}) {
  const int d = nu.dimension();
  if (d < 2) throw DomainError("estimate_critical_radius: dimension must be at least 2");
  CounterRng root(opts.seed);
  auto objective = [&](const Lattice& l) { return first_minimum(l, nu, opts.enumeration).value; };

  double best = 0.0;
  for (int restart = 0; restart < opts.restarts; ++restart) {
    CounterRng rng = root.substream(static_cast<std::uint64_t>(restart));
    Lattice current = Lattice::integer(d);
    if (restart == 1) {
      if (auto w = critical_witness(NormDescriptor::euclidean(d))) current = *w;
    } else if (restart >= 2) {
      current = random_unimodular(d, rng);
    }
    current = lll_reduce(current);
    double value = objective(current);
    double step = 0.2;
    int misses = 0;
    for (int it = 0; it < opts.iterations && step > 1e-8; ++it) {
      Matrix p = Matrix::Identity(d, d);
      for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) p(r, c) += step * rng.normal();
      if (!(p.determinant() > 0.0)) continue;
      Matrix candidate_basis = p * current.basis();
      const Lattice candidate = lll_reduce(Lattice::normalized(std::move(candidate_basis)));
      const double v = objective(candidate);
      if (v > value) {
        value = v;
        current = candidate;
        misses = 0;
      } else if (++misses >= 40) {
        step *= 0.7;
        misses = 0;
      }
    }
    best = std::max(best, value);
  }
  return {best, RadiusStatus::LowerBound};
}

/// r_nu: an attached value first, then the exact registry, then estimate mode.
inline CriticalRadius critical_radius(const NormDescriptor& nu, const EstimateOptions& opts = {}) {
  if (auto attached = nu.attached_critical_radius()) return *attached;
  if (auto exact = exact_critical_radius(nu)) return {*exact, RadiusStatus::Exact};
  return estimate_critical_radius(nu, opts);
}

}  // namespace dlab

#endif  // DIRICHLET_LAB_CRITICAL_RADIUS_HPP
