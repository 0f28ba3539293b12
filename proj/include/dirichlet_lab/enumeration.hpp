#ifndef DIRICHLET_LAB_ENUMERATION_HPP
#define DIRICHLET_LAB_ENUMERATION_HPP

#include "dirichlet_lab/core.hpp"
#include "dirichlet_lab/lattice.hpp"
#include "dirichlet_lab/lll.hpp"
#include "dirichlet_lab/norms.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace dlab {

struct EnumerationOptions {
  std::uint64_t node_budget = kDefaultNodeBudget;
  double lll_delta = 0.99;
};

/// A lattice vector: integer coordinates in the lattice's own basis, its
/// embedding in R^d and the value of whichever norm produced it.
struct LatticeVector {
  IntVector coeffs;
  Vector point;
  double value = 0.0;
};

struct EnumerationResult {
  std::vector<LatticeVector> vectors;  // one of each +-v pair, sorted by length
  double radius = 0.0;
  std::uint64_t nodes = 0;
};

struct FirstMinimum {
  double value = 0.0;
  LatticeVector witness;
};

namespace detail {

/// Flips v so that its first nonzero coordinate is positive.
inline bool orient(IntVector& v) {
  for (auto c : v) {
    if (c == 0) continue;
    if (c < 0) {
      for (auto& x : v) x = -x;
      return true;
    }
    return false;
  }
  return false;
}

/// Tie-break order among equally short vectors: absolute values compared from
/// the last coordinate backwards, then the signed entries lexicographically.
/// The first standard basis vector is the smallest nonzero element.
inline bool witness_less(const IntVector& a, const IntVector& b) {
  for (std::size_t i = a.size(); i-- > 0;) {
    const auto x = std::abs(a[i]);
    const auto y = std::abs(b[i]);
    if (x != y) return x < y;
  }
  return a < b;
}

struct Prepared {
  LllResult reduced;
  GramSchmidt gs;
  int d = 0;
};

inline Prepared prepare(const Matrix& basis, double delta) {
  Prepared p;
  p.reduced = lll(basis, delta);
  p.gs = gram_schmidt(p.reduced.basis);
  p.d = static_cast<int>(basis.cols());
  return p;
}

/// Depth-first Fincke-Pohst enumeration over the reduced basis. Calls
/// `visit(x, squared_length)` once per +-pair of nonzero coefficient vectors
/// x (reduced coordinates) with |B x|^2 <= bound_sq; `visit` returns the
/// (possibly smaller) bound to use from then on.
template <class Visitor>
std::uint64_t fincke_pohst(const Prepared& p, double bound_sq, std::uint64_t budget, Visitor&& visit) {
  const int d = p.d;
  const Matrix& mu = p.gs.mu;
  const Vector& bsq = p.gs.bstar_sq;
  std::vector<std::int64_t> x(d, 0);
  std::uint64_t nodes = 0;

  std::function<void(int, double, bool)> recurse = [&](int i, double partial, bool zero_above) {
    double center = 0.0;
    for (int j = i + 1; j < d; ++j) center -= mu(j, i) * static_cast<double>(x[j]);
    const auto start = static_cast<std::int64_t>(std::llround(center));

    auto step = [&](std::int64_t v) {
      const double t = static_cast<double>(v) - center;
      const double next = partial + bsq[i] * t * t;
      if (next > bound_sq) return false;
      if (++nodes > budget) throw BudgetExceeded("enumeration node budget exceeded", budget);
      x[i] = v;
      if (i == 0) {
        if (!(zero_above && v == 0)) bound_sq = visit(x, next);
      } else {
        recurse(i - 1, next, zero_above && v == 0);
      }
      return true;
    };

    // Only one of +-x is visited: while every higher coordinate is zero the
    // center is 0 and the current coordinate is kept nonnegative.
    if (zero_above) {
      for (std::int64_t v = 0; step(v); ++v) {
      }
    } else {
      for (std::int64_t v = start; step(v); ++v) {
      }
      for (std::int64_t v = start - 1; step(v); --v) {
      }
    }
    x[i] = 0;
  };
  recurse(d - 1, 0.0, true);
  return nodes;
}

inline IntVector to_original(const Prepared& p, const std::vector<std::int64_t>& x) {
  IntVector out(p.d, 0);
  for (int r = 0; r < p.d; ++r) {
    std::int64_t acc = 0;
    for (int c = 0; c < p.d; ++c) acc += p.reduced.transform(r, c) * x[c];
    out[r] = acc;
  }
  return out;
}

inline Vector embed(const Prepared& p, const std::vector<std::int64_t>& x) {
  Vector coeff(p.d);
  for (int i = 0; i < p.d; ++i) coeff[i] = static_cast<double>(x[i]);
  return p.reduced.basis * coeff;
}

/// Minimum of nu over nonzero lattice vectors whose original coordinates pass
/// `accept`, restricted to values < limit (use +inf for no limit). Returns
/// nothing when no accepted vector lies below the limit.
inline std::optional<FirstMinimum> minimum_over(const Prepared& p, const NormDescriptor& nu, double limit,
                                                const std::function<bool(const IntVector&)>& accept,
                                                std::uint64_t budget) {
  if (nu.dimension() != p.d) throw InputError("norm and lattice dimensions differ");
  double best = limit;
  std::vector<LatticeVector> ties;

  auto consider = [&](const std::vector<std::int64_t>& x) {
    IntVector z = to_original(p, x);
    if (accept && !accept(z)) return;
    Vector v = embed(p, x);
    const double value = nu(v);
    if (!(value < best + kEps)) return;
    if (value < best) best = value;
    if (orient(z)) v = -v;
    ties.push_back({std::move(z), std::move(v), value});
  };

  // Seed the bound with the reduced basis vectors themselves.
  for (int c = 0; c < p.d; ++c) {
    std::vector<std::int64_t> x(p.d, 0);
    x[c] = 1;
    consider(x);
  }
  auto euclid_bound_sq = [&] {
    if (!std::isfinite(best)) return std::numeric_limits<double>::infinity();
    const double r = (best + 2 * kEps) / nu.c_lo();
    return r * r * (1.0 + 1e-12);
  };
  if (!std::isfinite(euclid_bound_sq())) throw InputError("minimum_over: unbounded search without a finite limit");

  try {
    fincke_pohst(p, euclid_bound_sq(), budget, [&](const std::vector<std::int64_t>& x, double) {
      consider(x);
      return euclid_bound_sq();
    });
  } catch (const BudgetExceeded& e) {
    std::optional<double> found;
    if (best < limit) found = best;
    throw BudgetExceeded(e.what(), e.budget(), found);
  }

  if (!(best < limit)) return std::nullopt;
  const LatticeVector* pick = nullptr;
  for (const auto& t : ties) {
    if (!(t.value <= best + kEps)) continue;
    // Seeds and enumeration can report the same vector twice; harmless here.
    if (!pick || witness_less(t.coeffs, pick->coeffs)) pick = &t;
  }
  return FirstMinimum{best, *pick};
}

}  // namespace detail

/// Every nonzero lattice vector with Euclidean length strictly below `radius`,
/// one representative per +-pair (first nonzero coordinate positive).
inline EnumerationResult enumerate_in_ball(const Lattice& lattice, double radius, const EnumerationOptions& opts = {}) {
  if (!(radius > 0.0) || !std::isfinite(radius)) throw DomainError("enumerate_in_ball: radius must be positive");
  const auto p = detail::prepare(lattice.basis(), opts.lll_delta);
  EnumerationResult out;
  out.radius = radius;
  const double bound = (radius + kEps) * (radius + kEps);
  out.nodes = detail::fincke_pohst(p, bound, opts.node_budget, [&](const std::vector<std::int64_t>& x, double) {
    Vector v = detail::embed(p, x);
    const double len = v.norm();
    if (strictly_inside(len, radius)) {
      IntVector z = detail::to_original(p, x);
      if (detail::orient(z)) v = -v;
      out.vectors.push_back({std::move(z), std::move(v), len});
    }
    return bound;
  });
  std::sort(out.vectors.begin(), out.vectors.end(), [](const LatticeVector& a, const LatticeVector& b) {
    if (std::abs(a.value - b.value) > kEps) return a.value < b.value;
    return detail::witness_less(a.coeffs, b.coeffs);
  });
  return out;
}

/// lambda_1(L, nu) and a vector attaining it. Ties within kEps are broken by
/// detail::witness_less on the integer coordinates.
inline FirstMinimum first_minimum(const Lattice& lattice, const NormDescriptor& nu, const EnumerationOptions& opts = {}) {
  const auto p = detail::prepare(lattice.basis(), opts.lll_delta);
  auto m = detail::minimum_over(p, nu, std::numeric_limits<double>::infinity(), nullptr, opts.node_budget);
  return *m;
}

/// True iff L has no nonzero point in the open ball B_nu(r), i.e. lambda_1 >= r
/// up to kEps (boundary points do not violate admissibility).
inline bool is_admissible(const Lattice& lattice, const NormDescriptor& nu, double r, const EnumerationOptions& opts = {}) {
  if (!(r > 0.0)) throw DomainError("is_admissible: radius must be positive");
  const auto p = detail::prepare(lattice.basis(), opts.lll_delta);
  const auto m = detail::minimum_over(p, nu, r, nullptr, opts.node_budget);
  return !(m && strictly_inside(m->value, r));
}

}  // namespace dlab

#endif  // DIRICHLET_LAB_ENUMERATION_HPP
