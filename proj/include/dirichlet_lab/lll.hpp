#ifndef DIRICHLET_LAB_LLL_HPP
#define DIRICHLET_LAB_LLL_HPP

#include "dirichlet_lab/core.hpp"
#include "dirichlet_lab/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace dlab {

using IntMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

namespace detail {

// Gram-Schmidt data of a basis: mu(i, j) = <b_i, b*_j> / |b*_j|^2 for j < i,
// and bstar_sq(j) = |b*_j|^2. Taken from a Householder QR factorization,
// which is more stable than classical Gram-Schmidt on skewed bases.
struct GramSchmidt {
  Matrix mu;
  Vector bstar_sq;
  Matrix r;  // upper triangular factor, basis = Q r
};

inline GramSchmidt gram_schmidt(const Matrix& basis) {
  const int d = static_cast<int>(basis.cols());
  Eigen::HouseholderQR<Matrix> qr(basis);
  GramSchmidt gs{Matrix::Zero(d, d), Vector::Zero(d), qr.matrixQR().triangularView<Eigen::Upper>()};
  for (int j = 0; j < d; ++j) {
    const double rjj = gs.r(j, j);
    gs.bstar_sq[j] = rjj * rjj;
    gs.mu(j, j) = 1.0;
    for (int i = j + 1; i < d; ++i) gs.mu(i, j) = gs.r(j, i) / rjj;
  }
  return gs;
}

inline void check_rank(const GramSchmidt& gs, const Matrix& basis) {
  const double scale = basis.colwise().norm().maxCoeff();
  for (int j = 0; j < gs.bstar_sq.size(); ++j) {
    if (!(std::sqrt(gs.bstar_sq[j]) > 1e-15 * scale))
      throw NumericalRankError("basis is numerically rank deficient");
  }
}

struct LllResult {
  Matrix basis;         // reduced basis, equal to input * transform
  IntMatrix transform;  // unimodular integer matrix
};

inline LllResult lll(const Matrix& input, double delta) {
  if (!(delta > 0.25 && delta < 1.0)) throw DomainError("LLL parameter delta must lie in (1/4, 1)");
  require_finite(input, "LLL basis");
  const int d = static_cast<int>(input.cols());
  LllResult out{input, IntMatrix::Identity(d, d)};
  Matrix& b = out.basis;
  IntMatrix& u = out.transform;

  GramSchmidt gs = gram_schmidt(b);
  check_rank(gs, b);

  auto size_reduce = [&](int k) {
    // Floating-point size reduction can leave |mu| slightly above 1/2 after
    // one sweep when coefficients are large; repeat with fresh GSO data.
    for (int pass = 0; pass < 16; ++pass) {
      bool changed = false;
      for (int j = k - 1; j >= 0; --j) {
        const double q = std::round(gs.mu(k, j));
        if (q == 0.0) continue;
        changed = true;
        b.col(k) -= q * b.col(j);
        u.col(k) -= static_cast<std::int64_t>(q) * u.col(j);
        for (int i = 0; i < j; ++i) gs.mu(k, i) -= q * gs.mu(j, i);
        gs.mu(k, j) -= q;
      }
      if (!changed) return;
      gs = gram_schmidt(b);
      bool reduced = true;
      for (int j = 0; j < k; ++j) reduced = reduced && std::abs(gs.mu(k, j)) <= 0.5 + 1e-9;
      if (reduced) return;
    }
  };

  int k = 1;
  long guard = 0;
  while (k < d) {
    if (++guard > 1'000'000) throw NumericalRankError("LLL failed to converge");
    size_reduce(k);
    const double lhs = gs.bstar_sq[k];
    const double rhs = (delta - gs.mu(k, k - 1) * gs.mu(k, k - 1)) * gs.bstar_sq[k - 1];
    if (lhs >= rhs) {
      ++k;
    } else {
      b.col(k).swap(b.col(k - 1));
      u.col(k).swap(u.col(k - 1));
      gs = gram_schmidt(b);
      k = std::max(k - 1, 1);
    }
  }

  // Keep a positive orientation so the result is again a point of X_d.
  if (b.determinant() < 0) {
    b.col(0) *= -1.0;
    u.col(0) *= -1;
  }
  return out;
}

}  // namespace detail

/// LLL-reduces the basis of `lattice`; the result spans the same lattice and
/// satisfies the size and Lovasz conditions with parameter `delta`.
inline Lattice lll_reduce(const Lattice& lattice, double delta = 0.99) {
  auto reduced = detail::lll(lattice.basis(), delta);
  return Lattice(std::move(reduced.basis), lattice.det_tolerance());
}

/// True when `basis` is size-reduced and satisfies the Lovasz condition.
inline bool is_lll_reduced(const Matrix& basis, double delta, double slack = 1e-9) {
  const auto gs = detail::gram_schmidt(basis);
  const int d = static_cast<int>(basis.cols());
  for (int i = 1; i < d; ++i) {
    for (int j = 0; j < i; ++j)
      if (std::abs(gs.mu(i, j)) > 0.5 + 1e-6) return false;
    const double mu = gs.mu(i, i - 1);
    if (gs.bstar_sq[i] < (delta - mu * mu) * gs.bstar_sq[i - 1] * (1.0 - slack)) return false;
  }
  return true;
}

}  // namespace dlab

#endif  // DIRICHLET_LAB_LLL_HPP
