#ifndef DIRICHLET_LAB_LATTICE_HPP
#define DIRICHLET_LAB_LATTICE_HPP

#include "dirichlet_lab/core.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <string>
#include <utility>

namespace dlab {

inline constexpr double kDefaultDetTolerance = 1e-8;

/// A unimodular lattice in R^d, stored as a d x d basis whose columns are the
/// generators. Immutable after construction.
class Lattice {
 public:
  explicit Lattice(Matrix basis, double det_tolerance = kDefaultDetTolerance)
      : basis_(std::move(basis)), det_tolerance_(det_tolerance) {
    if (basis_.rows() != basis_.cols()) throw InputError("lattice basis must be square");
    if (basis_.rows() < 2) throw InputError("lattice dimension must be at least 2");
    detail::require_finite(basis_, "lattice basis");
    const double det = basis_.determinant();
    if (det == 0.0) throw NumericalRankError("lattice basis is singular");
    if (!(std::abs(det - 1.0) <= det_tolerance_))
      throw InputError("lattice basis is not unimodular (det = " + std::to_string(det) + ")");
  }

  /// Z^d.
  static Lattice integer(int d) { return Lattice(Matrix::Identity(d, d)); }

  /// Scales a full-rank basis to determinant 1. A negative determinant is
  /// fixed by negating the first column, which spans the same lattice.
  static Lattice normalized(Matrix basis, double det_tolerance = kDefaultDetTolerance) {
    detail::require_finite(basis, "lattice basis");
    if (basis.rows() != basis.cols()) throw InputError("lattice basis must be square");
    double det = basis.determinant();
    if (det == 0.0 || !std::isfinite(det)) throw NumericalRankError("lattice basis is singular");
    if (det < 0) {
      basis.col(0) *= -1.0;
      det = -det;
    }
    basis *= std::pow(det, -1.0 / static_cast<double>(basis.rows()));
    return Lattice(std::move(basis), det_tolerance);
  }

  int dimension() const { return static_cast<int>(basis_.rows()); }
  const Matrix& basis() const { return basis_; }
  double det_tolerance() const { return det_tolerance_; }
  double determinant() const { return basis_.determinant(); }

  Vector point(const IntVector& coeffs) const {
    if (static_cast<int>(coeffs.size()) != dimension()) throw InputError("coefficient dimension mismatch");
    Vector x(dimension());
    for (int i = 0; i < dimension(); ++i) x[i] = static_cast<double>(coeffs[i]);
    return basis_ * x;
  }

  /// g * L for g in SL_d(R).
  Lattice transformed(const Matrix& g) const { return Lattice(g * basis_, det_tolerance_); }

 private:
  Matrix basis_;
  double det_tolerance_;
};

/// An m x n real matrix viewed as m linear forms in n variables.
class MatrixA {
 public:
  explicit MatrixA(Matrix entries) : entries_(std::move(entries)) {
    if (entries_.rows() < 1 || entries_.cols() < 1) throw InputError("matrix A needs m >= 1 and n >= 1");
    detail::require_finite(entries_, "matrix A");
  }
  MatrixA(int m, int n, double value) : MatrixA(Matrix::Constant(m, n, value)) {}

  int m() const { return static_cast<int>(entries_.rows()); }
  int n() const { return static_cast<int>(entries_.cols()); }
  int d() const { return m() + n(); }
  const Matrix& entries() const { return entries_; }

 private:
  Matrix entries_;
};

/// u_A = [I_m A; 0 I_n].
inline Matrix unipotent_of(const MatrixA& a) {
  Matrix u = Matrix::Identity(a.d(), a.d());
  u.topRightCorner(a.m(), a.n()) = a.entries();
  return u;
}

/// Lambda_A = u_A Z^d.
inline Lattice lattice_from_matrix(const MatrixA& a) { return Lattice(unipotent_of(a)); }

// JSON: {"d": int, "basis": [[column 0], [column 1], ...]}.
inline void to_json(nlohmann::json& j, const Lattice& lattice) {
  const int d = lattice.dimension();
  auto cols = nlohmann::json::array();
  for (int c = 0; c < d; ++c) {
    auto col = nlohmann::json::array();
    for (int r = 0; r < d; ++r) col.push_back(lattice.basis()(r, c));
    cols.push_back(std::move(col));
  }
  j = nlohmann::json{{"d", d}, {"basis", std::move(cols)}};
}

inline Lattice lattice_from_json(const nlohmann::json& j, double det_tolerance = kDefaultDetTolerance) {
  const int d = j.at("d").get<int>();
  const auto& cols = j.at("basis");
  if (!cols.is_array() || static_cast<int>(cols.size()) != d) throw InputError("lattice JSON: basis must have d columns");
  Matrix b(d, d);
  for (int c = 0; c < d; ++c) {
    if (static_cast<int>(cols[c].size()) != d) throw InputError("lattice JSON: column length must equal d");
    for (int r = 0; r < d; ++r) b(r, c) = cols[c][r].get<double>();
  }
  return Lattice(std::move(b), det_tolerance);
}

}  // namespace dlab

#endif  // DIRICHLET_LAB_LATTICE_HPP
