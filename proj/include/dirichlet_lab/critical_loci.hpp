#ifndef DIRICHLET_LAB_CRITICAL_LOCI_HPP
#define DIRICHLET_LAB_CRITICAL_LOCI_HPP

#include "dirichlet_lab/core.hpp"
#include "dirichlet_lab/critical_radius.hpp"
#include "dirichlet_lab/enumeration.hpp"
#include "dirichlet_lab/lattice.hpp"
#include "dirichlet_lab/norms.hpp"
#include "dirichlet_lab/rng.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

namespace dlab {

enum class LocusKind { HajosSup, CylindricalZ1, CylindricalZ2, HexagonalEuclid2 };

inline const char* to_string(LocusKind k) {
  switch (k) {
    case LocusKind::HajosSup: return "hajos_sup";
    case LocusKind::CylindricalZ1: return "cylindrical_z1";
    case LocusKind::CylindricalZ2: return "cylindrical_z2";
    case LocusKind::HexagonalEuclid2: return "hexagonal_euclid2";
  }
  return "?";
}

inline LocusKind parse_locus_kind(const std::string& s) {
  if (s == "hajos_sup" || s == "hajos") return LocusKind::HajosSup;
  if (s == "cylindrical_z1" || s == "z1") return LocusKind::CylindricalZ1;
  if (s == "cylindrical_z2" || s == "z2") return LocusKind::CylindricalZ2;
  if (s == "hexagonal_euclid2" || s == "hexagonal") return LocusKind::HexagonalEuclid2;
  throw InputError("unknown locus kind '" + s + "'");
}

/// Which locus to sample. `permutation` (HajosSup only) maps i to
/// permutation[i]; the permutation matrix sends e_i to e_{permutation[i]}.
/// `max_word` bounds the length of the random SL_d(Z) word; with
/// `randomize` off the sampler returns the family's base point.
struct LocusDescriptor {
  LocusKind kind = LocusKind::HajosSup;
  int d = 2;
  std::vector<int> permutation;
  int max_word = 4;
  bool randomize = true;

  static LocusDescriptor hajos(int d, std::vector<int> perm = {}) {
    if (perm.empty()) {
      perm.resize(d);
      std::iota(perm.begin(), perm.end(), 0);
    }
    LocusDescriptor out{LocusKind::HajosSup, d, std::move(perm)};
    out.validate();
    return out;
  }
  static LocusDescriptor of(LocusKind kind) {
    if (kind == LocusKind::HajosSup) return hajos(2);
    return {kind, kind == LocusKind::HexagonalEuclid2 ? 2 : 3, {}};
  }

  void validate() const {
    if (kind == LocusKind::HajosSup) {
      if (d < 2) throw InputError("Hajos locus needs d >= 2");
      auto sorted = permutation;
      std::sort(sorted.begin(), sorted.end());
      for (int i = 0; i < static_cast<int>(sorted.size()); ++i)
        if (sorted[i] != i || static_cast<int>(sorted.size()) != d) throw InputError("invalid permutation");
    } else if (d != (kind == LocusKind::HexagonalEuclid2 ? 2 : 3)) {
      throw InputError("locus dimension mismatch");
    }
    if (max_word < 0) throw InputError("max_word must be nonnegative");
  }

  /// The norm whose critical locus this family lies in; cylindrical means
  /// max(|x_1, x_2|_2, |x_3|).
  NormDescriptor norm() const {
    switch (kind) {
      case LocusKind::HajosSup: return NormDescriptor::sup(d);
      case LocusKind::HexagonalEuclid2: return NormDescriptor::euclidean(2);
      default: return NormDescriptor::cylindrical(NormDescriptor::euclidean(2));
    }
  }
};

inline Matrix permutation_matrix(const std::vector<int>& perm) {
  const int d = static_cast<int>(perm.size());
  Matrix w = Matrix::Zero(d, d);
  for (int i = 0; i < d; ++i) w(perm[i], i) = 1.0;
  return w;
}

/// Product of up to max_word elementary matrices I +- E_ij.
inline Matrix random_sl_word(int d, int max_word, CounterRng& rng) {
  Matrix g = Matrix::Identity(d, d);
  const auto len = rng.uniform_int(0, max_word);
  for (std::int64_t k = 0; k < len; ++k) {
    const auto i = static_cast<int>(rng.uniform_int(0, d - 1));
    auto j = static_cast<int>(rng.uniform_int(0, d - 2));
    if (j >= i) ++j;
    const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
    g.row(i) += sign * g.row(j);
  }
  return g;
}

/// Radius of the critical cylinder lattices: r^3 = 2 / sqrt(3).
inline double cylinder_critical_radius() { return std::cbrt(2.0 / std::sqrt(3.0)); }

/// A lattice from the family described by `desc`.
///   HajosSup: w u w g, u upper unipotent with entries in [-1/2, 1/2], g a word.
///   CylindricalZ1: columns whose planar parts span a hexagonal lattice of
///     minimum r, random heights, third column (0, 0, r).
///   CylindricalZ2: a hexagonal layer of minimum r in the plane x_3 = 0 and a
///     third column (v, r) with random offset v.
///   HexagonalEuclid2: the det-1 hexagonal lattice, randomly rotated.
inline Lattice sample_locus(const LocusDescriptor& desc, std::uint64_t seed) {
  desc.validate();
  CounterRng rng(seed);
  const bool rnd = desc.randomize;
  switch (desc.kind) {
    case LocusKind::HajosSup: {
      const int d = desc.d;
      Matrix u = Matrix::Identity(d, d);
      if (rnd)
        for (int r = 0; r < d; ++r)
          for (int c = r + 1; c < d; ++c) u(r, c) = rng.uniform(-0.5, 0.5);
      const Matrix w = permutation_matrix(desc.permutation);
      const Matrix g = rnd ? random_sl_word(d, desc.max_word, rng) : Matrix::Identity(d, d);
      return Lattice(w * u * w * g);
    }
    case LocusKind::CylindricalZ1:
    case LocusKind::CylindricalZ2: {
      const double r = cylinder_critical_radius();
      const double theta = rnd ? rng.uniform(0.0, 2.0 * M_PI) : 0.0;
      const double h1 = rnd ? rng.uniform(-0.5, 0.5) * r : 0.0;
      const double h2 = rnd ? rng.uniform(-0.5, 0.5) * r : 0.0;
      Matrix b = Matrix::Zero(3, 3);
      const double c60 = std::cos(theta + M_PI / 3), s60 = std::sin(theta + M_PI / 3);
      b.col(0) << r * std::cos(theta), r * std::sin(theta), 0.0;
      b.col(1) << r * c60, r * s60, 0.0;
      if (desc.kind == LocusKind::CylindricalZ1) {
        b(2, 0) = h1;
        b(2, 1) = h2;
        b.col(2) << 0.0, 0.0, r;
      } else {
        b.col(2) << h1, h2, r;
      }
      return Lattice::normalized(std::move(b));
    }
    case LocusKind::HexagonalEuclid2:
      return hexagonal_lattice(rnd ? rng.uniform(0.0, 2.0 * M_PI) : 0.0);
  }
  throw InputError("unknown locus kind");
}

/// True iff lambda_1(L, nu) >= r_nu - kEps. A lower-bound r_nu (estimate mode)
/// is accepted; the answer is then "admissible at the certified radius".
inline bool locus_membership(const Lattice& lattice, const NormDescriptor& nu, const EnumerationOptions& opts = {}) {
  const double r_nu = critical_radius(nu).value;
  return first_minimum(lattice, nu, opts).value >= r_nu - kEps;
}

enum class DivergenceDirection { Forward, Backward };

inline const char* to_string(DivergenceDirection d) {
  return d == DivergenceDirection::Forward ? "forward" : "backward";
}

/// Index (0-based) of a standard basis vector in L, scanning from e_d down to
/// e_1, or -1. Membership is B^{-1} e_i integral within 1e-9.
inline int standard_basis_vector_in(const Lattice& lattice) {
  const int d = lattice.dimension();
  const Eigen::PartialPivLU<Matrix> lu(lattice.basis());
  for (int i = d - 1; i >= 0; --i) {
    const Vector c = lu.solve(Vector::Unit(d, i));
    bool integral = true;
    for (int k = 0; k < d && integral; ++k) integral = std::abs(c[k] - std::round(c[k])) <= 1e-9;
    if (integral) return i;
  }
  return -1;
}

/// Which way a_s sends a lattice from the family to infinity. Hajos samples
/// contain some e_i, contracted for s > 0 when i > m and for s < 0 otherwise.
inline DivergenceDirection divergence_direction(const Lattice& lattice, const WeightVector& w,
                                                const LocusDescriptor& desc) {
  if (w.d() != lattice.dimension()) throw InputError("weights and lattice dimensions differ");
  switch (desc.kind) {
    case LocusKind::HajosSup: {
      const int i = standard_basis_vector_in(lattice);
      if (i < 0) throw std::logic_error("Hajos sample contains no standard basis vector (sampler bug)");
      return i + 1 <= w.m() ? DivergenceDirection::Backward : DivergenceDirection::Forward;
    }
    case LocusKind::CylindricalZ1:
      if (w.m() != 2 || w.n() != 1) throw InputError("cylindrical loci need m = 2, n = 1");
      return DivergenceDirection::Forward;
    case LocusKind::CylindricalZ2:
      if (w.m() != 2 || w.n() != 1) throw InputError("cylindrical loci need m = 2, n = 1");
      return DivergenceDirection::Backward;
    case LocusKind::HexagonalEuclid2:
      break;
  }
  throw DomainError("divergence_direction: the hexagonal locus is compact and has no divergence direction");
}

inline void to_json(nlohmann::json& j, const LocusDescriptor& desc) {
  j = {{"kind", to_string(desc.kind)}, {"d", desc.d}, {"max_word", desc.max_word}, {"randomize", desc.randomize}};
  if (desc.kind == LocusKind::HajosSup) j["permutation"] = desc.permutation;
}

inline LocusDescriptor locus_from_json(const nlohmann::json& j) {
  LocusDescriptor desc;
  desc.kind = parse_locus_kind(j.at("kind").get<std::string>());
  desc.d = j.at("d").get<int>();
  desc.max_word = j.value("max_word", 4);
  desc.randomize = j.value("randomize", true);
  if (j.contains("permutation")) desc.permutation = j.at("permutation").get<std::vector<int>>();
  desc.validate();
  return desc;
}

/// Sample record: descriptor, seed and basis, enough to regenerate it.
inline nlohmann::json locus_sample_json(const LocusDescriptor& desc, std::uint64_t seed, const Lattice& lattice) {
  return {{"descriptor", desc}, {"seed", seed}, {"lattice", lattice}};
}

}  // namespace dlab

#endif  // DIRICHLET_LAB_CRITICAL_LOCI_HPP
