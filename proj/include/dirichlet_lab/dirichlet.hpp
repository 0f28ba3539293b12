#ifndef DIRICHLET_LAB_DIRICHLET_HPP
#define DIRICHLET_LAB_DIRICHLET_HPP

#include "dirichlet_lab/core.hpp"
#include "dirichlet_lab/critical_radius.hpp"
#include "dirichlet_lab/dynamics.hpp"
#include "dirichlet_lab/enumeration.hpp"
#include "dirichlet_lab/lattice.hpp"
#include "dirichlet_lab/norms.hpp"
#include "dirichlet_lab/parallel.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace dlab {

/// psi(t) = c / t, or a nonincreasing table interpolated linearly in t and
/// held constant outside its range.
class PsiFunction {
 public:
  static PsiFunction c_over_t(double c) {
    if (!(c > 0.0) || !std::isfinite(c)) throw InputError("psi: c must be positive");
    PsiFunction f;
    f.c_ = c;
    return f;
  }

  static PsiFunction tabulated(std::vector<std::pair<double, double>> points) {
    if (points.empty()) throw InputError("psi table is empty");
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (!(points[i].second > 0.0)) throw InputError("psi table values must be positive");
      if (i > 0 && !(points[i].first > points[i - 1].first)) throw InputError("psi table t must increase");
      if (i > 0 && points[i].second > points[i - 1].second) throw InputError("psi table values must be nonincreasing");
    }
    PsiFunction f;
    f.table_ = std::move(points);
    return f;
  }

  /// "c/t:<c>" or "table:t1=v1,t2=v2,...".
  static PsiFunction parse(const std::string& text) {
    try {
      if (text.rfind("c/t:", 0) == 0) return c_over_t(std::stod(text.substr(4)));
      if (text.rfind("table:", 0) == 0) {
        std::vector<std::pair<double, double>> pts;
        std::stringstream ss(text.substr(6));
        std::string item;
        while (std::getline(ss, item, ',')) {
          const auto eq = item.find('=');
          if (eq == std::string::npos) throw InputError("psi table entry needs t=value");
          pts.emplace_back(std::stod(item.substr(0, eq)), std::stod(item.substr(eq + 1)));
        }
        return tabulated(std::move(pts));
      }
    } catch (const std::invalid_argument&) {
      throw InputError("cannot parse psi '" + text + "'");
    }
    throw InputError("unknown psi '" + text + "'");
  }

  double operator()(double t) const {
    if (table_.empty()) return c_ / t;
    if (t <= table_.front().first) return table_.front().second;
    if (t >= table_.back().first) return table_.back().second;
    auto hi = std::upper_bound(table_.begin(), table_.end(), t, [](double x, const auto& p) { return x < p.first; });
    auto lo = hi - 1;
    const double u = (t - lo->first) / (hi->first - lo->first);
    return lo->second + u * (hi->second - lo->second);
  }

  std::string name() const {
    std::ostringstream os;
    if (table_.empty()) {
      os << "c/t:" << c_;
    } else {
      os << "table:";
      for (std::size_t i = 0; i < table_.size(); ++i) os << (i ? "," : "") << table_[i].first << "=" << table_[i].second;
    }
    return os.str();
  }

 private:
  PsiFunction() = default;
  double c_ = 1.0;
  std::vector<std::pair<double, double>> table_;
};

struct DirichletSolution {
  IntVector p;
  IntVector q;
};

namespace detail {

// Both checkers compare normalized coordinates against 1 - kEps, so a point on
// the boundary of the box never counts as a solution.
inline bool inside_box(const Vector& coords, const Vector& half_widths) {
  for (int i = 0; i < coords.size(); ++i)
    if (!(std::abs(coords[i]) / half_widths[i] < 1.0 - kEps)) return false;
  return true;
}

inline Vector box_half_widths(double psi_t, double t, const WeightVector& w) {
  Vector h(w.d());
  for (int i = 0; i < w.m(); ++i) h[i] = std::pow(psi_t, w.alpha()[i]);
  for (int j = 0; j < w.n(); ++j) h[w.m() + j] = std::pow(t, w.beta()[j]);
  return h;
}

}  // namespace detail

/// Scans q != 0 with |q_j| < t^{beta_j}, taking p_i nearest to A_i q, for a
/// solution of |A_i q - p_i| < psi_t^{alpha_i}. Sup-norm formulation only.
/// Returns the first solution in scan order (odometer from -bound to +bound,
/// first nonzero coordinate of q positive).
inline std::optional<DirichletSolution> solve_weighted_system(const MatrixA& a, double t, double psi_t,
                                                              const WeightVector& w,
                                                              std::uint64_t budget = kDefaultNodeBudget) {
  check_shapes(a, w);
  if (!(t > 1.0)) throw DomainError("solve_weighted_system: need t > 1");
  if (!(psi_t > 0.0)) throw DomainError("solve_weighted_system: need psi(t) > 0");
  const int m = a.m();
  const int n = a.n();
  const Vector half = detail::box_half_widths(psi_t, t, w);
  std::vector<std::int64_t> bound(n);
  double box = 1.0;
  for (int j = 0; j < n; ++j) {
    bound[j] = static_cast<std::int64_t>(std::floor(half[m + j]));
    box *= 2.0 * static_cast<double>(bound[j]) + 1.0;
  }
  if (box > static_cast<double>(budget)) throw BudgetExceeded("solve_weighted_system: box exceeds budget", budget);

  std::vector<std::int64_t> q(n);
  for (int j = 0; j < n; ++j) q[j] = -bound[j];
  Vector coords(m + n);
  Vector qv(n);
  for (;;) {
    bool canonical = false;
    for (int j = 0; j < n; ++j) {
      if (q[j] != 0) {
        canonical = q[j] > 0;
        break;
      }
    }
    if (canonical) {
      for (int j = 0; j < n; ++j) qv[j] = static_cast<double>(q[j]);
      const Vector aq = a.entries() * qv;
      IntVector p(m);
      for (int i = 0; i < m; ++i) {
        p[i] = detail::round_to_int(aq[i]);
        coords[i] = aq[i] - static_cast<double>(p[i]);
      }
      coords.tail(n) = qv;
      if (detail::inside_box(coords, half)) return DirichletSolution{std::move(p), IntVector(q.begin(), q.end())};
    }
    int j = n - 1;
    while (j >= 0 && q[j] == bound[j]) q[j] = -bound[j], --j;
    if (j < 0) break;
    ++q[j];
  }
  return std::nullopt;
}

/// Re-checks a solution against the strict inequalities.
inline bool verify_solution(const MatrixA& a, double t, double psi_t, const WeightVector& w,
                            const DirichletSolution& sol) {
  const int m = a.m();
  const int n = a.n();
  if (static_cast<int>(sol.p.size()) != m || static_cast<int>(sol.q.size()) != n) return false;
  if (std::all_of(sol.q.begin(), sol.q.end(), [](auto x) { return x == 0; })) return false;
  Vector qv(n);
  for (int j = 0; j < n; ++j) qv[j] = static_cast<double>(sol.q[j]);
  const Vector aq = a.entries() * qv;
  Vector coords(m + n);
  for (int i = 0; i < m; ++i) coords[i] = aq[i] - static_cast<double>(sol.p[i]);
  coords.tail(n) = qv;
  return detail::inside_box(coords, detail::box_half_widths(psi_t, t, w));
}

enum class Branch { QNonzero, QZeroOnly, None };

inline const char* to_string(Branch b) {
  switch (b) {
    case Branch::QNonzero: return "q_nonzero";
    case Branch::QZeroOnly: return "q_zero_only";
    case Branch::None: return "none";
  }
  return "?";
}

struct GeometricCheck {
  bool solvable = false;            // some nonzero lattice point in the body
  bool solvable_q_nonzero = false;  // ... with q != 0
  Branch branch = Branch::None;
  double lambda1 = 0.0;  // nu-minimum of D_t^{-1} Lambda_A, compared against r_nu
  double critical_radius = 0.0;
  std::optional<DirichletSolution> witness;
};

struct DirichletOptions {
  EnumerationOptions enumeration{};
  int jobs = 1;
};

/// Does Lambda_A meet D_t B_nu(r_nu), D_t = diag(psi(t)^alpha, t^beta)? This is
/// decided as lambda_1(D_t^{-1} Lambda_A, nu) < r_nu on a det-1 rescaling of
/// D_t^{-1} Lambda_A. The q != 0 sub-question is answered separately, since
/// for psi(t) >= 1 a point (p, 0) can lie in the body on its own.
inline GeometricCheck geometric_check(const MatrixA& a, double t, const PsiFunction& psi, const WeightVector& w,
                                      const NormDescriptor& nu, const DirichletOptions& opts = {}) {
  check_shapes(a, w);
  if (!(t > 1.0)) throw DomainError("geometric_check: need t > 1");
  if (nu.dimension() != a.d()) throw InputError("norm dimension does not match A");
  const int m = a.m();
  const int d = a.d();
  const double psi_t = psi(t);
  const Vector half = detail::box_half_widths(psi_t, t, w);
  const double scale = std::pow(psi_t * t, 1.0 / d);
  Matrix basis = unipotent_of(a);
  for (int r = 0; r < d; ++r) basis.row(r) *= scale / half[r];
  const Lattice rescaled(std::move(basis), 1e-6);

  GeometricCheck out;
  out.critical_radius = critical_radius(nu).value;
  const double limit = out.critical_radius * scale;
  const auto prep = detail::prepare(rescaled.basis(), opts.enumeration.lll_delta);
  auto q_nonzero = [m](const IntVector& z) {
    return std::any_of(z.begin() + m, z.end(), [](auto x) { return x != 0; });
  };
  auto to_solution = [m](const LatticeVector& v) {
    DirichletSolution sol{IntVector(m), IntVector(v.coeffs.begin() + m, v.coeffs.end())};
    for (int i = 0; i < m; ++i) sol.p[i] = -v.coeffs[i];
    const auto first = std::find_if(sol.q.begin(), sol.q.end(), [](auto x) { return x != 0; });
    if (first != sol.q.end() && *first < 0) {
      for (auto& x : sol.p) x = -x;
      for (auto& x : sol.q) x = -x;
    }
    return sol;
  };

  const auto restricted = detail::minimum_over(prep, nu, limit, q_nonzero, opts.enumeration.node_budget);
  if (restricted && strictly_inside(restricted->value / scale, out.critical_radius)) {
    out.solvable_q_nonzero = true;
    out.solvable = true;
    out.branch = Branch::QNonzero;
    out.lambda1 = restricted->value / scale;
    out.witness = to_solution(restricted->witness);
    // lambda1 must be the unrestricted minimum; a (p, 0) point may be shorter.
    const auto any = detail::minimum_over(prep, nu, limit, nullptr, opts.enumeration.node_budget);
    if (any) out.lambda1 = std::min(out.lambda1, any->value / scale);
    return out;
  }
  const auto any = detail::minimum_over(prep, nu, limit, nullptr, opts.enumeration.node_budget);
  if (any && strictly_inside(any->value / scale, out.critical_radius)) {
    out.solvable = true;
    out.branch = Branch::QZeroOnly;
    out.lambda1 = any->value / scale;
    out.witness = to_solution(any->witness);
  } else {
    out.lambda1 = any ? any->value / scale : out.critical_radius;
  }
  return out;
}

inline std::vector<double> geometric_grid(double lo, double hi, int count) {
  if (!(lo > 0.0 && hi > lo) || count < 2) throw InputError("geometric grid needs 0 < lo < hi and count >= 2");
  std::vector<double> out(count);
  for (int k = 0; k < count; ++k) out[k] = lo * std::pow(hi / lo, static_cast<double>(k) / (count - 1));
  out.back() = hi;
  return out;
}

struct DirichletEntry {
  double t = 0.0;
  double psi = 0.0;
  GeometricCheck check;
  std::optional<std::string> error;
};

struct DirichletVerdict {
  std::vector<DirichletEntry> entries;
  bool all_solvable = false;
  std::optional<double> first_failure;  // t* of the first unsolvable or failed t
  double critical_radius = 0.0;

  std::string summary() const {
    if (all_solvable) return "all-solvable";
    std::ostringstream os;
    os << "first-failure-at " << *first_failure;
    return os.str();
  }
};

/// geometric_check over a finite increasing grid of t > 1.
inline DirichletVerdict scan_dirichlet(const MatrixA& a, const PsiFunction& psi, const WeightVector& w,
                                       const NormDescriptor& nu, const std::vector<double>& t_grid,
                                       const DirichletOptions& opts = {}) {
  if (t_grid.empty()) throw InputError("scan_dirichlet: empty grid");
  if (!(t_grid.front() > 1.0)) throw DomainError("scan_dirichlet: grid must start above 1");
  for (std::size_t k = 1; k < t_grid.size(); ++k)
    if (!(t_grid[k] > t_grid[k - 1])) throw InputError("scan_dirichlet: grid must increase");

  DirichletVerdict verdict;
  verdict.critical_radius = critical_radius(nu).value;
  const auto fixed_nu = nu.attached_critical_radius()
                            ? nu
                            : nu.with_critical_radius({verdict.critical_radius, critical_radius(nu).status});
  DirichletOptions inner = opts;
  inner.jobs = 1;
  verdict.entries = parallel_map(t_grid.size(), opts.jobs, [&](std::size_t k) {
    DirichletEntry e;
    e.t = t_grid[k];
    e.psi = psi(e.t);
    try {
      e.check = geometric_check(a, e.t, psi, w, fixed_nu, inner);
    } catch (const BudgetExceeded& ex) {
      e.error = ex.what();
    } catch (const NumericalRankError& ex) {
      e.error = ex.what();
    }
    return e;
  });
  verdict.all_solvable = true;
  for (const auto& e : verdict.entries) {
    if (e.error || !e.check.solvable) {
      verdict.all_solvable = false;
      verdict.first_failure = e.t;
      break;
    }
  }
  return verdict;
}

inline void to_json(nlohmann::json& j, const DirichletEntry& e) {
  j = {{"t", e.t},
                   {"psi", e.psi},
                   {"solvable", e.check.solvable},
                   {"solvable_q_nonzero", e.check.solvable_q_nonzero},
                   {"branch", to_string(e.check.branch)},
                   {"lambda1", e.check.lambda1},
                   {"critical_radius", e.check.critical_radius}};
  if (e.check.witness) {
    j["p"] = e.check.witness->p;
    j["q"] = e.check.witness->q;
  }
  if (e.error) j["error"] = *e.error;
}

}  // namespace dlab

#endif  // DIRICHLET_LAB_DIRICHLET_HPP
