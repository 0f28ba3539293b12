#ifndef DIRICHLET_LAB_DYNAMICS_HPP
#define DIRICHLET_LAB_DYNAMICS_HPP

#include "dirichlet_lab/core.hpp"
#include "dirichlet_lab/critical_radius.hpp"
#include "dirichlet_lab/enumeration.hpp"
#include "dirichlet_lab/lattice.hpp"
#include "dirichlet_lab/norms.hpp"
#include "dirichlet_lab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace dlab {

using DiagonalMatrix = Eigen::DiagonalMatrix<double, Eigen::Dynamic>;

/// a_s = diag(e^{s alpha_1}, ..., e^{s alpha_m}, e^{-s beta_1}, ..., e^{-s beta_n}).
inline DiagonalMatrix flow_matrix(const WeightVector& w, double s) {
  Vector diag(w.d());
  for (int i = 0; i < w.m(); ++i) diag[i] = std::exp(s * w.alpha()[i]);
  for (int j = 0; j < w.n(); ++j) diag[w.m() + j] = std::exp(-s * w.beta()[j]);
  return DiagonalMatrix(diag);
}

inline Lattice apply_flow(const Lattice& lattice, const WeightVector& w, double s) {
  if (w.d() != lattice.dimension()) throw InputError("weights and lattice dimensions differ");
  return Lattice(flow_matrix(w, s) * lattice.basis(), lattice.det_tolerance());
}

inline void check_shapes(const MatrixA& a, const WeightVector& w) {
  if (a.m() != w.m() || a.n() != w.n()) throw InputError("weights do not match the shape of A");
}

/// a_s Lambda_A.
inline Lattice flowed_lattice(const MatrixA& a, const WeightVector& w, double s) {
  check_shapes(a, w);
  return Lattice(flow_matrix(w, s) * unipotent_of(a));
}

/// lo, lo + step, ... up to hi (inclusive within 1e-9 step).
inline std::vector<double> uniform_grid(double lo, double hi, double step) {
  if (!(step > 0.0) || !(hi >= lo)) throw InputError("grid needs step > 0 and hi >= lo");
  std::vector<double> out;
  const auto count = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
  for (long k = 0; k <= count; ++k) out.push_back(lo + static_cast<double>(k) * step);
  return out;
}

inline std::vector<double> default_probe_radii(double r_nu) {
  return {0.5 * r_nu, 0.8 * r_nu, 0.9 * r_nu, 0.95 * r_nu, 0.99 * r_nu};
}

struct ProbeFlag {
  double radius;
  bool admissible;  // lambda_1 >= radius, i.e. a_s Lambda in K_nu(radius)
};

struct TrajectorySample {
  double s = 0.0;
  double lambda1 = std::numeric_limits<double>::quiet_NaN();
  LatticeVector witness;
  std::vector<ProbeFlag> admissible_at;
  std::optional<std::string> error;  // set when the sample failed

  bool ok() const { return !error.has_value(); }
};

struct TrajectoryOptions {
  std::vector<double> probe_radii;  // empty: default_probe_radii(r_nu)
  EnumerationOptions enumeration{};
  int jobs = 1;
};

/// lambda_1(a_s Lambda_A, nu) with witness and probe flags for each s.
/// Failures (budget, numerical rank) mark the sample and the run continues.
inline std::vector<TrajectorySample> trajectory(const MatrixA& a, const WeightVector& w, const NormDescriptor& nu,
                                                const std::vector<double>& s_grid, const TrajectoryOptions& opts = {}) {
  check_shapes(a, w);
  if (nu.dimension() != a.d()) throw InputError("norm dimension does not match A");
  if (!std::is_sorted(s_grid.begin(), s_grid.end())) throw InputError("trajectory grid must be sorted");
  const auto probes = opts.probe_radii.empty() ? default_probe_radii(critical_radius(nu).value) : opts.probe_radii;

  return parallel_map(s_grid.size(), opts.jobs, [&](std::size_t k) {
    TrajectorySample sample;
    sample.s = s_grid[k];
    try {
      const auto fm = first_minimum(flowed_lattice(a, w, sample.s), nu, opts.enumeration);
      sample.lambda1 = fm.value;
      sample.witness = fm.witness;
      for (double r : probes) sample.admissible_at.push_back({r, !strictly_inside(fm.value, r)});
    } catch (const BudgetExceeded& e) {
      sample.error = e.what();
    } catch (const NumericalRankError& e) {
      sample.error = e.what();
    }
    return sample;
  });
}

// Dani correspondence conversions.

/// s = (1/2) ln(t^2 / c); requires 0 < c <= 1 and t > sqrt(c).
inline double flow_time_for_horizon(double t, double c) {
  if (!(c > 0.0 && c <= 1.0)) throw DomainError("Dani conversion: need 0 < c <= 1");
  if (!(t > std::sqrt(c))) throw DomainError("Dani conversion: need t > sqrt(c)");
  return 0.5 * std::log(t * t / c);
}

/// Inverse of flow_time_for_horizon: t = sqrt(c) e^s.
inline double horizon_for_flow_time(double s, double c) {
  if (!(c > 0.0 && c <= 1.0)) throw DomainError("Dani conversion: need 0 < c <= 1");
  if (!(s > 0.0)) throw DomainError("Dani conversion: need s > 0");
  return std::sqrt(c) * std::exp(s);
}

/// r(c) = r_nu max{c^{alpha_i/2}, c^{beta_j/2}}.
inline double radius_for_improvement(double c, const WeightVector& w, double r_nu) {
  if (!(c > 0.0 && c <= 1.0)) throw DomainError("Dani conversion: need 0 < c <= 1");
  double best = 0.0;
  for (double a : w.alpha()) best = std::max(best, std::pow(c, a / 2.0));
  for (double b : w.beta()) best = std::max(best, std::pow(c, b / 2.0));
  return r_nu * best;
}

/// c(r) = (r / r_nu)^{2 / gamma}, gamma = max beta_j.
inline double improvement_for_radius(double r, const WeightVector& w, double r_nu) {
  if (!(r > 0.0 && r <= r_nu)) throw DomainError("Dani conversion: need 0 < r <= r_nu");
  return std::pow(r / r_nu, 2.0 / w.gamma());
}

enum class DaniDirection { HorizonToTime, TimeToHorizon, ImprovementToRadius, RadiusToImprovement };

/// Single entry point for the four conversions. `c` is the improvement
/// constant for the time conversions and ignored for the radius ones, where
/// `value` carries c or r.
inline double dani_convert(DaniDirection direction, double value, double c, const WeightVector& w,
                           const NormDescriptor& nu) {
  switch (direction) {
    case DaniDirection::HorizonToTime: return flow_time_for_horizon(value, c);
    case DaniDirection::TimeToHorizon: return horizon_for_flow_time(value, c);
    case DaniDirection::ImprovementToRadius: return radius_for_improvement(value, w, critical_radius(nu).value);
    case DaniDirection::RadiusToImprovement: return improvement_for_radius(value, w, critical_radius(nu).value);
  }
  throw DomainError("unknown Dani direction");
}

// Diagnostics. All verdicts are relative to the finite window that produced
// them; none of DI, BA or Sing can be decided from finite data.

enum class DiagnosticKind { DI, BA, Sing };
enum class Verdict { Consistent, Inconsistent, Inconclusive };
enum class TailClass { Divergent, BoundedAway, Inconclusive };

inline const char* to_string(DiagnosticKind k) {
  switch (k) {
    case DiagnosticKind::DI: return "DI";
    case DiagnosticKind::BA: return "BA";
    case DiagnosticKind::Sing: return "Sing";
  }
  return "?";
}

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Consistent: return "consistent";
    case Verdict::Inconsistent: return "inconsistent";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

inline const char* to_string(TailClass t) {
  switch (t) {
    case TailClass::Divergent: return "divergent";
    case TailClass::BoundedAway: return "bounded-away";
    case TailClass::Inconclusive: return "inconclusive";
  }
  return "?";
}

struct DiagnosticReport {
  DiagnosticKind kind = DiagnosticKind::DI;
  double s_lo = 0.0;
  double s_hi = 0.0;
  double statistic = 0.0;
  Verdict verdict = Verdict::Inconclusive;
  TailClass tail = TailClass::Inconclusive;  // divergence_diagnostic only
  double slope = std::numeric_limits<double>::quiet_NaN();  // fitted d(log lambda_1)/ds of the tail
  int failed_samples = 0;

  std::string describe() const {
    std::ostringstream os;
    os << to_string(verdict) << " with " << to_string(kind) << " on s in [" << s_lo << ", " << s_hi
       << "] (statistic " << statistic << ")";
    return os.str();
  }
};

struct DiOptions {
  double margin_fraction = 0.02;  // margin = margin_fraction * r_nu
  EnumerationOptions enumeration{};
  int jobs = 1;
};

/// Samples lambda_1 along a_s Lambda_A on `probe_count` evenly spaced points of
/// [s_lo, s_hi]. The statistic is the largest lambda_1 over the tail half of
/// the window: below r_nu - margin reads as consistent with DI, reaching
/// r_nu - kEps as inconsistent, anything between as inconclusive.
inline DiagnosticReport di_diagnostic(const MatrixA& a, const WeightVector& w, const NormDescriptor& nu, double s_lo,
                                      double s_hi, int probe_count, const DiOptions& opts = {}) {
  if (!(s_hi > s_lo && s_lo > 0.0)) throw DomainError("di_diagnostic: need s_hi > s_lo > 0");
  if (probe_count < 2) throw DomainError("di_diagnostic: need at least two probes");
  const double r_nu = critical_radius(nu).value;
  const double mid = 0.5 * (s_lo + s_hi);
  std::vector<double> grid;
  for (int k = 0; k < probe_count; ++k) {
    const double s = s_lo + (s_hi - s_lo) * k / (probe_count - 1);
    if (s >= mid) grid.push_back(s);
  }
  TrajectoryOptions topts;
  topts.probe_radii = {r_nu};
  topts.enumeration = opts.enumeration;
  topts.jobs = opts.jobs;
  const auto samples = trajectory(a, w, nu, grid, topts);

  DiagnosticReport report;
  report.kind = DiagnosticKind::DI;
  report.s_lo = s_lo;
  report.s_hi = s_hi;
  report.statistic = 0.0;
  for (const auto& smp : samples) {
    if (!smp.ok()) {
      ++report.failed_samples;
      continue;
    }
    report.statistic = std::max(report.statistic, smp.lambda1);
  }
  if (report.statistic >= r_nu - kEps) {
    report.verdict = Verdict::Inconsistent;
  } else if (report.failed_samples > 0) {
    report.verdict = Verdict::Inconclusive;
  } else if (report.statistic < r_nu - opts.margin_fraction * r_nu) {
    report.verdict = Verdict::Consistent;
  } else {
    report.verdict = Verdict::Inconclusive;
  }
  return report;
}

struct BaScore {
  double value = std::numeric_limits<double>::infinity();
  IntVector q;
  IntVector p;
};

struct BaScoreOptions {
  // Only q with tail_start <= |q|_beta <= Q are scored; NaN means sqrt(Q).
  double tail_start = std::numeric_limits<double>::quiet_NaN();
  std::uint64_t budget = kDefaultNodeBudget;
};

/// min |Aq - p|_alpha |q|_beta over integer q with tail_start <= |q|_beta <= Q
/// and p the coordinatewise nearest integer vector to Aq. Restricting to the
/// tail discards the small-q transients, so for quadratic irrationals the
/// score approaches the lim inf (1/sqrt 5 for the golden ratio).
inline BaScore ba_score(const MatrixA& a, const WeightVector& w, double height_bound, const BaScoreOptions& opts = {}) {
  check_shapes(a, w);
  if (!(height_bound >= 1.0)) throw DomainError("ba_score: need Q >= 1");
  const double tail = std::isnan(opts.tail_start) ? std::sqrt(height_bound) : opts.tail_start;
  const int n = a.n();
  std::vector<std::int64_t> bound(n);
  double box = 1.0;
  for (int j = 0; j < n; ++j) {
    bound[j] = static_cast<std::int64_t>(std::floor(std::pow(height_bound, w.beta()[j]) * (1.0 + 1e-12)));
    box *= 2.0 * static_cast<double>(bound[j]) + 1.0;
  }
  if (box > static_cast<double>(opts.budget)) throw BudgetExceeded("ba_score: search box exceeds budget", opts.budget);

  BaScore best;
  std::vector<std::int64_t> q(n);
  for (int j = 0; j < n; ++j) q[j] = -bound[j];
  Vector qv(n);
  for (;;) {
    // Keep one of +-q: first nonzero coordinate positive.
    bool canonical = false;
    for (int j = 0; j < n; ++j) {
      if (q[j] != 0) {
        canonical = q[j] > 0;
        break;
      }
    }
    if (canonical) {
      for (int j = 0; j < n; ++j) qv[j] = static_cast<double>(q[j]);
      const double qnorm = quasi_norm(qv, w.beta());
      if (qnorm >= tail && qnorm <= height_bound * (1.0 + 1e-12)) {
        const Vector aq = a.entries() * qv;
        Vector err(a.m());
        for (int i = 0; i < a.m(); ++i) err[i] = aq[i] - std::round(aq[i]);
        const double score = quasi_norm(err, w.alpha()) * qnorm;
        if (score < best.value) {
          best.value = score;
          best.q.assign(q.begin(), q.end());
          best.p.resize(a.m());
          for (int i = 0; i < a.m(); ++i) best.p[i] = detail::round_to_int(aq[i]);
        }
      }
    }
    int j = n - 1;
    while (j >= 0 && q[j] == bound[j]) q[j] = -bound[j], --j;
    if (j < 0) break;
    ++q[j];
  }
  return best;
}

struct DivergenceOptions {
  double threshold = 0.05;
};

/// Classifies a lambda_1 series: divergent when the final value is below the
/// threshold and log lambda_1 has negative least-squares slope over the tail
/// half; bounded-away when every sample stays at or above the threshold.
inline DiagnosticReport divergence_diagnostic(std::vector<TrajectorySample> samples, const DivergenceOptions& opts = {}) {
  std::erase_if(samples, [](const TrajectorySample& s) { return !s.ok(); });
  if (samples.size() < 10) throw DomainError("divergence_diagnostic: need at least 10 usable samples");
  std::sort(samples.begin(), samples.end(), [](const auto& x, const auto& y) { return x.s < y.s; });

  DiagnosticReport report;
  report.s_lo = samples.front().s;
  report.s_hi = samples.back().s;
  const std::size_t half = samples.size() / 2;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const auto k = static_cast<double>(samples.size() - half);
  for (std::size_t i = half; i < samples.size(); ++i) {
    const double x = samples[i].s;
    const double y = std::log(samples[i].lambda1);
    sx += x, sy += y, sxx += x * x, sxy += x * y;
  }
  const double denom = k * sxx - sx * sx;
  report.slope = denom > 0 ? (k * sxy - sx * sy) / denom : 0.0;

  double lowest = std::numeric_limits<double>::infinity();
  for (const auto& s : samples) lowest = std::min(lowest, s.lambda1);
  const double last = samples.back().lambda1;

  if (last < opts.threshold && report.slope < 0.0) {
    report.tail = TailClass::Divergent;
    report.kind = DiagnosticKind::Sing;
    report.verdict = Verdict::Consistent;
    report.statistic = last;
  } else if (lowest >= opts.threshold) {
    report.tail = TailClass::BoundedAway;
    report.kind = DiagnosticKind::BA;
    report.verdict = Verdict::Consistent;
    report.statistic = lowest;
  } else {
    report.tail = TailClass::Inconclusive;
    report.kind = DiagnosticKind::Sing;
    report.verdict = Verdict::Inconclusive;
    report.statistic = last;
  }
  return report;
}

}  // namespace dlab

#endif  // DIRICHLET_LAB_DYNAMICS_HPP
