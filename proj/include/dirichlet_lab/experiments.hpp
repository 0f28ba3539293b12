#ifndef DIRICHLET_LAB_EXPERIMENTS_HPP
#define DIRICHLET_LAB_EXPERIMENTS_HPP

#include "dirichlet_lab/core.hpp"
#include "dirichlet_lab/critical_radius.hpp"
#include "dirichlet_lab/dynamics.hpp"
#include "dirichlet_lab/enumeration.hpp"
#include "dirichlet_lab/lattice.hpp"
#include "dirichlet_lab/norms.hpp"
#include "dirichlet_lab/parallel.hpp"
#include "dirichlet_lab/rng.hpp"

#include <nlohmann/json.hpp>

#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace dlab {

enum class ExperimentKind { Equidistribution, DiMeasure, BaInDi, SingDemo };

inline const char* to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::Equidistribution: return "equidistribution";
    case ExperimentKind::DiMeasure: return "di_measure";
    case ExperimentKind::BaInDi: return "ba_in_di";
    case ExperimentKind::SingDemo: return "sing_demo";
  }
  return "?";
}

inline ExperimentKind parse_experiment_kind(const std::string& s) {
  if (s == "equidistribution") return ExperimentKind::Equidistribution;
  if (s == "di_measure") return ExperimentKind::DiMeasure;
  if (s == "ba_in_di") return ExperimentKind::BaInDi;
  if (s == "sing_demo") return ExperimentKind::SingDemo;
  throw InputError("unknown experiment kind '" + s + "'");
}

/// `times` holds the flow times s (equidistribution), the horizons S
/// (di_measure) or a single horizon (ba_in_di, sing_demo). Orbits are sampled
/// on a uniform grid of spacing `step` starting at `s_start`.
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Equidistribution;
  int m = 1;
  int n = 1;
  std::vector<double> weights;  // flat alpha then beta; empty = unweighted
  std::string norm = "sup";
  int samples = 1000;
  std::uint64_t seed = 0;
  std::vector<double> times{6.0, 9.0, 12.0};
  double radius = 0.9;
  double s_start = 1.0;
  double step = 0.05;
  std::vector<double> witnesses;  // ba_in_di values of A (m = n = 1)
  std::vector<double> matrix{0.5};  // sing_demo A, row-major
  int probe_count = 200;
  double margin_fraction = 0.02;
  std::string output;
  int jobs = 1;
  std::uint64_t node_budget = kDefaultNodeBudget;

  WeightVector weight_vector() const {
    return weights.empty() ? WeightVector::unweighted(m, n) : WeightVector::from_flat(weights, m);
  }

  void validate() const {
    if (m < 1 || n < 1) throw InputError("experiment: m and n must be positive");
    weight_vector();
    if (times.empty()) throw InputError("experiment: times must not be empty");
    if (!(step > 0.0)) throw InputError("experiment: step must be positive");
    const bool monte_carlo = kind == ExperimentKind::Equidistribution || kind == ExperimentKind::DiMeasure;
    if (monte_carlo && samples < 100) throw InputError("experiment: need at least 100 samples");
    if (kind == ExperimentKind::BaInDi && (m != 1 || n != 1)) throw InputError("ba_in_di: needs m = n = 1");
    if (kind == ExperimentKind::SingDemo && static_cast<int>(matrix.size()) != m * n)
      throw InputError("sing_demo: matrix has the wrong number of entries");
  }
};

inline void to_json(nlohmann::json& j, const ExperimentConfig& c) {
  j = {{"kind", to_string(c.kind)},
       {"m", c.m},
       {"n", c.n},
       {"weights", c.weights},
       {"norm", c.norm},
       {"samples", c.samples},
       {"seed", c.seed},
       {"times", c.times},
       {"radius", c.radius},
       {"s_start", c.s_start},
       {"step", c.step},
       {"witnesses", c.witnesses},
       {"matrix", c.matrix},
       {"probe_count", c.probe_count},
       {"margin_fraction", c.margin_fraction},
       {"output", c.output},
       {"jobs", c.jobs},
       {"node_budget", c.node_budget}};
}

/// Reads a config; missing keys keep their defaults except `kind` and `seed`.
inline ExperimentConfig experiment_config_from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  if (!j.contains("kind")) throw InputError("experiment config needs 'kind'");
  if (!j.contains("seed")) throw InputError("experiment config needs an explicit 'seed'");
  try {
    c.kind = parse_experiment_kind(j.at("kind").get<std::string>());
    c.seed = j.at("seed").get<std::uint64_t>();
    c.m = j.value("m", c.m);
    c.n = j.value("n", c.n);
    c.weights = j.value("weights", c.weights);
    c.norm = j.value("norm", c.norm);
    c.samples = j.value("samples", c.samples);
    c.times = j.value("times", c.times);
    c.radius = j.value("radius", c.radius);
    c.s_start = j.value("s_start", c.s_start);
    c.step = j.value("step", c.step);
    c.witnesses = j.value("witnesses", c.witnesses);
    c.matrix = j.value("matrix", c.matrix);
    c.probe_count = j.value("probe_count", c.probe_count);
    c.margin_fraction = j.value("margin_fraction", c.margin_fraction);
    c.output = j.value("output", c.output);
    c.jobs = j.value("jobs", c.jobs);
    c.node_budget = j.value("node_budget", c.node_budget);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("experiment config: ") + e.what());
  }
  c.validate();
  return c;
}

/// One statistic. For Monte Carlo kinds value = count / total and stderr is
/// the binomial sqrt(p (1 - p) / total).
struct ReportCell {
  std::string label;
  double x = 0.0;
  double value = 0.0;
  double stderr_value = 0.0;
  std::int64_t count = 0;
  std::int64_t total = 0;

  bool operator==(const ReportCell&) const = default;
};

struct ExperimentReport {
  ExperimentConfig config;
  double critical_radius = 0.0;
  std::vector<ReportCell> cells;
  std::string criterion;
  bool passed = false;
  std::int64_t failed_samples = 0;
  double runtime_seconds = 0.0;
};

inline double binomial_stderr(std::int64_t count, std::int64_t total) {
  if (total <= 0) return 0.0;
  const double p = static_cast<double>(count) / static_cast<double>(total);
  return std::sqrt(p * (1.0 - p) / static_cast<double>(total));
}

namespace detail {

inline ReportCell proportion(std::string label, double x, std::int64_t count, std::int64_t total) {
  const double p = total > 0 ? static_cast<double>(count) / static_cast<double>(total) : 0.0;
  return {std::move(label), x, p, binomial_stderr(count, total), count, total};
}

inline MatrixA random_a(const ExperimentConfig& cfg, CounterRng& rng) {
  return MatrixA(random_matrix(cfg.m, cfg.n, rng));
}

inline void run_equidistribution(const ExperimentConfig& cfg, const NormDescriptor& nu, ExperimentReport& rep) {
  const auto w = cfg.weight_vector();
  const CounterRng root(cfg.seed);
  const EnumerationOptions eopts{cfg.node_budget};
  // Per sample: admissible flag at each s, or nothing when a sample failed.
  const auto flags = parallel_map(cfg.samples, cfg.jobs, [&](std::size_t k) -> std::optional<std::vector<char>> {
    CounterRng rng = root.substream(k);
    const MatrixA a = random_a(cfg, rng);
    std::vector<char> out;
    try {
      for (double s : cfg.times)
        out.push_back(!strictly_inside(first_minimum(flowed_lattice(a, w, s), nu, eopts).value, cfg.radius));
    } catch (const BudgetExceeded&) {
      return std::nullopt;
    } catch (const NumericalRankError&) {
      return std::nullopt;
    }
    return out;
  });
  std::vector<std::int64_t> hits(cfg.times.size(), 0);
  std::int64_t total = 0;
  for (const auto& f : flags) {
    if (!f) {
      ++rep.failed_samples;
      continue;
    }
    ++total;
    for (std::size_t i = 0; i < hits.size(); ++i) hits[i] += (*f)[i];
  }
  for (std::size_t i = 0; i < hits.size(); ++i) rep.cells.push_back(proportion("fraction_in_K", cfg.times[i], hits[i], total));
  rep.criterion = "fractions pairwise within 3 combined binomial standard errors";
  rep.passed = total > 0;
  for (std::size_t i = 0; i < rep.cells.size(); ++i) {
    for (std::size_t j = i + 1; j < rep.cells.size(); ++j) {
      const auto& a = rep.cells[i];
      const auto& b = rep.cells[j];
      const double tol = 3.0 * std::hypot(a.stderr_value, b.stderr_value);
      if (std::abs(a.value - b.value) > tol) rep.passed = false;
    }
  }
}

inline void run_di_measure(const ExperimentConfig& cfg, const NormDescriptor& nu, ExperimentReport& rep) {
  const auto w = cfg.weight_vector();
  const CounterRng root(cfg.seed);
  const EnumerationOptions eopts{cfg.node_budget};
  const double horizon = *std::max_element(cfg.times.begin(), cfg.times.end());
  const auto grid = uniform_grid(cfg.s_start, horizon, cfg.step);
  // First grid time at which the orbit enters K(r); +inf if never, NaN on failure.
  const auto entry = parallel_map(cfg.samples, cfg.jobs, [&](std::size_t k) {
    CounterRng rng = root.substream(k);
    const MatrixA a = random_a(cfg, rng);
    try {
      for (double s : grid)
        if (!strictly_inside(first_minimum(flowed_lattice(a, w, s), nu, eopts).value, cfg.radius)) return s;
    } catch (const BudgetExceeded&) {
      return std::numeric_limits<double>::quiet_NaN();
    } catch (const NumericalRankError&) {
      return std::numeric_limits<double>::quiet_NaN();
    }
    return std::numeric_limits<double>::infinity();
  });
  std::int64_t total = 0;
  for (double e : entry) std::isnan(e) ? ++rep.failed_samples : ++total;
  for (double horizon_s : cfg.times) {
    std::int64_t avoid = 0;
    for (double e : entry)
      if (!std::isnan(e) && e > horizon_s + 1e-12) ++avoid;
    rep.cells.push_back(proportion("fraction_avoiding_K", horizon_s, avoid, total));
  }
  rep.criterion = "avoiding fraction nonincreasing in S and below 0.10 at the largest S";
  rep.passed = total > 0 && rep.cells.back().value < 0.10;
  for (std::size_t i = 1; i < rep.cells.size(); ++i)
    if (rep.cells[i].x >= rep.cells[i - 1].x && rep.cells[i].value > rep.cells[i - 1].value) rep.passed = false;
}

inline void run_ba_in_di(const ExperimentConfig& cfg, const NormDescriptor& nu, ExperimentReport& rep) {
  const auto w = cfg.weight_vector();
  std::vector<double> witnesses = cfg.witnesses;
  if (witnesses.empty()) witnesses = {(1.0 + std::sqrt(5.0)) / 2.0, std::sqrt(2.0), 1.0 + std::sqrt(3.0)};
  const double horizon = cfg.times.back();
  DiOptions opts;
  opts.margin_fraction = cfg.margin_fraction;
  opts.enumeration.node_budget = cfg.node_budget;
  opts.jobs = cfg.jobs;
  rep.criterion = "di_diagnostic consistent with DI at the horizon for every witness";
  rep.passed = true;
  for (double x : witnesses) {
    const auto report = di_diagnostic(MatrixA(Matrix::Constant(1, 1, x)), w, nu, cfg.s_start, horizon, cfg.probe_count, opts);
    rep.failed_samples += report.failed_samples;
    const bool ok = report.verdict == Verdict::Consistent;
    rep.passed = rep.passed && ok;
    rep.cells.push_back({"max_lambda1_tail", x, report.statistic, 0.0, ok ? 1 : 0, 1});
  }
}

inline void run_sing_demo(const ExperimentConfig& cfg, const NormDescriptor& nu, ExperimentReport& rep) {
  const auto w = cfg.weight_vector();
  Matrix entries(cfg.m, cfg.n);
  for (int r = 0; r < cfg.m; ++r)
    for (int c = 0; c < cfg.n; ++c) entries(r, c) = cfg.matrix[r * cfg.n + c];
  const MatrixA a(entries);
  const double horizon = cfg.times.back();
  TrajectoryOptions topts;
  topts.probe_radii = default_probe_radii(rep.critical_radius);
  topts.enumeration.node_budget = cfg.node_budget;
  topts.jobs = cfg.jobs;
  auto grid = uniform_grid(0.0, horizon, cfg.step);
  if (grid.back() < horizon - 1e-12) grid.push_back(horizon);
  const auto samples = trajectory(a, w, nu, grid, topts);
  rep.criterion = "orbit leaves K(r) for every probe radius and does not return before the horizon";
  rep.passed = true;
  for (const auto& smp : samples)
    if (!smp.ok()) ++rep.failed_samples;
  for (std::size_t p = 0; p < topts.probe_radii.size(); ++p) {
    // Exit time: first grid s after the last sample still inside K(r).
    double last_in = -1.0;
    for (const auto& smp : samples)
      if (!smp.ok() || smp.admissible_at[p].admissible) last_in = smp.s;
    const bool left = last_in < horizon;
    rep.passed = rep.passed && left;
    double exit = std::numeric_limits<double>::infinity();
    for (const auto& smp : samples) {
      if (smp.s > last_in) {
        exit = smp.s;
        break;
      }
    }
    rep.cells.push_back({"exit_time", topts.probe_radii[p], left ? exit : horizon, 0.0, left ? 1 : 0, 1});
  }
  rep.cells.push_back({"final_lambda1", horizon, samples.back().lambda1, 0.0, 0, 0});
  rep.passed = rep.passed && rep.failed_samples == 0;
}

}  // namespace detail

/// Runs one experiment. Output depends only on the config (and its seed):
/// every sample draws from its own substream and cells are assembled in
/// index order.
inline ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  ExperimentReport rep;
  rep.config = cfg;
  auto nu = parse_norm(cfg.norm, cfg.m + cfg.n);
  const auto radius = critical_radius(nu);
  rep.critical_radius = radius.value;
  nu = nu.with_critical_radius(radius);
  if (cfg.kind != ExperimentKind::BaInDi && cfg.kind != ExperimentKind::SingDemo && !(cfg.radius < rep.critical_radius))
    throw DomainError("experiment: probe radius must be below r_nu");
  switch (cfg.kind) {
    case ExperimentKind::Equidistribution: detail::run_equidistribution(cfg, nu, rep); break;
    case ExperimentKind::DiMeasure: detail::run_di_measure(cfg, nu, rep); break;
    case ExperimentKind::BaInDi: detail::run_ba_in_di(cfg, nu, rep); break;
    case ExperimentKind::SingDemo: detail::run_sing_demo(cfg, nu, rep); break;
  }
  rep.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

enum class ReportFormat { Json, Csv };

namespace detail {

inline std::string shortest(double x) {
  if (x == 0.0) x = 0.0;
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

}  // namespace detail

/// JSON: {config, critical_radius, criterion, passed, failed_samples, cells}.
/// CSV: the config echoed as '#' lines, then label,x,value,stderr,count,total.
/// Runtime is left out unless asked for, so reruns produce identical bytes.
inline void write_report(const ExperimentReport& rep, ReportFormat format, std::ostream& os,
                         bool include_runtime = false) {
  if (format == ReportFormat::Json) {
    nlohmann::json j{{"config", rep.config},
                     {"critical_radius", rep.critical_radius},
                     {"criterion", rep.criterion},
                     {"passed", rep.passed},
                     {"failed_samples", rep.failed_samples},
                     {"cells", nlohmann::json::array()}};
    for (const auto& c : rep.cells)
      j["cells"].push_back({{"label", c.label}, {"x", c.x}, {"value", c.value}, {"stderr", c.stderr_value},
                            {"count", c.count}, {"total", c.total}});
    if (include_runtime) j["runtime_seconds"] = rep.runtime_seconds;
    os << j.dump(2) << '\n';
  } else {
    nlohmann::json cfg = rep.config;
    os << "# config " << cfg.dump() << '\n';
    os << "# critical_radius " << detail::shortest(rep.critical_radius) << '\n';
    os << "# criterion " << rep.criterion << '\n';
    os << "# passed " << (rep.passed ? "true" : "false") << '\n';
    os << "# failed_samples " << rep.failed_samples << '\n';
    if (include_runtime) os << "# runtime_seconds " << detail::shortest(rep.runtime_seconds) << '\n';
    os << "label,x,value,stderr,count,total\n";
    for (const auto& c : rep.cells)
      os << c.label << ',' << detail::shortest(c.x) << ',' << detail::shortest(c.value) << ','
         << detail::shortest(c.stderr_value) << ',' << c.count << ',' << c.total << '\n';
  }
  if (!os) throw std::runtime_error("write_report: output stream failed");
}

inline void write_report(const ExperimentReport& rep, ReportFormat format, const std::string& path,
                         bool include_runtime = false) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_report: cannot open '" + path + "'");
  write_report(rep, format, out, include_runtime);
}

inline ExperimentReport read_report_json(const nlohmann::json& j) {
  ExperimentReport rep;
  rep.config = experiment_config_from_json(j.at("config"));
  rep.critical_radius = j.at("critical_radius").get<double>();
  rep.criterion = j.at("criterion").get<std::string>();
  rep.passed = j.at("passed").get<bool>();
  rep.failed_samples = j.at("failed_samples").get<std::int64_t>();
  rep.runtime_seconds = j.value("runtime_seconds", 0.0);
  for (const auto& c : j.at("cells"))
    rep.cells.push_back({c.at("label").get<std::string>(), c.at("x").get<double>(), c.at("value").get<double>(),
                         c.at("stderr").get<double>(), c.at("count").get<std::int64_t>(),
                         c.at("total").get<std::int64_t>()});
  return rep;
}

}  // namespace dlab

#endif  // DIRICHLET_LAB_EXPERIMENTS_HPP
