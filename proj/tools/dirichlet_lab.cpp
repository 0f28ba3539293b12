// dirichlet_lab: command-line front end for the lattice / Dirichlet toolkit.
//
// Exit codes: 0 ok, 1 domain error, 2 enumeration budget exceeded, 64 usage.

#include "dirichlet_lab.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace dlab;
using nlohmann::json;

constexpr int kExitDomain = 1;
constexpr int kExitBudget = 2;
constexpr int kExitUsage = 64;

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

double to_double(const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (s.find_first_not_of(" \t", used) != std::string::npos) throw InputError("");
    return v;
  } catch (const std::exception&) {
    throw InputError("not a number: '" + s + "'");
  }
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& s : split(text, ',')) out.push_back(to_double(s));
  return out;
}

std::string shortest(double x) {
  if (x == 0.0) x = 0.0;  // no "-0"
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

// --A: a JSON file ({"entries": [[...], ...]} or a bare array of rows) or an
// inline row-major matrix, rows separated by ';' and entries by ','.
MatrixA parse_matrix(const std::string& text, int m, int n) {
  std::vector<std::vector<double>> rows;
  if (std::filesystem::is_regular_file(text)) {
    std::ifstream in(text);
    json j;
    try {
      j = json::parse(in);
      rows = (j.is_object() ? j.at("entries") : j).get<std::vector<std::vector<double>>>();
    } catch (const json::exception& e) {
      throw InputError("cannot read matrix file '" + text + "': " + e.what());
    }
  } else {
    for (const auto& r : split(text, ';')) rows.push_back(parse_list(r));
  }
  if (rows.empty() || rows.front().empty()) throw InputError("empty matrix");
  const auto rm = static_cast<int>(rows.size());
  const auto rn = static_cast<int>(rows.front().size());
  // A single list with explicit m, n is read row-major.
  if (rm == 1 && m > 0 && n > 0 && rn == m * n && m != 1) {
    std::vector<std::vector<double>> reshaped(m, std::vector<double>(n));
    for (int r = 0; r < m; ++r)
      for (int c = 0; c < n; ++c) reshaped[r][c] = rows[0][r * n + c];
    rows = std::move(reshaped);
  }
  if ((m > 0 && static_cast<int>(rows.size()) != m) || (n > 0 && static_cast<int>(rows.front().size()) != n))
    throw InputError("matrix shape does not match --m/--n");
  Matrix a(rows.size(), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != rows.front().size()) throw InputError("ragged matrix rows");
    for (std::size_t c = 0; c < rows[r].size(); ++c) a(r, c) = rows[r][c];
  }
  return MatrixA(a);
}

WeightVector parse_weights(const std::string& text, int m, int n) {
  if (text.empty()) return WeightVector::unweighted(m, n);
  const auto flat = parse_list(text);
  if (static_cast<int>(flat.size()) != m + n) throw InputError("--weights needs m + n entries");
  return WeightVector::from_flat(flat, m);
}

// lo:hi:step
std::vector<double> parse_s_grid(const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.size() != 3) throw InputError("--s expects lo:hi:step");
  return uniform_grid(to_double(parts[0]), to_double(parts[1]), to_double(parts[2]));
}

// geom:lo:hi:count, or a comma-separated list.
std::vector<double> parse_t_grid(const std::string& text) {
  if (text.rfind("geom:", 0) == 0) {
    const auto parts = split(text.substr(5), ':');
    if (parts.size() != 3) throw InputError("--tgrid expects geom:lo:hi:count");
    return geometric_grid(to_double(parts[0]), to_double(parts[1]), static_cast<int>(to_double(parts[2])));
  }
  return parse_list(text);
}

std::uint64_t node_budget() {
  if (const char* env = std::getenv("DIRICHLET_LAB_BUDGET")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw InputError("DIRICHLET_LAB_BUDGET is not an integer");
    }
  }
  return kDefaultNodeBudget;
}

void log_config(const std::string& command, const json& config) {
  std::cerr << "dirichlet_lab " << command << " config " << config.dump() << '\n';
}

class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_.open(path, std::ios::binary);
      if (!file_) throw std::runtime_error("cannot open '" + path + "'");
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

struct Common {
  std::string a;
  int m = 0;
  int n = 0;
  std::string weights;
  std::string norm = "sup";
  std::string out;
};

void add_problem_options(CLI::App* sub, Common& c, bool with_norm = true) {
  sub->add_option("--A", c.a, "matrix: inline 'a,b;c,d' (row-major) or JSON file")->required();
  sub->add_option("--m", c.m, "rows of A (inferred when omitted)");
  sub->add_option("--n", c.n, "columns of A (inferred when omitted)");
  sub->add_option("--weights", c.weights, "alpha_1..alpha_m,beta_1..beta_n (default unweighted)");
  if (with_norm) sub->add_option("--norm", c.norm, "sup | euclid | lp:<p> | cyl | cyl:<eta>");
  sub->add_option("--out", c.out, "output file (default stdout)");
}

int run_trajectory(const Common& c, const std::string& s_text, const std::string& probes, int jobs) {
  const MatrixA a = parse_matrix(c.a, c.m, c.n);
  const auto w = parse_weights(c.weights, a.m(), a.n());
  auto nu = parse_norm(c.norm, a.d());
  nu = nu.with_critical_radius(critical_radius(nu));
  TrajectoryOptions opts;
  if (!probes.empty()) opts.probe_radii = parse_list(probes);
  else opts.probe_radii = default_probe_radii(critical_radius(nu).value);
  opts.enumeration.node_budget = node_budget();
  opts.jobs = jobs;
  const auto grid = parse_s_grid(s_text);
  log_config("trajectory", {{"A", a.entries().reshaped<Eigen::RowMajor>()}, {"m", a.m()}, {"n", a.n()}, {"weights", w},
                            {"norm", nu}, {"s", s_text}, {"probe_radii", opts.probe_radii},
                            {"node_budget", opts.enumeration.node_budget}, {"jobs", jobs}});
  const auto samples = trajectory(a, w, nu, grid, opts);

  Output out(c.out);
  auto& os = out.stream();
  const int d = a.d();
  os << "s,lambda1,status";
  for (int i = 1; i <= d; ++i) os << ",coeff_" << i;
  for (int i = 1; i <= d; ++i) os << ",vec_" << i;
  for (double r : opts.probe_radii) os << ",adm_" << shortest(r);
  os << '\n';
  bool failed = false;
  for (const auto& smp : samples) {
    os << shortest(smp.s);
    if (!smp.ok()) {
      failed = true;
      os << ",,failed";
      for (int i = 0; i < 2 * d + static_cast<int>(opts.probe_radii.size()); ++i) os << ',';
      os << '\n';
      continue;
    }
    os << ',' << shortest(smp.lambda1) << ",ok";
    for (auto x : smp.witness.coeffs) os << ',' << x;
    for (int i = 0; i < d; ++i) os << ',' << shortest(smp.witness.point[i]);
    for (const auto& f : smp.admissible_at) os << ',' << (f.admissible ? 1 : 0);
    os << '\n';
  }
  return failed ? kExitBudget : 0;
}

int run_dirichlet(const Common& c, const std::string& psi_text, const std::string& tgrid, int jobs) {
  const MatrixA a = parse_matrix(c.a, c.m, c.n);
  const auto w = parse_weights(c.weights, a.m(), a.n());
  const auto psi = PsiFunction::parse(psi_text);
  auto nu = parse_norm(c.norm, a.d());
  nu = nu.with_critical_radius(critical_radius(nu));
  DirichletOptions opts;
  opts.enumeration.node_budget = node_budget();
  opts.jobs = jobs;
  const auto grid = parse_t_grid(tgrid);
  log_config("dirichlet", {{"A", a.entries().reshaped<Eigen::RowMajor>()}, {"m", a.m()}, {"n", a.n()}, {"weights", w},
                           {"norm", nu}, {"psi", psi.name()}, {"tgrid", tgrid},
                           {"node_budget", opts.enumeration.node_budget}, {"jobs", jobs}});
  const auto verdict = scan_dirichlet(a, psi, w, nu, grid, opts);
  Output out(c.out);
  bool failed = false;
  for (const auto& e : verdict.entries) {
    failed = failed || e.error.has_value();
    out.stream() << json(e).dump() << '\n';
  }
  std::cerr << "summary " << verdict.summary() << '\n';
  return failed ? kExitBudget : 0;
}

int run_ba_score(const Common& c, double q_bound, double tail) {
  const MatrixA a = parse_matrix(c.a, c.m, c.n);
  const auto w = parse_weights(c.weights, a.m(), a.n());
  BaScoreOptions opts;
  opts.budget = node_budget();
  if (tail >= 0.0) opts.tail_start = tail;
  log_config("ba-score", {{"A", a.entries().reshaped<Eigen::RowMajor>()}, {"m", a.m()}, {"n", a.n()}, {"weights", w},
                          {"Q", q_bound}, {"tail_start", std::isnan(opts.tail_start) ? std::sqrt(q_bound) : opts.tail_start},
                          {"budget", opts.budget}});
  const auto score = ba_score(a, w, q_bound, opts);
  Output out(c.out);
  out.stream() << json{{"Q", q_bound}, {"score", score.value}, {"q", score.q}, {"p", score.p}}.dump() << '\n';
  return 0;
}

struct LocusArgs {
  std::string kind = "hajos_sup";
  int d = 2;
  std::string perm;
  std::uint64_t seed = 0;
  int count = 1;
  int m = 0;
  std::string weights;
  std::string out;
};

int run_locus(const LocusArgs& args) {
  LocusDescriptor desc;
  desc.kind = parse_locus_kind(args.kind);
  desc.d = desc.kind == LocusKind::HajosSup ? args.d : (desc.kind == LocusKind::HexagonalEuclid2 ? 2 : 3);
  if (desc.kind == LocusKind::HajosSup) {
    if (args.perm.empty()) {
      desc.permutation.resize(desc.d);
      std::iota(desc.permutation.begin(), desc.permutation.end(), 0);
    } else {
      for (double x : parse_list(args.perm)) desc.permutation.push_back(static_cast<int>(x));
    }
  }
  desc.validate();
  const int m = args.m > 0 ? args.m : (desc.kind == LocusKind::HajosSup ? 1 : 2);
  if (m >= desc.d) throw InputError("--m must be below the dimension");
  const auto w = parse_weights(args.weights, m, desc.d - m);
  auto nu = desc.norm();
  nu = nu.with_critical_radius(critical_radius(nu, EstimateOptions{args.seed}));
  EnumerationOptions eopts{node_budget()};
  log_config("locus", {{"descriptor", desc}, {"seed", args.seed}, {"count", args.count}, {"weights", w}, {"norm", nu}});
  Output out(args.out);
  for (int k = 0; k < args.count; ++k) {
    const std::uint64_t seed = args.seed + static_cast<std::uint64_t>(k);
    const Lattice lattice = sample_locus(desc, seed);
    json j = locus_sample_json(desc, seed, lattice);
    j["lambda1"] = first_minimum(lattice, nu, eopts).value;
    j["member"] = locus_membership(lattice, nu, eopts);
    if (desc.kind != LocusKind::HexagonalEuclid2) j["direction"] = to_string(divergence_direction(lattice, w, desc));
    out.stream() << j.dump() << '\n';
  }
  return 0;
}

int run_experiment_cmd(const std::string& config_path, std::optional<std::uint64_t> seed, int samples,
                       const std::string& format, const std::string& out_path, int jobs, bool runtime) {
  std::ifstream in(config_path);
  if (!in) throw InputError("cannot open config '" + config_path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw InputError(std::string("bad config JSON: ") + e.what());
  }
  if (seed) j["seed"] = *seed;
  if (samples > 0) j["samples"] = samples;
  if (jobs > 0) j["jobs"] = jobs;
  if (!out_path.empty()) j["output"] = out_path;
  if (std::getenv("DIRICHLET_LAB_BUDGET")) j["node_budget"] = node_budget();
  const auto cfg = experiment_config_from_json(j);
  log_config("experiment", cfg);
  const auto report = run_experiment(cfg);
  const auto fmt = format == "csv" ? ReportFormat::Csv : ReportFormat::Json;
  if (cfg.output.empty() || cfg.output == "-") write_report(report, fmt, std::cout, runtime);
  else write_report(report, fmt, cfg.output, runtime);
  std::cerr << "result " << (report.passed ? "pass" : "fail") << " (" << report.criterion << ")\n";
  return 0;
}

int run_critical_radius(const std::string& norm_text, int d, std::optional<std::uint64_t> seed, int iterations) {
  const auto nu = parse_norm(norm_text, d);
  if (exact_critical_radius(nu)) {
    log_config("critical-radius", {{"norm", nu}});
  } else {
    if (!seed) throw InputError("estimate mode is randomized: --seed is required");
    log_config("critical-radius", {{"norm", nu}, {"seed", *seed}, {"iterations", iterations}});
  }
  EstimateOptions opts;
  if (seed) opts.seed = *seed;
  opts.iterations = iterations;
  opts.enumeration.node_budget = node_budget();
  const auto r = critical_radius(nu, opts);
  std::cout << std::setprecision(12) << r.value << ' ' << to_string(r.status) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lattice first minima, diagonal flows and Dirichlet-improvability diagnostics"};
  app.require_subcommand(1);
  int jobs = 1;
  app.add_option("--jobs", jobs, "worker threads for parallel subcommands")->check(CLI::PositiveNumber);

  Common traj;
  std::string s_text = "0:12:0.25";
  std::string probes;
  auto* t = app.add_subcommand("trajectory", "lambda_1 along the orbit a_s Lambda_A (CSV)");
  add_problem_options(t, traj);
  t->add_option("--s", s_text, "grid lo:hi:step");
  t->add_option("--probe", probes, "probe radii, comma separated (default 0.5..0.99 r_nu)");

  Common dir;
  std::string psi_text = "c/t:1";
  std::string tgrid = "geom:2:1000:64";
  auto* dcmd = app.add_subcommand("dirichlet", "Dirichlet solvability scan over t (JSONL)");
  add_problem_options(dcmd, dir);
  dcmd->add_option("--psi", psi_text, "c/t:<c> | table:t1=v1,t2=v2,...");
  dcmd->add_option("--tgrid", tgrid, "geom:lo:hi:count or a comma-separated list");

  Common ba;
  double q_bound = 1e5;
  double tail = -1.0;
  auto* bcmd = app.add_subcommand("ba-score", "min |Aq - p|_alpha |q|_beta over tail_start <= |q|_beta <= Q");
  add_problem_options(bcmd, ba, false);
  bcmd->add_option("--Q", q_bound, "height bound");
  bcmd->add_option("--tail", tail, "lower end of the height window (default sqrt(Q))");

  LocusArgs locus;
  auto* lcmd = app.add_subcommand("locus", "sample critical-locus lattices (JSONL)");
  lcmd->add_option("--kind", locus.kind, "hajos_sup | cylindrical_z1 | cylindrical_z2 | hexagonal_euclid2");
  lcmd->add_option("--d", locus.d, "dimension (hajos_sup)");
  lcmd->add_option("--perm", locus.perm, "permutation as 0-based images, e.g. 1,0");
  lcmd->add_option("--seed", locus.seed, "seed of the first sample")->required();
  lcmd->add_option("--count", locus.count, "number of samples")->check(CLI::PositiveNumber);
  lcmd->add_option("--m", locus.m, "split d = m + n for the divergence direction");
  lcmd->add_option("--weights", locus.weights, "alpha,beta for the flow (default unweighted)");
  lcmd->add_option("--out", locus.out, "output file (default stdout)");

  std::string config_path;
  std::optional<std::uint64_t> exp_seed;
  int samples = 0;
  std::string format = "json";
  std::string exp_out;
  bool runtime = false;
  auto* ecmd = app.add_subcommand("experiment", "run a Monte Carlo / diagnostic experiment from a JSON config");
  ecmd->add_option("--config", config_path, "config file")->required();
  ecmd->add_option("--seed", exp_seed, "overrides the config seed");
  ecmd->add_option("--samples", samples, "overrides the sample count");
  ecmd->add_option("--format", format, "json | csv")->check(CLI::IsMember({"json", "csv"}));
  ecmd->add_option("--out", exp_out, "report path (default stdout)");
  ecmd->add_flag("--runtime", runtime, "include wall-clock runtime in the report");

  std::string cr_norm = "euclid";
  int cr_d = 2;
  std::optional<std::uint64_t> cr_seed;
  int iterations = EstimateOptions{}.iterations;
  auto* ccmd = app.add_subcommand("critical-radius", "r_nu: exact where known, else a certified lower bound");
  ccmd->add_option("--norm", cr_norm, "norm");
  ccmd->add_option("--d", cr_d, "dimension");
  ccmd->add_option("--seed", cr_seed, "seed (required for estimate mode)");
  ccmd->add_option("--iterations", iterations, "hill-climb iterations per restart");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*t) return run_trajectory(traj, s_text, probes, jobs);
    if (*dcmd) return run_dirichlet(dir, psi_text, tgrid, jobs);
    if (*bcmd) return run_ba_score(ba, q_bound, tail);
    if (*lcmd) return run_locus(locus);
    if (*ecmd) return run_experiment_cmd(config_path, exp_seed, samples, format, exp_out, jobs, runtime);
    if (*ccmd) return run_critical_radius(cr_norm, cr_d, cr_seed, iterations);
  } catch (const BudgetExceeded& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitBudget;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitDomain;
  }
  return kExitUsage;
}
