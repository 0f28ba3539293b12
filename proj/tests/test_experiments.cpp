#include "dirichlet_lab/experiments.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

using namespace dlab;

namespace {

ExperimentConfig config(ExperimentKind kind) {
  ExperimentConfig c;
  c.kind = kind;
  c.seed = 5;
  c.samples = 200;
  return c;
}

std::string render(const ExperimentReport& rep, ReportFormat format) {
  std::ostringstream os;
  write_report(rep, format, os);
  return os.str();
}

}  // namespace

TEST(Experiments, ConfigFromJson) {
  const auto c = experiment_config_from_json({{"kind", "di_measure"}, {"seed", 3}, {"times", {4, 8}}, {"radius", 0.95}});
  EXPECT_EQ(c.kind, ExperimentKind::DiMeasure);
  EXPECT_EQ(c.seed, 3u);
  EXPECT_EQ(c.times, (std::vector<double>{4, 8}));
  EXPECT_THROW(experiment_config_from_json({{"kind", "di_measure"}}), InputError);
  EXPECT_THROW(experiment_config_from_json({{"seed", 1}}), InputError);
  EXPECT_THROW(experiment_config_from_json({{"kind", "nope"}, {"seed", 1}}), InputError);
  EXPECT_THROW(experiment_config_from_json({{"kind", "equidistribution"}, {"seed", 1}, {"samples", 10}}), InputError);
  EXPECT_THROW(experiment_config_from_json({{"kind", "equidistribution"}, {"seed", 1}, {"m", "x"}}), InputError);
}

TEST(Experiments, RadiusMustBeBelowCriticalRadius) {
  auto c = config(ExperimentKind::Equidistribution);
  c.radius = 1.0;
  EXPECT_THROW(run_experiment(c), DomainError);
}

TEST(Experiments, BinomialStderr) {
  EXPECT_DOUBLE_EQ(binomial_stderr(25, 100), std::sqrt(0.25 * 0.75 / 100));
  EXPECT_DOUBLE_EQ(binomial_stderr(0, 0), 0.0);
}

TEST(Experiments, EquidistributionCells) {
  const auto rep = run_experiment(config(ExperimentKind::Equidistribution));
  ASSERT_EQ(rep.cells.size(), 3u);
  for (const auto& cell : rep.cells) {
    EXPECT_EQ(cell.total, 200);
    EXPECT_DOUBLE_EQ(cell.value, static_cast<double>(cell.count) / 200.0);
    EXPECT_DOUBLE_EQ(cell.stderr_value, binomial_stderr(cell.count, cell.total));
  }
}

TEST(Experiments, DiMeasureNonincreasing) {
  auto c = config(ExperimentKind::DiMeasure);
  c.radius = 0.95;
  c.times = {4, 8, 12};
  const auto rep = run_experiment(c);
  ASSERT_EQ(rep.cells.size(), 3u);
  EXPECT_GE(rep.cells[0].value, rep.cells[1].value);
  EXPECT_GE(rep.cells[1].value, rep.cells[2].value);
}

TEST(Experiments, BaInDiDefaultsToThreeWitnesses) {
  const auto rep = run_experiment(config(ExperimentKind::BaInDi));
  EXPECT_EQ(rep.cells.size(), 3u);
  EXPECT_TRUE(rep.passed);
}

TEST(Experiments, SingDemoRationalLeavesEveryProbe) {
  auto c = config(ExperimentKind::SingDemo);
  c.times = {std::log(2000.0)};
  const auto rep = run_experiment(c);
  EXPECT_TRUE(rep.passed);
  const auto& last = rep.cells.back();
  EXPECT_EQ(last.label, "final_lambda1");
  EXPECT_NEAR(last.value, 2.0 / 2000.0, 1e-15);
}

// [PROPERTY] Same config and seed, same bytes; different seed, different cells.
TEST(Experiments, Deterministic) {
  auto c = config(ExperimentKind::Equidistribution);
  const auto a = render(run_experiment(c), ReportFormat::Json);
  c.jobs = 3;
  const auto b = run_experiment(c);
  c.jobs = 1;
  EXPECT_EQ(a, render(run_experiment(c), ReportFormat::Json));
  EXPECT_EQ(run_experiment(c).cells, b.cells);
  c.seed = 6;
  EXPECT_NE(run_experiment(c).cells, b.cells);
}

TEST(Experiments, JsonRoundTrip) {
  const auto rep = run_experiment(config(ExperimentKind::Equidistribution));
  const auto back = read_report_json(nlohmann::json::parse(render(rep, ReportFormat::Json)));
  EXPECT_EQ(back.cells, rep.cells);
  EXPECT_EQ(back.passed, rep.passed);
  EXPECT_EQ(back.criterion, rep.criterion);
  EXPECT_EQ(back.config.seed, rep.config.seed);
  EXPECT_EQ(back.critical_radius, rep.critical_radius);
}

TEST(Experiments, CsvSchema) {
  const auto rep = run_experiment(config(ExperimentKind::Equidistribution));
  std::istringstream in(render(rep, ReportFormat::Csv));
  std::string line;
  int comments = 0, rows = 0;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.rfind("#", 0) == 0) ++comments;
    else if (line == "label,x,value,stderr,count,total") header = true;
    else ++rows;
  }
  EXPECT_GE(comments, 1);
  EXPECT_TRUE(header);
  EXPECT_EQ(rows, 3);
}

TEST(Experiments, EmptyReportStillEchoesConfig) {
  ExperimentReport rep;
  rep.config = config(ExperimentKind::Equidistribution);
  const auto csv = render(rep, ReportFormat::Csv);
  EXPECT_NE(csv.find("# config {"), std::string::npos);
  EXPECT_NE(csv.find("label,x,value,stderr,count,total\n"), std::string::npos);
  const auto j = nlohmann::json::parse(render(rep, ReportFormat::Json));
  EXPECT_TRUE(j["cells"].empty());
  EXPECT_EQ(j["config"]["seed"], 5);
}

TEST(Experiments, RuntimeOnlyWhenRequested) {
  const auto rep = run_experiment(config(ExperimentKind::BaInDi));
  EXPECT_EQ(render(rep, ReportFormat::Json).find("runtime"), std::string::npos);
  std::ostringstream os;
  write_report(rep, ReportFormat::Json, os, true);
  EXPECT_NE(os.str().find("runtime_seconds"), std::string::npos);
}
