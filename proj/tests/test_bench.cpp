// Copyright The rom2l Authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "rom2l/bench.hpp"
#include "rom2l/errors.hpp"

using namespace rom2l;
using namespace rom2l::bench;

namespace
{

const pod::OfflineData &small_offline()
{
  static const pod::OfflineData data =
      pod::build_offline(BurgersProblem{}, pod::QGrid{-4.0, 4.0, 0.05}, 1.0 / 16.0,
                         pod::InnerProduct::MassWeighted, 1e-10);
  return data;
}

ExperimentConfig small_config()
{
  ExperimentConfig cfg;
  cfg.q_grid = pod::QGrid{-2.0, 2.0, 1.0};
  cfg.h = 1.0 / 16.0;
  cfg.reps = 2;
  cfg.threads = 2;
  return cfg;
}

int count_lines(const std::string &s)
{
  return static_cast<int>(std::count(s.begin(), s.end(), '\n'));
}

}  // namespace

TEST_CASE("empty experiment renders a header only")
{
  ExperimentConfig cfg = small_config();
  const ExperimentReport report = run_experiment(cfg, small_offline());
  CHECK(report.rows.empty());
  const std::string csv = render_report(report, ReportFormat::Csv);
  CHECK(count_lines(csv) == 1);
  CHECK(csv.rfind("guess,r,R1,R2,err_2L,time_2L_s,err_1L,time_1L_s,error_ratio,speedup", 0) == 0);
}

TEST_CASE("one triple, one guess")
{
  ExperimentConfig cfg = small_config();
  cfg.triples = {Triple{4, 8, 8}};
  cfg.guesses = {GuessKind::AVG};
  const ExperimentReport report = run_experiment(cfg, small_offline());
  REQUIRE(report.rows.size() == 1);
  const ReportRow &row = report.rows.front();
  CHECK(row.n_q == 5);
  CHECK(row.n_failures == 0);
  CHECK(report.records.size() == 5);
  CHECK(row.error_ratio == doctest::Approx(row.err_2L / row.err_1L));
  CHECK(row.speedup == doctest::Approx(row.time_1L / row.time_2L));
  CHECK(row.time_1L > 0.0);
  CHECK(row.time_2L > 0.0);
  CHECK(count_lines(render_report(report, ReportFormat::Csv)) == 2);

  double mean_err = 0.0;
  for (const QRecord &rec : report.records)
  {
    mean_err += rec.err_1L;
  }
  CHECK(row.err_1L == doctest::Approx(mean_err / 5.0));
  CHECK(report.environment.reps == 2);
  CHECK(report.environment.basis_dim == small_offline().basis.dim());
}

TEST_CASE("degenerate triple reproduces the one-level error")
{
  ExperimentConfig cfg = small_config();
  cfg.triples = {Triple{8, 8, 8}};
  cfg.guesses = {GuessKind::AVG};
  CHECK_THROWS_AS(run_experiment(cfg, small_offline()), UsageError);
  cfg.allow_degenerate = true;
  const ExperimentReport report = run_experiment(cfg, small_offline());
  REQUIRE(report.rows.size() == 1);
  CHECK(report.rows[0].err_2L == doctest::Approx(report.rows[0].err_1L).epsilon(1e-8));
}

TEST_CASE("config validation")
{
  ExperimentConfig cfg = small_config();
  cfg.triples = {Triple{4, 8, 8}};
  CHECK_NOTHROW(cfg.validate(10));
  CHECK_THROWS_AS(cfg.validate(7), UsageError);
  cfg.triples = {Triple{9, 8, 8}};
  CHECK_THROWS_AS(cfg.validate(10), UsageError);
  cfg.triples = {Triple{0, 8, 8}};
  CHECK_THROWS_AS(cfg.validate(10), UsageError);
  cfg.triples = {Triple{4, 8, 8}};
  cfg.reps = 0;
  CHECK_THROWS_AS(cfg.validate(10), UsageError);
}

TEST_CASE("summaries do not depend on record order and skip failures")
{
  std::vector<QRecord> records;
  std::mt19937 gen(9);
  std::uniform_real_distribution<double> dist(0.1, 1.0);
  const std::vector<Triple> triples = {Triple{2, 4, 4}, Triple{3, 5, 6}};
  const std::vector<GuessKind> guesses = {GuessKind::UG, GuessKind::AVG};
  for (int i = 0; i < 7; ++i)
  {
    for (const Triple &t : triples)
    {
      for (GuessKind g : guesses)
      {
        QRecord r;
        r.q = -1.0 + 0.3 * i;
        r.triple = t;
        r.guess = g;
        r.ok = true;
        r.err_1L = dist(gen);
        r.err_2L = dist(gen);
        r.time_1L = dist(gen);
        r.time_2L = dist(gen);
        records.push_back(r);
      }
    }
  }
  records[3].ok = false;
  records[3].failure = "synthetic";
  records[3].err_1L = 1e9;

  const auto rows = summarize(records, triples, guesses);
  std::shuffle(records.begin(), records.end(), gen);
  const auto shuffled = summarize(records, triples, guesses);
  REQUIRE(rows.size() == 4);
  REQUIRE(shuffled.size() == 4);
  int failures = 0;
  for (std::size_t i = 0; i < rows.size(); ++i)
  {
    CHECK(rows[i].triple == shuffled[i].triple);
    CHECK(rows[i].guess == shuffled[i].guess);
    CHECK(rows[i].err_1L == shuffled[i].err_1L);
    CHECK(rows[i].time_2L == shuffled[i].time_2L);
    CHECK(rows[i].err_1L < 1.0);
    failures += rows[i].n_failures;
  }
  CHECK(failures == 1);
}

TEST_CASE("json round trip")
{
  ExperimentConfig cfg = small_config();
  cfg.triples = {Triple{3, 6, 7}, Triple{4, 8, 8}};
  cfg.guesses = {GuessKind::UG, GuessKind::IG};
  const ExperimentReport report = run_experiment(cfg, small_offline());
  const ExperimentReport back = parse_report_json(render_report(report, ReportFormat::Json));
  REQUIRE(back.rows.size() == report.rows.size());
  REQUIRE(back.records.size() == report.records.size());
  for (std::size_t i = 0; i < report.rows.size(); ++i)
  {
    CHECK(back.rows[i].triple == report.rows[i].triple);
    CHECK(back.rows[i].guess == report.rows[i].guess);
    CHECK(back.rows[i].err_2L == report.rows[i].err_2L);
    CHECK(back.rows[i].speedup == report.rows[i].speedup);
    CHECK(back.rows[i].n_failures == report.rows[i].n_failures);
  }
  CHECK(back.environment.reps == report.environment.reps);
  CHECK(back.environment.compiler == report.environment.compiler);
  CHECK_THROWS(parse_report_json("{not json"));

  const std::string md = render_report(report, ReportFormat::Markdown);
  CHECK(md.find("(r,R2) = (3,7), R1 = 6") != std::string::npos);
  CHECK(md.find("u_ug") != std::string::npos);
  CHECK(format_from_string("md") == ReportFormat::Markdown);
  CHECK_THROWS_AS(format_from_string("xml"), UsageError);
}
