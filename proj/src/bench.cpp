// Copyright The rom2l Authors
// SPDX-License-Identifier: Apache-2.0

#include "rom2l/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "rom2l/errors.hpp"
#include "rom2l/rom.hpp"

namespace rom2l::bench
{

using json = nlohmann::json;

std::string to_string(const Triple &t)
{
  std::ostringstream os;
  os << '(' << t.r << ',' << t.R1 << ',' << t.R2 << ')';
  return os.str();
}

void ExperimentConfig::validate(Index ell) const
{
  if (reps < 1)
  {
    throw UsageError("reps must be at least 1");
  }
  for (const Triple &t : triples)
  {
    const bool order_ok = allow_degenerate ? t.r <= t.R2 : t.r < t.R2;
    if (t.r < 1 || !order_ok || t.R2 > ell || t.R1 < 1 || t.R1 > ell)
    {
      std::ostringstream msg;
      msg << "invalid triple " << to_string(t) << ": need r < R2 <= " << ell
          << " and R1 <= " << ell;
      throw UsageError(msg.str());
    }
    for (GuessKind g : guesses)
    {
      if (g != GuessKind::AVG && t.r < 2)
      {
        throw UsageError("guesses ug/ig need r >= 2");
      }
    }
  }
}

int ExperimentReport::n_failures() const
{
  return static_cast<int>(std::count_if(records.begin(), records.end(),
                                        [](const QRecord &r) { return !r.ok; }));
}

unsigned sweep_threads()
{
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char *env = std::getenv("ROM2L_THREADS"))
  {
    char *end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0)
    {
      n = static_cast<unsigned>(v);
    }
  }
  return n;
}

namespace
{

using Clock = std::chrono::steady_clock;

// Keeps timed solves observable.
volatile double g_timing_sink = 0.0;

// Online stage for one parameter value; shared by the error and timing passes
// so both measure exactly the same work.
struct OnlineRunner
{
  const rom::RomAssembler &assembler;
  const solvers::NewtonConfig &newton;

  solvers::SolveOutcome one_level(Index R1, double q, GuessKind g) const
  {
    rom::RomOperators ops(assembler.fixed(R1), assembler.load_vector(R1, q),
                          rom::RomMeta{assembler.problem().nu, q, assembler.fingerprint()});
    return solvers::one_level_solve(ops, g, newton);
  }

  std::pair<solvers::SolveOutcome, solvers::SolveOutcome> two_level(Index r, Index R2, double q,
                                                                    GuessKind g) const
  {
    const rom::RomMeta meta{assembler.problem().nu, q, assembler.fingerprint()};
    Eigen::VectorXd b = assembler.load_vector(R2, q);
    rom::RomOperators coarse(assembler.fixed(r), b.head(r), meta);
    rom::RomOperators fine(assembler.fixed(R2), std::move(b), meta);
    return solvers::two_level_solve(coarse, fine, g, newton);
  }
};

double sorted_mean(std::vector<std::pair<double, double>> keyed)
{
  if (keyed.empty())
  {
    return std::numeric_limits<double>::quiet_NaN();
  }
  std::sort(keyed.begin(), keyed.end());
  double sum = 0.0;
  for (const auto &kv : keyed)
  {
    sum += kv.second;
  }
  return sum / static_cast<double>(keyed.size());
}

}  // namespace

std::vector<ReportRow> summarize(const std::vector<QRecord> &records,
                                 const std::vector<Triple> &triples,
                                 const std::vector<GuessKind> &guesses)
{
  std::vector<ReportRow> rows;
  for (const Triple &t : triples)
  {
    for (GuessKind g : guesses)
    {
      ReportRow row;
      row.triple = t;
      row.guess = g;
      // Keyed by q so the averages do not depend on record order.
      std::vector<std::pair<double, double>> e1, e2, t1, t2, i1, ic;
      for (const QRecord &rec : records)
      {
        if (!(rec.triple == t) || rec.guess != g)
        {
          continue;
        }
        ++row.n_q;
        if (!rec.ok)
        {
          ++row.n_failures;
          continue;
        }
        e1.emplace_back(rec.q, rec.err_1L);
        e2.emplace_back(rec.q, rec.err_2L);
        t1.emplace_back(rec.q, rec.time_1L);
        t2.emplace_back(rec.q, rec.time_2L);
        i1.emplace_back(rec.q, rec.iterations_1L);
        ic.emplace_back(rec.q, rec.iterations_coarse);
      }
      row.err_1L = sorted_mean(std::move(e1));
      row.err_2L = sorted_mean(std::move(e2));
      row.time_1L = sorted_mean(std::move(t1));
      row.time_2L = sorted_mean(std::move(t2));
      row.mean_iterations_1L = sorted_mean(std::move(i1));
      row.mean_iterations_coarse = sorted_mean(std::move(ic));
      row.error_ratio = row.err_2L / row.err_1L;
      row.speedup = row.time_1L / row.time_2L;
      rows.push_back(row);
    }
  }
  return rows;
}

ExperimentReport run_experiment(const ExperimentConfig &cfg, const pod::OfflineData &offline)
{
  const pod::PodBasis &basis = offline.basis;
  cfg.validate(basis.dim());
  cfg.newton.validate();

  Index max_dim = 1;
  for (const Triple &t : cfg.triples)
  {
    max_dim = std::max({max_dim, t.R1, t.R2});
  }
  const rom::RomAssembler assembler(basis, offline.problem, max_dim);
  const OnlineRunner runner{assembler, cfg.newton};
  const auto q_values = cfg.q_grid.values();

  ExperimentReport report;
  for (double q : q_values)
  {
    for (const Triple &t : cfg.triples)
    {
      for (GuessKind g : cfg.guesses)
      {
        QRecord rec;
        rec.q = q;
        rec.triple = t;
        rec.guess = g;
        report.records.push_back(rec);
      }
    }
  }

  // Error pass.
  auto solve_record = [&](QRecord &rec) {
    const BurgersProblem pq = offline.problem.with_q(rec.q);
    const auto exact = [&pq](double x) { return exact_u(pq, x); };
    try
    {
      const auto one = runner.one_level(rec.triple.R1, rec.q, rec.guess);
      const auto [coarse, fine] = runner.two_level(rec.triple.r, rec.triple.R2, rec.q, rec.guess);
      rec.err_1L = fem1d::l2_error(pod::lift(basis, one.coeffs), exact);
      rec.err_2L = fem1d::l2_error(pod::lift(basis, fine.coeffs), exact);
      rec.iterations_1L = one.iterations;
      rec.iterations_coarse = coarse.iterations;
      rec.ok = true;
    }
    catch (const Error &e)
    {
      rec.ok = false;
      rec.failure = e.what();
    }
  };

  const unsigned threads = cfg.threads > 0 ? cfg.threads : sweep_threads();
  {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t i = next++; i < report.records.size(); i = next++)
      {
        solve_record(report.records[i]);
      }
    };
    const auto n_workers = std::min<std::size_t>(threads, report.records.size());
    std::vector<std::jthread> pool;
    for (std::size_t w = 1; w < n_workers; ++w)
    {
      pool.emplace_back(worker);
    }
    worker();
  }

  // Timing pass, serial.
  double sink = 0.0;
  for (QRecord &rec : report.records)
  {
    if (!rec.ok)
    {
      continue;
    }
    const Triple &t = rec.triple;
    sink += runner.one_level(t.R1, rec.q, rec.guess).coeffs[0];
    auto t0 = Clock::now();
    for (int k = 0; k < cfg.reps; ++k)
    {
      sink += runner.one_level(t.R1, rec.q, rec.guess).coeffs[0];
    }
    rec.time_1L = std::chrono::duration<double>(Clock::now() - t0).count() / cfg.reps;

    sink += runner.two_level(t.r, t.R2, rec.q, rec.guess).second.coeffs[0];
    t0 = Clock::now();
    for (int k = 0; k < cfg.reps; ++k)
    {
      sink += runner.two_level(t.r, t.R2, rec.q, rec.guess).second.coeffs[0];
    }
    rec.time_2L = std::chrono::duration<double>(Clock::now() - t0).count() / cfg.reps;
  }
  g_timing_sink = sink;

  report.rows = summarize(report.records, cfg.triples, cfg.guesses);
  Environment &env = report.environment;
  env.clock = "std::chrono::steady_clock";
#ifdef NDEBUG
  env.build_profile = "release";
#else
  env.build_profile = "debug";
#endif
#ifdef __VERSION__
  env.compiler = __VERSION__;
#endif
  env.reps = cfg.reps;
  env.threads = threads;
  env.nu = offline.problem.nu;
  env.basis_dim = basis.dim();
  return report;
}

ExperimentReport run_experiment(const ExperimentConfig &cfg)
{
  const auto offline = pod::build_offline(cfg.problem, cfg.q_grid, cfg.h, cfg.inner_product,
                                          cfg.rank_tol, cfg.threads > 0 ? cfg.threads
                                                                        : sweep_threads());
  return run_experiment(cfg, offline);
}

ReportFormat format_from_string(const std::string &s)
{
  if (s == "csv")
  {
    return ReportFormat::Csv;
  }
  if (s == "markdown" || s == "md")
  {
    return ReportFormat::Markdown;
  }
  if (s == "json")
  {
    return ReportFormat::Json;
  }
  throw UsageError("unknown report format '" + s + "' (expected csv, markdown or json)");
}

namespace
{

json number(double v)
{
  return std::isfinite(v) ? json(v) : json(nullptr);
}

double number_from(const json &j)
{
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

json triple_to_json(const Triple &t)
{
  return {{"r", t.r}, {"R1", t.R1}, {"R2", t.R2}};
}

Triple triple_from_json(const json &j)
{
  return {j.at("r").get<Index>(), j.at("R1").get<Index>(), j.at("R2").get<Index>()};
}

json to_json(const ExperimentReport &report)
{
  json rows = json::array();
  for (const ReportRow &r : report.rows)
  {
    rows.push_back({{"guess", solvers::to_string(r.guess)},
                    {"triple", triple_to_json(r.triple)},
                    {"err_2L", number(r.err_2L)},
                    {"time_2L_s", number(r.time_2L)},
                    {"err_1L", number(r.err_1L)},
                    {"time_1L_s", number(r.time_1L)},
                    {"error_ratio", number(r.error_ratio)},
                    {"speedup", number(r.speedup)},
                    {"n_failures", r.n_failures},
                    {"n_q", r.n_q},
                    {"mean_iterations_1L", number(r.mean_iterations_1L)},
                    {"mean_iterations_coarse", number(r.mean_iterations_coarse)}});
  }
  json records = json::array();
  for (const QRecord &r : report.records)
  {
    records.push_back({{"q", r.q},
                       {"triple", triple_to_json(r.triple)},
                       {"guess", solvers::to_string(r.guess)},
                       {"ok", r.ok},
                       {"failure", r.failure},
                       {"err_1L", number(r.err_1L)},
                       {"err_2L", number(r.err_2L)},
                       {"time_1L_s", number(r.time_1L)},
                       {"time_2L_s", number(r.time_2L)},
                       {"iterations_1L", r.iterations_1L},
                       {"iterations_coarse", r.iterations_coarse}});
  }
  const Environment &e = report.environment;
  return {{"environment",
           {{"clock", e.clock},
            {"build_profile", e.build_profile},
            {"compiler", e.compiler},
            {"reps", e.reps},
            {"threads", e.threads},
            {"nu", e.nu},
            {"basis_dim", e.basis_dim}}},
          {"rows", rows},
          {"records", records}};
}

std::string fmt_sci(double v, int digits = 3)
{
  std::ostringstream os;
  os << std::scientific << std::setprecision(digits) << std::uppercase << v;
  return os.str();
}

std::string fmt_fixed(double v, int digits = 3)
{
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

std::string render_csv(const ExperimentReport &report)
{
  std::ostringstream os;
  os << "guess,r,R1,R2,err_2L,time_2L_s,err_1L,time_1L_s,error_ratio,speedup,n_failures\n";
  os << std::setprecision(10);
  for (const ReportRow &r : report.rows)
  {
    os << solvers::to_string(r.guess) << ',' << r.triple.r << ',' << r.triple.R1 << ','
       << r.triple.R2 << ',' << r.err_2L << ',' << r.time_2L << ',' << r.err_1L << ','
       << r.time_1L << ',' << r.error_ratio << ',' << r.speedup << ',' << r.n_failures << '\n';
  }
  return os.str();
}

std::string render_markdown(const ExperimentReport &report)
{
  std::ostringstream os;
  os << "### L2 errors and times: averaged over all q values\n";
  std::vector<Triple> seen;
  for (const ReportRow &row : report.rows)
  {
    if (std::find(seen.begin(), seen.end(), row.triple) != seen.end())
    {
      continue;
    }
    seen.push_back(row.triple);
    const Triple &t = row.triple;
    os << "\n#### (r,R2) = (" << t.r << ',' << t.R2 << "), R1 = " << t.R1 << "\n\n";
    os << "| u0 | E(2L) | 2L Time (s) | E(1L) | 1L Time (s) | Error Ratio | Speedup |\n";
    os << "|---|---|---|---|---|---|---|\n";
    for (const ReportRow &r : report.rows)
    {
      if (!(r.triple == t))
      {
        continue;
      }
      os << "| u_" << solvers::to_string(r.guess) << " | " << fmt_sci(r.err_2L) << " | "
         << fmt_sci(r.time_2L) << " | " << fmt_sci(r.err_1L) << " | " << fmt_sci(r.time_1L)
         << " | " << fmt_fixed(r.error_ratio) << " | " << fmt_fixed(r.speedup) << " |";
      if (r.n_failures > 0)
      {
        os << " (" << r.n_failures << " failed)";
      }
      os << '\n';
    }
  }
  return os.str();
}

}  // namespace

std::string render_report(const ExperimentReport &report, ReportFormat format)
{
  switch (format)
  {
  case ReportFormat::Csv:
    return render_csv(report);
  case ReportFormat::Markdown:
    return render_markdown(report);
  case ReportFormat::Json:
    return to_json(report).dump(2) + "\n";
  }
  return {};
}

void emit_report(const ExperimentReport &report, ReportFormat format,
                 const std::filesystem::path &path)
{
  std::ofstream os(path);
  if (!os)
  {
    throw IoError("cannot open '" + path.string() + "' for writing");
  }
  os << render_report(report, format);
  if (!os)
  {
    throw IoError("write to '" + path.string() + "' failed");
  }
}

ExperimentReport parse_report_json(const std::string &text)
{
  json j;
  try
  {
    j = json::parse(text);
  }
  catch (const json::exception &e)
  {
    throw IoError(std::string("malformed report JSON: ") + e.what());
  }
  ExperimentReport report;
  const json &e = j.at("environment");
  report.environment = {e.at("clock").get<std::string>(),
                        e.at("build_profile").get<std::string>(),
                        e.at("compiler").get<std::string>(),
                        e.at("reps").get<int>(),
                        e.at("threads").get<unsigned>(),
                        e.at("nu").get<double>(),
                        e.at("basis_dim").get<Index>()};
  for (const json &r : j.at("rows"))
  {
    ReportRow row;
    row.guess = solvers::guess_from_string(r.at("guess").get<std::string>());
    row.triple = triple_from_json(r.at("triple"));
    row.err_2L = number_from(r.at("err_2L"));
    row.time_2L = number_from(r.at("time_2L_s"));
    row.err_1L = number_from(r.at("err_1L"));
    row.time_1L = number_from(r.at("time_1L_s"));
    row.error_ratio = number_from(r.at("error_ratio"));
    row.speedup = number_from(r.at("speedup"));
    row.n_failures = r.at("n_failures").get<int>();
    row.n_q = r.at("n_q").get<int>();
    row.mean_iterations_1L = number_from(r.at("mean_iterations_1L"));
    row.mean_iterations_coarse = number_from(r.at("mean_iterations_coarse"));
    report.rows.push_back(row);
  }
  for (const json &r : j.at("records"))
  {
    QRecord rec;
    rec.q = r.at("q").get<double>();
    rec.triple = triple_from_json(r.at("triple"));
    rec.guess = solvers::guess_from_string(r.at("guess").get<std::string>());
    rec.ok = r.at("ok").get<bool>();
    rec.failure = r.at("failure").get<std::string>();
    rec.err_1L = number_from(r.at("err_1L"));
    rec.err_2L = number_from(r.at("err_2L"));
    rec.time_1L = number_from(r.at("time_1L_s"));
    rec.time_2L = number_from(r.at("time_2L_s"));
    rec.iterations_1L = r.at("iterations_1L").get<int>();
    rec.iterations_coarse = r.at("iterations_coarse").get<int>();
    report.records.push_back(rec);
  }
  return report;
}

}  // namespace rom2l::bench
