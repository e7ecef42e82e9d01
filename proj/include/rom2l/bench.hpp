// Copyright The rom2l Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "rom2l/manufactured.hpp"
#include "rom2l/pod.hpp"
#include "rom2l/solvers.hpp"

namespace rom2l::bench
{

using Eigen::Index;
using solvers::GuessKind;

/// 2L uses (r, R2); 1L uses R1.
struct Triple
{
  Index r = 0;
  Index R1 = 0;
  Index R2 = 0;

  bool operator==(const Triple &) const = default;
};

std::string to_string(const Triple &t);

struct ExperimentConfig
{
  BurgersProblem problem;
  pod::QGrid q_grid;
  double h = 1.0 / 200.0;
  std::vector<Triple> triples;
  std::vector<GuessKind> guesses = {GuessKind::UG, GuessKind::IG, GuessKind::AVG};
  int reps = 100;
  double rank_tol = pod::kDefaultRankTol;
  pod::InnerProduct inner_product = pod::InnerProduct::MassWeighted;
  solvers::NewtonConfig newton;
  // Worker threads for the untimed error pass; 0 means sweep_threads().
  unsigned threads = 0;
  // Permit r == R2 (used by consistency tests only).
  bool allow_degenerate = false;

  // Throws UsageError unless r < R2 <= ell, R1 <= ell and reps >= 1.
  void validate(Index ell) const;
};

/// One (q, triple, guess) solve pair.
struct QRecord
{
  double q = 0.0;
  Triple triple;
  GuessKind guess = GuessKind::UG;
  bool ok = false;
  std::string failure;
  double err_1L = 0.0;
  double err_2L = 0.0;
  double time_1L = 0.0;
  double time_2L = 0.0;
  int iterations_1L = 0;
  int iterations_coarse = 0;
};

/// Averages over the q grid for one (triple, guess).
struct ReportRow
{
  GuessKind guess = GuessKind::UG;
  Triple triple;
  double err_2L = 0.0;
  double time_2L = 0.0;
  double err_1L = 0.0;
  double time_1L = 0.0;
  double error_ratio = 0.0;
  double speedup = 0.0;
  int n_failures = 0;
  int n_q = 0;
  double mean_iterations_1L = 0.0;
  double mean_iterations_coarse = 0.0;
};

struct Environment
{
  std::string clock;
  std::string build_profile;
  std::string compiler;
  int reps = 0;
  unsigned threads = 0;
  double nu = 0.0;
  Index basis_dim = 0;
};

struct ExperimentReport
{
  std::vector<ReportRow> rows;
  std::vector<QRecord> records;
  Environment environment;

  int n_failures() const;
};

// Value of ROM2L_THREADS if set and positive, else hardware concurrency.
unsigned sweep_threads();

/// Error pass (parallel over q) followed by a serial timing pass. Each timed
/// run covers load-vector assembly for the current q plus the solve(s); one
/// untimed warm-up precedes the `reps` timed runs. Solver failures are
/// recorded per record and excluded from the averages.
ExperimentReport run_experiment(const ExperimentConfig &cfg, const pod::OfflineData &offline);
// Builds the basis from cfg first.
ExperimentReport run_experiment(const ExperimentConfig &cfg);

// Recomputes the per-(triple, guess) averages from report.records.
std::vector<ReportRow> summarize(const std::vector<QRecord> &records,
                                 const std::vector<Triple> &triples,
                                 const std::vector<GuessKind> &guesses);

enum class ReportFormat
{
  Csv,
  Markdown,
  Json
};

ReportFormat format_from_string(const std::string &s);

std::string render_report(const ExperimentReport &report, ReportFormat format);
// Throws IoError if the file cannot be written.
void emit_report(const ExperimentReport &report, ReportFormat format,
                 const std::filesystem::path &path);

ExperimentReport parse_report_json(const std::string &text);

}  // namespace rom2l::bench
