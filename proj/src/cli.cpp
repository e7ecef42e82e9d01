// Copyright The rom2l Authors
// SPDX-License-Identifier: Apache-2.0

#include "rom2l/cli.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "rom2l/errors.hpp"
#include "rom2l/rom.hpp"

namespace rom2l::cli
{

namespace
{

std::vector<Eigen::Index> split_ints(const std::string &s, std::size_t expected)
{
  std::vector<Eigen::Index> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ':'))
  {
    std::size_t used = 0;
    long long v = 0;
    try
    {
      v = std::stoll(tok, &used);
    }
    catch (const std::exception &)
    {
      used = 0;
    }
    if (tok.empty() || used != tok.size())
    {
      throw UsageError("malformed dimension list '" + s + "'");
    }
    out.push_back(static_cast<Eigen::Index>(v));
  }
  if (out.size() != expected || s.empty() || s.back() == ':')
  {
    throw UsageError("malformed dimension list '" + s + "': expected " +
                     std::to_string(expected) + " colon-separated integers");
  }
  return out;
}

}  // namespace

bench::Triple parse_pair(const std::string &s)
{
  const auto v = split_ints(s, 2);
  if (v[0] < 1 || v[0] >= v[1])
  {
    throw UsageError("pair '" + s + "': need 1 <= r < R");
  }
  return {v[0], v[1], v[1]};
}

bench::Triple parse_triple(const std::string &s)
{
  const auto v = split_ints(s, 3);
  if (v[0] < 1 || v[0] >= v[2] || v[1] < 1)
  {
    throw UsageError("triple '" + s + "': need 1 <= r < R2 and R1 >= 1");
  }
  return {v[0], v[1], v[2]};
}

namespace
{

struct ProblemFlags
{
  BurgersProblem problem;
  pod::QGrid grid;
  double h = 1.0 / 200.0;
  double rank_tol = pod::kDefaultRankTol;
  std::string inner_product = "mass_weighted";

  void attach(CLI::App &app)
  {
    app.add_option("--a", problem.a, "Left endpoint")->capture_default_str();
    app.add_option("--b", problem.b, "Right endpoint")->capture_default_str();
    app.add_option("--h", h, "Element width")->capture_default_str();
    app.add_option("--nu", problem.nu, "Diffusion coefficient")->capture_default_str();
    app.add_option("--k", problem.k, "Wave number")->capture_default_str();
    app.add_option("--sigma", problem.sigma, "Gaussian standard deviation")
      ->capture_default_str();
    app.add_option("--q-start", grid.start, "First q value")->capture_default_str();
    app.add_option("--q-end", grid.end, "Last q value")->capture_default_str();
    app.add_option("--q-step", grid.step, "q increment")->capture_default_str();
    app.add_option("--rank-tol", rank_tol, "Relative singular value cutoff")
      ->capture_default_str();
    app.add_option("--inner-product", inner_product, "mass_weighted or euclidean")
      ->capture_default_str();
  }

  // Boundary values follow from the exact solution.
  BurgersProblem resolved() const
  {
    BurgersProblem p = problem;
    p.q = 0.0;
    p.alpha = exact_u(p, p.a);
    p.beta = exact_u(p, p.b);
    return p;
  }

  pod::OfflineData build(unsigned threads) const
  {
    return pod::build_offline(resolved(), grid, h, pod::inner_product_from_string(inner_product),
                              rank_tol, threads);
  }
};

struct ExperimentFlags
{
  std::vector<std::string> dims;
  std::vector<std::string> guesses = {"ug", "ig", "avg"};
  int reps = 100;
  std::string basis;
  std::string out;
  std::string format = "csv";
  std::optional<double> q_start, q_end, q_step;
  ProblemFlags problem;
};

void attach_experiment(CLI::App &app, ExperimentFlags &f, const char *dims_flag,
                       const char *dims_help)
{
  app.add_option(dims_flag, f.dims, dims_help)->required()->delimiter(',');
  app.add_option("--guess", f.guesses, "Initial guesses: ug, ig, avg")
    ->delimiter(',')
    ->capture_default_str();
  app.add_option("--reps", f.reps, "Timed repetitions per solve")->capture_default_str();
  app.add_option("--basis", f.basis, "Basis header written by 'offline' (built in-process if absent)");
  app.add_option("--out", f.out, "Report path (stdout if absent)");
  app.add_option("--format", f.format, "csv, markdown or json")->capture_default_str();
  app.add_option("--sweep-start", f.q_start, "First q of the sweep (default: basis grid)");
  app.add_option("--sweep-end", f.q_end, "Last q of the sweep");
  app.add_option("--sweep-step", f.q_step, "q increment of the sweep");
  f.problem.attach(app);
}

int run_offline(const ProblemFlags &flags, const std::string &out_path, std::ostream &out)
{
  const auto offline = flags.build(bench::sweep_threads());
  pod::save_offline(offline, out_path);
  const auto &sv = offline.basis.singular_values();
  out << "snapshots: " << offline.grid.values().size() << "\n";
  out << "nodes: " << offline.basis.mesh().n_nodes() << "\n";
  out << "inner product: " << pod::to_string(offline.basis.inner_product()) << "\n";
  out << "rank: " << offline.basis.dim() << "\n";
  out << std::scientific << std::setprecision(6);
  out << "singular values: first " << sv.front() << ", last " << sv.back() << "\n";
  out << "basis written to " << out_path << "\n";
  return kExitOk;
}

int run_experiment_cmd(const ExperimentFlags &f, bool pairs, std::ostream &out)
{
  bench::ExperimentConfig cfg;
  for (const auto &s : f.dims)
  {
    cfg.triples.push_back(pairs ? parse_pair(s) : parse_triple(s));
  }
  cfg.guesses.clear();
  for (const auto &g : f.guesses)
  {
    cfg.guesses.push_back(solvers::guess_from_string(g));
  }
  cfg.reps = f.reps;
  const auto format = bench::format_from_string(f.format);

  const pod::OfflineData offline =
    f.basis.empty() ? f.problem.build(bench::sweep_threads()) : pod::load_offline(f.basis);
  cfg.problem = offline.problem;
  cfg.q_grid = offline.grid;
  if (f.q_start)
  {
    cfg.q_grid.start = *f.q_start;
  }
  if (f.q_end)
  {
    cfg.q_grid.end = *f.q_end;
  }
  if (f.q_step)
  {
    cfg.q_grid.step = *f.q_step;
  }

  const auto report = bench::run_experiment(cfg, offline);
  if (f.out.empty())
  {
    out << bench::render_report(report, format);
  }
  else
  {
    bench::emit_report(report, format, f.out);
    out << "report written to " << f.out << "\n";
  }
  if (report.n_failures() > 0)
  {
    out << report.n_failures() << " solver failure(s) recorded\n";
    return kExitFailures;
  }
  return kExitOk;
}

class CheckPrinter
{
public:
  explicit CheckPrinter(std::ostream &out) : out_(out) {}

  void operator()(const std::string &name, bool pass, const std::string &detail)
  {
    out_ << (pass ? "PASS " : "FAIL ") << name << ": " << detail << "\n";
    all_ = all_ && pass;
  }

  bool all() const { return all_; }

private:
  std::ostream &out_;
  bool all_ = true;
};

std::string sci(double v)
{
  std::ostringstream os;
  os << std::scientific << std::setprecision(3) << v;
  return os.str();
}

int run_validate(const pod::OfflineData &offline, Eigen::Index expect_rank, std::ostream &out)
{
  CheckPrinter check(out);
  const pod::PodBasis &basis = offline.basis;
  const Eigen::Index ell = basis.dim();

  // POD basis.
  out << "ell = " << ell << "\n";
  if (expect_rank > 0)
  {
    check("pod rank", ell == expect_rank,
          "ell = " + std::to_string(ell) + ", expected " + std::to_string(expect_rank));
  }
  const double orth = (basis.gram() - Eigen::MatrixXd::Identity(ell, ell)).cwiseAbs().maxCoeff();
  check("pod orthonormality", orth <= 1e-10, "max |G - I| = " + sci(orth));
  const double bnd = std::max(basis.modes().row(0).cwiseAbs().maxCoeff(),
                              basis.modes().row(basis.modes().rows() - 1).cwiseAbs().maxCoeff());
  check("pod boundary homogeneity", bnd <= 1e-14, "max boundary entry = " + sci(bnd));
  const auto &sv = basis.singular_values();
  check("pod singular values nonincreasing", std::is_sorted(sv.rbegin(), sv.rend()) && sv.back() > 0,
        "sigma_1 = " + sci(sv.front()) + ", sigma_ell = " + sci(sv.back()));

  // Full-order convergence study.
  {
    BurgersProblem p = offline.problem;
    p.q = 0.0;
    const double hs[] = {1.0 / 25.0, 1.0 / 50.0, 1.0 / 100.0};
    double errs[3];
    for (int i = 0; i < 3; ++i)
    {
      const auto mesh = fem1d::build_mesh(p.a, p.b, hs[i]);
      const auto u = solvers::fom_solve(mesh, p);
      errs[i] = fem1d::l2_error(u, [&p](double x) { return exact_u(p, x); });
    }
    const double order = std::log(errs[1] / errs[2]) / std::log(2.0);
    check("fom convergence order", order >= 2.7,
          "L2 errors " + sci(errs[0]) + ", " + sci(errs[1]) + ", " + sci(errs[2]) +
            "; observed order " + sci(order));
  }

  // Trilinear form identities on random FE functions.
  {
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    const auto &mesh = basis.mesh();
    auto rand_fn = [&] {
      Eigen::VectorXd c(mesh.n_nodes());
      for (auto &v : c)
      {
        v = dist(rng);
      }
      return fem1d::FeFunction(mesh, c);
    };
    double skew = 0.0, splitting = 0.0;
    for (int t = 0; t < 10; ++t)
    {
      const auto u = rand_fn(), ur = rand_fn(), v = rand_fn();
      skew = std::max(skew, std::abs(fem1d::trilinear_b_skew(u, v, v)));
      const double lhs = fem1d::trilinear_b(u, u, v);
      const double rhs = fem1d::trilinear_b(u, ur, v) + fem1d::trilinear_b(ur, u, v) -
                         fem1d::trilinear_b(ur, ur, v) + fem1d::trilinear_b(u - ur, u - ur, v);
      splitting = std::max(splitting, std::abs(lhs - rhs));
    }
    check("skew-symmetry b_skew(u;v,v) = 0", skew <= 1e-12, "max = " + sci(skew));
    check("trilinear splitting identity", splitting <= 1e-12, "max = " + sci(splitting));
  }

  // Reduced operator identities.
  {
    const Eigen::Index R = std::min<Eigen::Index>(ell, 10);
    const Eigen::Index r = std::max<Eigen::Index>(1, R / 2);
    const BurgersProblem p = offline.problem.with_q(offline.grid.start +
                                                    0.5 * (offline.grid.end - offline.grid.start));
    const auto opsR = rom::assemble_operators(basis, R, p);
    const auto opsr = rom::assemble_operators(basis, r, p);

    double nest = (opsR.A().topLeftCorner(r, r) - opsr.A()).cwiseAbs().maxCoeff();
    nest = std::max(nest, (opsR.b().head(r) - opsr.b()).cwiseAbs().maxCoeff());
    for (Eigen::Index i = 0; i < r; ++i)
    {
      nest = std::max(nest,
                      (opsR.B().slice(i).topLeftCorner(r, r) - opsr.B().slice(i)).cwiseAbs().maxCoeff());
    }
    check("nested operators", nest <= 1e-13, "max leading-block difference = " + sci(nest));

    const auto coarse = solvers::one_level_solve(opsr, solvers::GuessKind::AVG);
    const auto [Mlin, rhs] = rom::two_level_matrix_rhs(opsR, coarse.coeffs);
    Eigen::VectorXd padded = Eigen::VectorXd::Zero(R);
    padded.head(r) = coarse.coeffs;
    const double jac = (Mlin - rom::jacobian(opsR, padded)).cwiseAbs().maxCoeff();
    check("two-level matrix equals Jacobian", jac <= 1e-13, "max difference = " + sci(jac));

    const auto fine = solvers::one_level_solve(opsR, solvers::GuessKind::AVG);
    const auto step2 = solvers::two_level_linear_step(opsR, fine.coeffs);
    const double fixed = (step2.coeffs - fine.coeffs).norm();
    check("two-level fixed point at r = R", fixed <= 1e-8, "difference = " + sci(fixed));
  }

  return check.all() ? kExitOk : kExitFailures;
}

}  // namespace

int cli_main(const std::vector<std::string> &args, std::ostream &out, std::ostream &err)
{
  CLI::App app{"One- and two-level POD-Galerkin ROMs for the steady Burgers equation"};
  app.require_subcommand(1);
  // "-h" would clash with the element-width flag "--h".
  app.set_help_flag("--help", "Print this help message and exit");

  auto *offline = app.add_subcommand("offline", "Build and save the POD basis");
  offline->set_help_flag("--help", "Print this help message and exit");
  ProblemFlags offline_flags;
  std::string offline_out;
  offline_flags.attach(*offline);
  offline->add_option("--out", offline_out, "Basis header path")->required();

  auto *exp1 = app.add_subcommand("exp1", "Experiment 1: r < R1 = R2");
  exp1->set_help_flag("--help", "Print this help message and exit");
  ExperimentFlags exp1_flags;
  attach_experiment(*exp1, exp1_flags, "--pairs", "Dimension pairs r:R");

  auto *exp2 = app.add_subcommand("exp2", "Experiment 2: r < R1 < R2");
  exp2->set_help_flag("--help", "Print this help message and exit");
  ExperimentFlags exp2_flags;
  attach_experiment(*exp2, exp2_flags, "--triples", "Dimension triples r:R1:R2");

  auto *validate = app.add_subcommand("validate", "Run the consistency checks");
  validate->set_help_flag("--help", "Print this help message and exit");
  ProblemFlags validate_flags;
  std::string validate_basis;
  Eigen::Index expect_rank = 0;
  validate_flags.attach(*validate);
  validate->add_option("--basis", validate_basis, "Basis header written by 'offline'");
  validate->add_option("--expect-rank", expect_rank, "Fail unless the basis has this many modes");

  std::vector<std::string> storage = args;
  std::vector<char *> argv;
  argv.reserve(storage.size());
  for (auto &s : storage)
  {
    argv.push_back(s.data());
  }

  try
  {
    app.parse(static_cast<int>(argv.size()), argv.data());
  }
  catch (const CLI::ParseError &e)
  {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try
  {
    if (*offline)
    {
      return run_offline(offline_flags, offline_out, out);
    }
    if (*exp1)
    {
      return run_experiment_cmd(exp1_flags, true, out);
    }
    if (*exp2)
    {
      return run_experiment_cmd(exp2_flags, false, out);
    }
    if (*validate)
    {
      const auto data = validate_basis.empty() ? validate_flags.build(bench::sweep_threads())
                                               : pod::load_offline(validate_basis);
      return run_validate(data, expect_rank, out);
    }
  }
  catch (const UsageError &e)
  {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }
  catch (const IoError &e)
  {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  catch (const Error &e)
  {
    err << "error: " << e.what() << "\n";
    return kExitFailures;
  }
  return kExitUsage;
}

int cli_main(int argc, char **argv)
{
  return cli_main(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}

}  // namespace rom2l::cli
