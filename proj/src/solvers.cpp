// Copyright The rom2l Authors
// SPDX-License-Identifier: Apache-2.0

#include "rom2l/solvers.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <limits>

#include <Eigen/LU>
#include <Eigen/SparseLU>

#include "rom2l/errors.hpp"

namespace rom2l::solvers
{

namespace
{

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

bool lu_is_singular(const Eigen::PartialPivLU<Eigen::MatrixXd> &lu)
{
  const Eigen::VectorXd d = lu.matrixLU().diagonal().cwiseAbs();
  const double dmax = d.maxCoeff();
  return !(dmax > 0.0) || !std::isfinite(dmax) ||
         d.minCoeff() <= static_cast<double>(d.size()) *
                           std::numeric_limits<double>::epsilon() * dmax;
}

}  // namespace

void NewtonConfig::validate() const
{
  if (!(tol_residual > 0.0) || !(tol_step > 0.0) || max_iter < 1)
  {
    throw UsageError("NewtonConfig: tolerances must be positive and max_iter >= 1");
  }
}

std::string to_string(GuessKind g)
{
  switch (g)
  {
  case GuessKind::UG:
    return "ug";
  case GuessKind::IG:
    return "ig";
  case GuessKind::AVG:
    return "avg";
  }
  return "?";
}

GuessKind guess_from_string(const std::string &s)
{
  std::string lower(s);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "ug")
  {
    return GuessKind::UG;
  }
  if (lower == "ig")
  {
    return GuessKind::IG;
  }
  if (lower == "avg")
  {
    return GuessKind::AVG;
  }
  throw UsageError("unknown initial guess '" + s + "' (expected ug, ig or avg)");
}

Eigen::VectorXd make_guess(GuessKind kind, Index r)
{
  if (kind == GuessKind::AVG)
  {
    if (r < 0)
    {
      throw DimensionError("make_guess: negative dimension");
    }
    return Eigen::VectorXd::Zero(r);
  }
  if (r < 2)
  {
    throw DimensionError("make_guess: UG and IG need r >= 2");
  }
  Eigen::VectorXd g = Eigen::VectorXd::Zero(r);
  for (Index i = 0; i < r - 2; ++i)
  {
    g[i] = (i % 2 == 0) ? 1.0 : -1.0;
  }
  return kind == GuessKind::IG ? Eigen::VectorXd(0.5 * g) : g;
}

SolveOutcome newton_solve(const rom::RomOperators &ops, const Eigen::VectorXd &a0,
                          const NewtonConfig &cfg)
{
  const auto t0 = Clock::now();
  const Index n = ops.dim();
  if (a0.size() != n)
  {
    throw DimensionError("newton_solve: initial guess has the wrong length");
  }

  const Eigen::MatrixXd &A = ops.A();
  const Eigen::MatrixXd &S = ops.B_symmetrized();
  const Eigen::VectorXd &b = ops.b();

  SolveOutcome out;
  out.coeffs = a0;
  Eigen::VectorXd &a = out.coeffs;
  Eigen::VectorXd sa(n * n);
  Eigen::MatrixXd J(n, n);
  Eigen::VectorXd res(n);
  Eigen::VectorXd step(n);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(n);

  // Converged at a_k when the residual there and the Newton correction computed
  // there are both within tolerance; that last correction is still applied but
  // not counted, so a linear system converges in one iteration.
  for (int it = 0;; ++it)
  {
    // V(i,k) = sum_j (B_ijk + B_ikj) a_j;  J = A + V;  B(a,a) = V a / 2.
    sa.noalias() = S * a;
    const Eigen::Map<const Eigen::MatrixXd> V(sa.data(), n, n);
    res = b;
    res.noalias() += A * a;
    res.noalias() += 0.5 * (V * a);
    const double rn = res.norm();
    out.residual_history.push_back(rn);

    if (!std::isfinite(rn))
    {
      throw NoConvergence("Newton produced a non-finite residual after " + std::to_string(it) +
                              " iterations",
                          a, rn, it);
    }

    J = A + V;
    lu.compute(J);
    if (lu_is_singular(lu))
    {
      throw SingularJacobian("Newton: singular Jacobian at iteration " + std::to_string(it));
    }
    step = lu.solve(res);
    a -= step;

    if (rn <= cfg.tol_residual && step.norm() <= cfg.tol_step)
    {
      out.iterations = it;
      out.final_residual_norm = rn;
      out.converged = true;
      out.wall_time = seconds_since(t0);
      return out;
    }
    if (it == cfg.max_iter)
    {
      throw NoConvergence("Newton did not converge in " + std::to_string(it) + " iterations",
                          a, rn, it);
    }
  }
}

SolveOutcome one_level_solve(const rom::RomOperators &ops, GuessKind guess,
                             const NewtonConfig &cfg)
{
  return newton_solve(ops, make_guess(guess, ops.dim()), cfg);
}

SolveOutcome one_level_solve(const pod::PodBasis &basis, Index R1, const BurgersProblem &prob,
                             GuessKind guess, const NewtonConfig &cfg)
{
  return one_level_solve(rom::assemble_operators(basis, R1, prob), guess, cfg);
}

SolveOutcome two_level_linear_step(const rom::RomOperators &ops_fine,
                                   const Eigen::VectorXd &a_coarse)
{
  const auto t0 = Clock::now();
  const Index R = ops_fine.dim();
  const Index r = a_coarse.size();
  if (r > R)
  {
    throw DimensionError("two-level step: coarse dimension exceeds fine dimension");
  }
  // Same algebra as rom::two_level_matrix_rhs, using the symmetrized tensor.
  Eigen::VectorXd padded = Eigen::VectorXd::Zero(R);
  padded.head(r) = a_coarse;
  const Eigen::VectorXd sa = ops_fine.B_symmetrized() * padded;
  const Eigen::Map<const Eigen::MatrixXd> V(sa.data(), R, R);
  const Eigen::MatrixXd M = ops_fine.A() + V;
  const Eigen::VectorXd rhs = 0.5 * (V * padded) - ops_fine.b();

  Eigen::PartialPivLU<Eigen::MatrixXd> lu(M);
  if (lu_is_singular(lu))
  {
    throw SingularLinearSystem("two-level linear step: singular matrix");
  }
  SolveOutcome out;
  out.coeffs = lu.solve(rhs);
  out.iterations = 1;
  out.converged = true;
  out.final_residual_norm = (M * out.coeffs - rhs).norm();
  out.residual_history = {out.final_residual_norm};
  out.wall_time = seconds_since(t0);
  return out;
}

std::pair<SolveOutcome, SolveOutcome> two_level_solve(const rom::RomOperators &ops_coarse,
                                                      const rom::RomOperators &ops_fine,
                                                      GuessKind guess, const NewtonConfig &cfg)
{
  if (ops_coarse.dim() > ops_fine.dim())
  {
    throw DimensionError("two_level_solve: need r <= R2");
  }
  SolveOutcome step1 = one_level_solve(ops_coarse, guess, cfg);
  SolveOutcome step2 = two_level_linear_step(ops_fine, step1.coeffs);
  return {std::move(step1), std::move(step2)};
}

std::pair<SolveOutcome, SolveOutcome> two_level_solve(const pod::PodBasis &basis, Index r,
                                                      Index R2, const BurgersProblem &prob,
                                                      GuessKind guess, const NewtonConfig &cfg)
{
  if (r > R2 || R2 > basis.dim())
  {
    throw DimensionError("two_level_solve: need r <= R2 <= basis dimension");
  }
  const rom::RomAssembler assembler(basis, prob, R2);
  return two_level_solve(assembler.operators(r, prob.q), assembler.operators(R2, prob.q), guess,
                         cfg);
}

fem1d::FeFunction fom_solve(const fem1d::Mesh1D &mesh, const BurgersProblem &prob,
                            const NewtonConfig &cfg)
{
  cfg.validate();
  const Index n = mesh.n_nodes();
  const Index ni = n - 2;
  const double h = mesh.h();
  const double jac = 0.5 * h;
  const auto &rule = fem1d::gauss_legendre(3);
  const auto qs = fem1d::quadrature_samples(mesh);

  Eigen::VectorXd fq(qs.x.size());
  for (Index i = 0; i < qs.x.size(); ++i)
  {
    fq[i] = forcing_f(prob, qs.x[i]);
  }

  // Boundary lifting: linear interpolant of the Dirichlet data.
  Eigen::VectorXd u(n);
  for (Index i = 0; i < n; ++i)
  {
    const double t = (mesh.node(i) - mesh.a()) / (mesh.b() - mesh.a());
    u[i] = (1.0 - t) * prob.alpha + t * prob.beta;
  }

  std::array<std::array<double, 3>, 3> N{}, dN{};
  for (int g = 0; g < 3; ++g)
  {
    N[static_cast<std::size_t>(g)] = fem1d::shape_values(rule.points[static_cast<std::size_t>(g)]);
    dN[static_cast<std::size_t>(g)] =
      fem1d::shape_derivatives(rule.points[static_cast<std::size_t>(g)]);
    for (auto &d : dN[static_cast<std::size_t>(g)])
    {
      d /= jac;
    }
  }

  Eigen::SparseLU<fem1d::SparseMatrix> solver;
  bool analyzed = false;
  std::vector<Eigen::Triplet<double>> trips;
  double last_step = std::numeric_limits<double>::infinity();

  for (int it = 0;; ++it)
  {
    Eigen::VectorXd F = Eigen::VectorXd::Zero(n);
    trips.clear();
    for (Index e = 0; e < mesh.n_elems(); ++e)
    {
      const auto dofs = mesh.element_dofs(e);
      double Fe[3] = {0.0, 0.0, 0.0};
      double Je[3][3] = {};
      for (std::size_t g = 0; g < 3; ++g)
      {
        const double w = rule.weights[g] * jac;
        double uq = 0.0, duq = 0.0;
        for (std::size_t a = 0; a < 3; ++a)
        {
          uq += N[g][a] * u[dofs[a]];
          duq += dN[g][a] * u[dofs[a]];
        }
        const double f = fq[e * 3 + static_cast<Index>(g)];
        for (std::size_t i = 0; i < 3; ++i)
        {
          Fe[i] += w * (prob.nu * duq * dN[g][i] + (uq * duq - f) * N[g][i]);
          for (std::size_t j = 0; j < 3; ++j)
          {
            Je[i][j] += w * (prob.nu * dN[g][j] * dN[g][i] +
                             (N[g][j] * duq + uq * dN[g][j]) * N[g][i]);
          }
        }
      }
      for (std::size_t i = 0; i < 3; ++i)
      {
        F[dofs[i]] += Fe[i];
        const Index ri = dofs[i] - 1;
        if (ri < 0 || ri >= ni)
        {
          continue;
        }
        for (std::size_t j = 0; j < 3; ++j)
        {
          const Index cj = dofs[j] - 1;
          if (cj >= 0 && cj < ni)
          {
            trips.emplace_back(ri, cj, Je[i][j]);
          }
        }
      }
    }

    const Eigen::VectorXd Fi = F.segment(1, ni);
    const double rn = Fi.norm();
    if (it > 0 && rn <= cfg.tol_residual && last_step <= cfg.tol_step)
    {
      return fem1d::FeFunction(mesh, std::move(u));
    }
    if (it == cfg.max_iter || !std::isfinite(rn))
    {
      throw NoConvergence("full-order Newton did not converge", u, rn, it);
    }

    fem1d::SparseMatrix J(ni, ni);
    J.setFromTriplets(trips.begin(), trips.end());
    if (!analyzed)
    {
      solver.analyzePattern(J);
      analyzed = true;
    }
    solver.factorize(J);
    if (solver.info() != Eigen::Success)
    {
      throw SingularJacobian("full-order Newton: Jacobian factorization failed");
    }
    const Eigen::VectorXd step = solver.solve(Fi);
    u.segment(1, ni) -= step;
    last_step = step.norm();
  }
}

}  // namespace rom2l::solvers
