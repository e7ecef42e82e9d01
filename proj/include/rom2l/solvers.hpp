// Copyright The rom2l Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "rom2l/fem1d.hpp"
#include "rom2l/manufactured.hpp"
#include "rom2l/pod.hpp"
#include "rom2l/rom.hpp"

namespace rom2l::solvers
{

using Eigen::Index;

struct NewtonConfig
{
  double tol_residual = 1e-10;
  double tol_step = 1e-10;
  int max_iter = 50;

  void validate() const;
};

struct SolveOutcome
{
  Eigen::VectorXd coeffs;
  int iterations = 0;
  double final_residual_norm = 0.0;
  double wall_time = 0.0;  // seconds
  bool converged = false;
  // Residual norm at the initial guess and after every Newton step.
  std::vector<double> residual_history;
};

enum class GuessKind
{
  UG,
  IG,
  AVG
};

std::string to_string(GuessKind g);
// "ug", "ig", "avg" (case-insensitive).
GuessKind guess_from_string(const std::string &s);

/// Uninformed guess [1,-1,1,...,0,0] (alternating signs, last two entries
/// zero), the informed guess UG/2, or zero (the lifted mean).
/// Throws DimensionError for r < 2 unless kind is AVG.
Eigen::VectorXd make_guess(GuessKind kind, Index r);

/// Plain Newton on A a + B(a,a) + b = 0 with a dense LU solve per step.
/// Converged at iterate k once the residual norm there and the Newton
/// correction computed there are both below their tolerances; `iterations` is
/// then k (the final, negligible correction is applied but not counted).
/// Throws SingularJacobian or NoConvergence.
SolveOutcome newton_solve(const rom::RomOperators &ops, const Eigen::VectorXd &a0,
                          const NewtonConfig &cfg = {});

/// Nonlinear reduced solve at dimension ops.dim().
SolveOutcome one_level_solve(const rom::RomOperators &ops, GuessKind guess,
                             const NewtonConfig &cfg = {});
SolveOutcome one_level_solve(const pod::PodBasis &basis, Index R1, const BurgersProblem &prob,
                             GuessKind guess, const NewtonConfig &cfg = {});

/// Step 1: Newton at the coarse dimension. Step 2: one linear solve at the fine
/// dimension, linearized about the zero-padded coarse solution.
/// The coarse load vector is the leading block of the fine one.
std::pair<SolveOutcome, SolveOutcome> two_level_solve(const rom::RomOperators &ops_coarse,
                                                      const rom::RomOperators &ops_fine,
                                                      GuessKind guess,
                                                      const NewtonConfig &cfg = {});
std::pair<SolveOutcome, SolveOutcome> two_level_solve(const pod::PodBasis &basis, Index r,
                                                      Index R2, const BurgersProblem &prob,
                                                      GuessKind guess,
                                                      const NewtonConfig &cfg = {});

// Step 2 alone. Throws SingularLinearSystem.
SolveOutcome two_level_linear_step(const rom::RomOperators &ops_fine,
                                   const Eigen::VectorXd &a_coarse);

/// Full-order Newton for the Burgers FE system, Dirichlet data imposed through
/// the linear interpolant of (alpha, beta). Throws NoConvergence.
fem1d::FeFunction fom_solve(const fem1d::Mesh1D &mesh, const BurgersProblem &prob,
                            const NewtonConfig &cfg = {});

}  // namespace rom2l::solvers
