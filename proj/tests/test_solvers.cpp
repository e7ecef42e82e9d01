// Copyright The rom2l Authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "rom2l/errors.hpp"
#include "rom2l/solvers.hpp"

using namespace rom2l;
using namespace rom2l::solvers;
using fem1d::build_mesh;
using rom::RomOperators;
using rom::Tensor3;

namespace
{

const pod::OfflineData &default_offline()
{
  static const pod::OfflineData data =
      pod::build_offline(BurgersProblem{}, pod::QGrid{}, 1.0 / 200.0,
                         pod::InnerProduct::MassWeighted, pod::kDefaultRankTol, 0);
  return data;
}

double rom_error(const pod::PodBasis &basis, const Eigen::VectorXd &a, const BurgersProblem &prob)
{
  return fem1d::l2_error(pod::lift(basis, a), [&](double x) { return exact_u(prob, x); });
}

RomOperators scalar_ops()
{
  Tensor3 B(1);
  B(0, 0, 0) = 1.0;
  return RomOperators::from_parts(Eigen::MatrixXd::Ones(1, 1), B, Eigen::VectorXd::Constant(1, -2.0));
}

}  // namespace

TEST_CASE("linear systems converge in one iteration")
{
  std::mt19937 gen(2);
  std::normal_distribution<double> dist;
  const Index n = 6;
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(n, n) * 4.0;
  Eigen::VectorXd b(n);
  for (Index i = 0; i < n; ++i)
  {
    b[i] = dist(gen);
    for (Index j = 0; j < n; ++j)
    {
      A(i, j) += 0.3 * dist(gen);
    }
  }
  const RomOperators ops = RomOperators::from_parts(A, Tensor3(n), b);
  for (int trial = 0; trial < 3; ++trial)
  {
    Eigen::VectorXd a0(n);
    for (Index i = 0; i < n; ++i)
    {
      a0[i] = 10.0 * dist(gen);
    }
    const SolveOutcome out = newton_solve(ops, a0);
    CHECK(out.converged);
    CHECK(out.iterations == 1);
    CHECK((A * out.coeffs + b).norm() < 1e-12);
  }
}

TEST_CASE("scalar quadratic")
{
  const RomOperators ops = scalar_ops();
  const SolveOutcome out = newton_solve(ops, Eigen::VectorXd::Constant(1, 3.0));
  CHECK(out.converged);
  CHECK(out.iterations <= 7);
  CHECK(out.coeffs[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(out.final_residual_norm <= 1e-10);

  const SolveOutcome exact = newton_solve(ops, Eigen::VectorXd::Constant(1, 1.0));
  CHECK(exact.iterations <= 2);
  CHECK(exact.final_residual_norm <= 1e-10);

  // From a0 = -1/2 the Jacobian 1 + 2a vanishes.
  CHECK_THROWS_AS(newton_solve(ops, Eigen::VectorXd::Constant(1, -0.5)), SingularJacobian);

  NewtonConfig tight;
  tight.max_iter = 2;
  try
  {
    newton_solve(ops, Eigen::VectorXd::Constant(1, 100.0), tight);
    FAIL("expected NoConvergence");
  }
  catch (const NoConvergence &e)
  {
    CHECK(e.iterations() == 2);
    CHECK(e.last_iterate().size() == 1);
    CHECK(e.residual_norm() > 1e-10);
  }
  CHECK_THROWS_AS(newton_solve(ops, Eigen::VectorXd::Zero(2)), DimensionError);
}

TEST_CASE("initial guesses")
{
  CHECK(make_guess(GuessKind::UG, 4) == Eigen::Vector4d(1, -1, 0, 0));
  Eigen::VectorXd ug5(5);
  ug5 << 1, -1, 1, 0, 0;
  CHECK(make_guess(GuessKind::UG, 5) == ug5);
  CHECK(make_guess(GuessKind::IG, 5) == ug5 / 2.0);
  CHECK(make_guess(GuessKind::AVG, 7) == Eigen::VectorXd::Zero(7));
  CHECK(make_guess(GuessKind::UG, 2) == Eigen::Vector2d(0, 0));
  CHECK_THROWS_AS(make_guess(GuessKind::UG, 1), DimensionError);
  CHECK_THROWS_AS(make_guess(GuessKind::IG, 0), DimensionError);
  CHECK(make_guess(GuessKind::AVG, 1).size() == 1);
  CHECK(guess_from_string("UG") == GuessKind::UG);
  CHECK(guess_from_string("avg") == GuessKind::AVG);
  CHECK(to_string(GuessKind::IG) == "ig");
  CHECK_THROWS_AS(guess_from_string("best"), UsageError);
}

TEST_CASE("full-order solver")
{
  const BurgersProblem prob = BurgersProblem{}.with_q(0.4);
  auto exact = [&](double x) { return exact_u(prob, x); };
  const auto fine = fom_solve(build_mesh(-4.0, 4.0, 1.0 / 200.0), prob);
  CHECK(fem1d::l2_error(fine, exact) <= 1e-6);
  CHECK(fine.coeffs()[0] == 1.0);
  CHECK(fine.coeffs()[fine.coeffs().size() - 1] == -1.0);

  std::vector<double> errs;
  for (double h : {0.2, 0.1, 0.05})
  {
    errs.push_back(fem1d::l2_error(fom_solve(build_mesh(-4.0, 4.0, h), prob), exact));
  }
  for (std::size_t i = 1; i < errs.size(); ++i)
  {
    CHECK(std::log2(errs[i - 1] / errs[i]) >= 2.7);
  }

  BurgersProblem viscous = prob;
  viscous.nu = 10.0;
  const auto v = fom_solve(build_mesh(-4.0, 4.0, 0.05), viscous);
  CHECK(fem1d::l2_error(v, [&](double x) { return exact_u(viscous, x); }) < 1e-4);
}

TEST_CASE("reduced newton converges quadratically")
{
  const pod::PodBasis &basis = default_offline().basis;
  const BurgersProblem prob = BurgersProblem{}.with_q(0.0);
  const RomOperators ops = rom::assemble_operators(basis, 25, prob);
  const SolveOutcome out = one_level_solve(ops, GuessKind::UG);
  REQUIRE(out.converged);
  const auto &h = out.residual_history;
  REQUIRE(h.size() >= 4);
  // Skip ratios whose numerator sits at the roundoff floor.
  int checked = 0;
  for (std::size_t k = h.size() - 3; k + 1 < h.size(); ++k)
  {
    MESSAGE("r_k = " << h[k] << ", r_k+1 = " << h[k + 1]);
    if (h[k + 1] > 1e-13)
    {
      CHECK(h[k + 1] / (h[k] * h[k]) <= 1e3);
      ++checked;
    }
  }
  CHECK(checked >= 1);

  const SolveOutcome again = one_level_solve(ops, GuessKind::UG);
  CHECK(again.coeffs == out.coeffs);
  CHECK(again.iterations == out.iterations);
}

TEST_CASE("two-level method")
{
  const pod::PodBasis &basis = default_offline().basis;
  const BurgersProblem prob = BurgersProblem{}.with_q(-0.6);
  const RomOperators fine = rom::assemble_operators(basis, 25, prob);

  SUBCASE("r = R reproduces the one-level solution")
  {
    const auto [coarse, corrected] = two_level_solve(fine, fine, GuessKind::AVG);
    CHECK(corrected.iterations == 1);
    CHECK((corrected.coeffs - coarse.coeffs).norm() < 1e-10);
  }

  SUBCASE("step two is one linear solve")
  {
    const auto [coarse, corrected] = two_level_solve(fine.leading(16), fine, GuessKind::UG);
    CHECK(coarse.coeffs.size() == 16);
    CHECK(corrected.coeffs.size() == 25);
    CHECK(corrected.iterations == 1);
    const SolveOutcome direct = two_level_linear_step(fine, coarse.coeffs);
    CHECK((direct.coeffs - corrected.coeffs).norm() < 1e-14);
  }

  SUBCASE("basis overload matches the operator overload")
  {
    const auto a = two_level_solve(basis, 16, 25, prob, GuessKind::AVG);
    const auto b = two_level_solve(fine.leading(16), fine, GuessKind::AVG);
    CHECK((a.second.coeffs - b.second.coeffs).norm() < 1e-12);
    const SolveOutcome one = one_level_solve(basis, 25, prob, GuessKind::AVG);
    CHECK((one.coeffs - one_level_solve(fine, GuessKind::AVG).coeffs).norm() < 1e-12);
  }
}

TEST_CASE("uninformed guess needs more coarse iterations than the mean")
{
  const pod::PodBasis &basis = default_offline().basis;
  int ug = 0;
  int avg = 0;
  for (double q = -3.5; q <= 3.5; q += 0.5)
  {
    const RomOperators ops = rom::assemble_operators(basis, 16, BurgersProblem{}.with_q(q));
    ug += one_level_solve(ops, GuessKind::UG).iterations;
    avg += one_level_solve(ops, GuessKind::AVG).iterations;
  }
  CHECK(ug > avg);
}

TEST_CASE("two-level accuracy")
{
  const pod::PodBasis &basis = default_offline().basis;
  double e2_16_25 = 0.0;
  double e1_25 = 0.0;
  double e2_20_29 = 0.0;
  for (double q = -3.75; q <= 3.75; q += 0.5)
  {
    const BurgersProblem prob = BurgersProblem{}.with_q(q);
    const RomOperators ops29 = rom::assemble_operators(basis, 29, prob);
    const RomOperators ops25 = ops29.leading(25);
    e2_16_25 += rom_error(
        basis, two_level_solve(ops25.leading(16), ops25, GuessKind::AVG).second.coeffs, prob);
    e1_25 += rom_error(basis, one_level_solve(ops25, GuessKind::AVG).coeffs, prob);
    e2_20_29 += rom_error(
        basis, two_level_solve(ops29.leading(20), ops29, GuessKind::AVG).second.coeffs, prob);
  }
  const double ratio = e2_16_25 / e1_25;
  MESSAGE("(16,25) ratio " << ratio << ", (20,25,29) ratio " << e2_20_29 / e1_25);
  CHECK(ratio >= 1.0);
  CHECK(ratio <= 1.3);
  CHECK(e2_20_29 < e1_25);
}

TEST_CASE("config validation")
{
  NewtonConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.max_iter = 0;
  CHECK_THROWS_AS(cfg.validate(), UsageError);
  cfg = NewtonConfig{};
  cfg.tol_residual = -1.0;
  CHECK_THROWS_AS(cfg.validate(), UsageError);
}
