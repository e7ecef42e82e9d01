// Copyright The rom2l Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>

#include <Eigen/Core>

namespace rom2l
{

/// Steady viscous Burgers problem -nu u'' + u u' = f on (a,b), u(a)=alpha,
/// u(b)=beta, with the manufactured solution
///
///   u(x) = 1 - 2(x-a)/(b-a) + exp(-(x-q)^2/(2 sigma^2)) sin(k pi (x-a)/(b-a)) / (sqrt(2 pi) sigma)
///
/// The forcing f is whatever makes u exact.
struct BurgersProblem
{
  double a = -4.0;
  double b = 4.0;
  double alpha = 1.0;
  double beta = -1.0;
  double nu = 1.0;
  int k = 1;
  double sigma = 0.5;
  double q = 0.0;

  // Throws rom2l::Error if nu <= 0, sigma <= 0, a >= b, or the boundary values
  // disagree with the exact solution by more than 1e-12.
  void validate() const;

  BurgersProblem with_q(double new_q) const
  {
    BurgersProblem p = *this;
    p.q = new_q;
    return p;
  }
};

double exact_u(const BurgersProblem &prob, double x);
double exact_du(const BurgersProblem &prob, double x);
double exact_d2u(const BurgersProblem &prob, double x);

// -nu u'' + u u'
double forcing_f(const BurgersProblem &prob, double x);

/// Evaluates the forcing at a fixed set of points for many values of q. The
/// q-independent factors (linear part, sine and cosine) are tabulated once.
class ForcingEvaluator
{
public:
  ForcingEvaluator(const BurgersProblem &prob, Eigen::VectorXd x);

  const BurgersProblem &problem() const { return prob_; }
  const Eigen::VectorXd &points() const { return x_; }

  // out[i] = forcing_f(prob.with_q(q), x[i]); out.size() must equal x.size().
  void evaluate(double q, Eigen::Ref<Eigen::VectorXd> out) const;

private:
  BurgersProblem prob_;
  Eigen::VectorXd x_;
  Eigen::VectorXd sin_;
  Eigen::VectorXd cos_;
};

}  // namespace rom2l
