// Copyright The rom2l Authors
// SPDX-License-Identifier: Apache-2.0

#include "rom2l/manufactured.hpp"

#include <cmath>
#include <numbers>

#include "rom2l/errors.hpp"

namespace rom2l
{

namespace
{

struct Pieces
{
  double amp;    // 1/(sqrt(2 pi) sigma)
  double omega;  // k pi / (b-a)
  double slope;  // -2/(b-a)
};

Pieces pieces(const BurgersProblem &p)
{
  return {1.0 / (std::sqrt(2.0 * std::numbers::pi) * p.sigma),
          static_cast<double>(p.k) * std::numbers::pi / (p.b - p.a), -2.0 / (p.b - p.a)};
}

}  // namespace

void BurgersProblem::validate() const
{
  if (!(a < b))
  {
    throw Error("BurgersProblem: need a < b");
  }
  if (!(nu > 0.0))
  {
    throw Error("BurgersProblem: nu must be positive");
  }
  if (!(sigma > 0.0))
  {
    throw Error("BurgersProblem: sigma must be positive");
  }
  if (std::abs(exact_u(*this, a) - alpha) > 1e-12 || std::abs(exact_u(*this, b) - beta) > 1e-12)
  {
    throw Error("BurgersProblem: boundary values do not match the exact solution");
  }
}

double exact_u(const BurgersProblem &p, double x)
{
  const auto [amp, omega, slope] = pieces(p);
  const double d = x - p.q;
  const double g = std::exp(-d * d / (2.0 * p.sigma * p.sigma));
  return 1.0 + slope * (x - p.a) + amp * g * std::sin(omega * (x - p.a));
}

double exact_du(const BurgersProblem &p, double x)
{
  const auto [amp, omega, slope] = pieces(p);
  const double s2 = p.sigma * p.sigma;
  const double d = x - p.q;
  const double g = std::exp(-d * d / (2.0 * s2));
  const double dg = -d / s2 * g;
  const double th = omega * (x - p.a);
  return slope + amp * (dg * std::sin(th) + g * omega * std::cos(th));
}

double exact_d2u(const BurgersProblem &p, double x)
{
  const auto [amp, omega, slope] = pieces(p);
  const double s2 = p.sigma * p.sigma;
  const double d = x - p.q;
  const double g = std::exp(-d * d / (2.0 * s2));
  const double dg = -d / s2 * g;
  const double d2g = (d * d / (s2 * s2) - 1.0 / s2) * g;
  const double th = omega * (x - p.a);
  const double s = std::sin(th), c = std::cos(th);
  return amp * (d2g * s + 2.0 * dg * omega * c - g * omega * omega * s);
}

double forcing_f(const BurgersProblem &p, double x)
{
  return -p.nu * exact_d2u(p, x) + exact_u(p, x) * exact_du(p, x);
}

ForcingEvaluator::ForcingEvaluator(const BurgersProblem &prob, Eigen::VectorXd x)
  : prob_(prob), x_(std::move(x)), sin_(x_.size()), cos_(x_.size())
{
  const double omega = pieces(prob_).omega;
  for (Eigen::Index i = 0; i < x_.size(); ++i)
  {
    sin_[i] = std::sin(omega * (x_[i] - prob_.a));
    cos_[i] = std::cos(omega * (x_[i] - prob_.a));
  }
}

void ForcingEvaluator::evaluate(double q, Eigen::Ref<Eigen::VectorXd> out) const
{
  if (out.size() != x_.size())
  {
    throw DimensionError("ForcingEvaluator: output size mismatch");
  }
  const auto [amp, omega, slope] = pieces(prob_);
  const double s2 = prob_.sigma * prob_.sigma;
  const double inv2s2 = 1.0 / (2.0 * s2);
  const double nu = prob_.nu;
  for (Eigen::Index i = 0; i < x_.size(); ++i)
  {
    const double x = x_[i];
    const double d = x - q;
    const double g = std::exp(-d * d * inv2s2);
    const double dg = -d / s2 * g;
    const double d2g = (d * d / (s2 * s2) - 1.0 / s2) * g;
    const double s = sin_[i], c = cos_[i];
    const double u = 1.0 + slope * (x - prob_.a) + amp * g * s;
    const double du = slope + amp * (dg * s + g * omega * c);
    const double d2u = amp * (d2g * s + 2.0 * dg * omega * c - g * omega * omega * s);
    out[i] = -nu * d2u + u * du;
  }
}

}  // namespace rom2l
