// Copyright The rom2l Authors
// SPDX-License-Identifier: Apache-2.0

#include "rom2l/rom.hpp"

#include <cstring>
#include <fstream>
#include <iomanip>

#include "rom2l/errors.hpp"

namespace rom2l::rom
{

Tensor3 Tensor3::leading(Index r) const
{
  if (r > n_)
  {
    throw DimensionError("Tensor3::leading: r exceeds tensor dimension");
  }
  Tensor3 out(r);
  for (Index i = 0; i < r; ++i)
  {
    out.slice(i) = slice(i).topLeftCorner(r, r);
  }
  return out;
}

Eigen::VectorXd Tensor3::contract(const Eigen::VectorXd &u, const Eigen::VectorXd &v) const
{
  if (u.size() != n_ || v.size() != n_)
  {
    throw DimensionError("Tensor3::contract: vector length mismatch");
  }
  Eigen::VectorXd c(n_);
  for (Index i = 0; i < n_; ++i)
  {
    c[i] = u.dot(slice(i) * v);
  }
  return c;
}

std::shared_ptr<const FixedOperators> FixedOperators::make(Eigen::MatrixXd A_diffusion,
                                                           Eigen::MatrixXd A_mean_convection,
                                                           Tensor3 B, Eigen::VectorXd b_mean)
{
  const Index n = B.dim();
  if (A_diffusion.rows() != n || A_diffusion.cols() != n || A_mean_convection.rows() != n ||
      A_mean_convection.cols() != n || b_mean.size() != n)
  {
    throw DimensionError("FixedOperators: inconsistent operator dimensions");
  }
  auto f = std::make_shared<FixedOperators>();
  f->A = A_diffusion + A_mean_convection;
  f->A_diffusion = std::move(A_diffusion);
  f->A_mean_convection = std::move(A_mean_convection);
  f->b_mean = std::move(b_mean);
  f->B_symmetrized.resize(n * n, n);
  for (Index i = 0; i < n; ++i)
  {
    for (Index k = 0; k < n; ++k)
    {
      for (Index j = 0; j < n; ++j)
      {
        f->B_symmetrized(i + n * k, j) = B(i, j, k) + B(i, k, j);
      }
    }
  }
  f->B = std::move(B);
  return f;
}

RomOperators::RomOperators(std::shared_ptr<const FixedOperators> fixed, Eigen::VectorXd b,
                           RomMeta meta)
  : fixed_(std::move(fixed)), b_(std::move(b)), meta_(meta)
{
  if (!fixed_ || fixed_->B.dim() != b_.size())
  {
    throw DimensionError("RomOperators: load vector does not match operator dimension");
  }
}

RomOperators RomOperators::from_parts(Eigen::MatrixXd A, Tensor3 B, Eigen::VectorXd b,
                                      RomMeta meta)
{
  const Index n = B.dim();
  auto fixed = FixedOperators::make(std::move(A), Eigen::MatrixXd::Zero(n, n), std::move(B),
                                    Eigen::VectorXd::Zero(n));
  return RomOperators(std::move(fixed), std::move(b), meta);
}

RomOperators RomOperators::with_load(Eigen::VectorXd b, double q) const
{
  RomMeta m = meta_;
  m.q = q;
  return RomOperators(fixed_, std::move(b), m);
}

RomOperators RomOperators::leading(Index r) const
{
  if (r < 1 || r > dim())
  {
    throw DimensionError("RomOperators::leading: r out of range");
  }
  auto fixed = FixedOperators::make(fixed_->A_diffusion.topLeftCorner(r, r),
                                    fixed_->A_mean_convection.topLeftCorner(r, r),
                                    fixed_->B.leading(r), fixed_->b_mean.head(r));
  return RomOperators(std::move(fixed), b_.head(r), meta_);
}

std::uint64_t basis_fingerprint(const pod::PodBasis &basis)
{
  // FNV-1a over the raw bytes of mean and modes.
  std::uint64_t hash = 1469598103934665603ull;
  auto mix = [&hash](const double *p, Index count) {
    const auto *bytes = reinterpret_cast<const unsigned char *>(p);
    for (std::size_t i = 0; i < static_cast<std::size_t>(count) * sizeof(double); ++i)
    {
      hash ^= bytes[i];
      hash *= 1099511628211ull;
    }
  };
  mix(basis.mean().coeffs().data(), basis.mean().coeffs().size());
  mix(basis.modes().data(), basis.modes().size());
  return hash;
}

namespace
{

std::shared_ptr<const FixedOperators> assemble_fixed(const Eigen::MatrixXd &P,
                                                     const Eigen::MatrixXd &D,
                                                     const Eigen::VectorXd &m,
                                                     const Eigen::VectorXd &dm,
                                                     const Eigen::VectorXd &w, double nu)
{
  // Entries are plain dot products over the quadrature samples so that every
  // entry is independent of R and nested assemblies agree bitwise.
  const Index R = P.cols();
  const Eigen::MatrixXd WD = w.asDiagonal() * D;
  const Eigen::MatrixXd WP = w.asDiagonal() * P;
  const Eigen::MatrixXd conv = m.asDiagonal() * D + dm.asDiagonal() * P;

  Eigen::MatrixXd A_diff(R, R), A_mc(R, R);
  for (Index i = 0; i < R; ++i)
  {
    for (Index j = 0; j <= i; ++j)
    {
      A_diff(i, j) = nu * D.col(i).dot(WD.col(j));
      A_diff(j, i) = A_diff(i, j);
    }
    for (Index j = 0; j < R; ++j)
    {
      A_mc(i, j) = WP.col(i).dot(conv.col(j));
    }
  }

  Tensor3 B(R);
  Eigen::VectorXd tmp(P.rows());
  for (Index i = 0; i < R; ++i)
  {
    for (Index j = 0; j < R; ++j)
    {
      tmp = WP.col(i).cwiseProduct(P.col(j));
      for (Index k = 0; k < R; ++k)
      {
        B(i, j, k) = tmp.dot(D.col(k));
      }
    }
  }

  const Eigen::VectorXd mdm = m.cwiseProduct(dm);
  Eigen::VectorXd b_mean(R);
  for (Index i = 0; i < R; ++i)
  {
    b_mean[i] = nu * WD.col(i).dot(dm) + WP.col(i).dot(mdm);
  }
  return FixedOperators::make(std::move(A_diff), std::move(A_mc), std::move(B),
                              std::move(b_mean));
}

}  // namespace

RomAssembler::RomAssembler(const pod::PodBasis &basis, const BurgersProblem &prob,
                           Index max_dim)
  : forcing_(prob, fem1d::quadrature_samples(basis.mesh()).x),
    fingerprint_(basis_fingerprint(basis))
{
  if (max_dim < 1 || max_dim > basis.dim())
  {
    throw DimensionError("RomAssembler: requested dimension exceeds the basis");
  }
  const auto &mesh = basis.mesh();
  const auto qs = fem1d::quadrature_samples(mesh);
  const Eigen::MatrixXd modes = basis.modes().leftCols(max_dim);
  const Eigen::MatrixXd P = fem1d::sample_values(mesh, modes);
  const Eigen::MatrixXd D = fem1d::sample_derivatives(mesh, modes);
  const Eigen::VectorXd m = fem1d::sample_values(mesh, basis.mean().coeffs());
  const Eigen::VectorXd dm = fem1d::sample_derivatives(mesh, basis.mean().coeffs());

  phi_q_ = qs.w.asDiagonal() * P;
  auto top = assemble_fixed(P, D, m, dm, qs.w, prob.nu);
  b_mean_ = top->b_mean;

  fixed_.resize(static_cast<std::size_t>(max_dim));
  fixed_.back() = top;
  for (Index r = 1; r < max_dim; ++r)
  {
    fixed_[static_cast<std::size_t>(r - 1)] = FixedOperators::make(
      top->A_diffusion.topLeftCorner(r, r), top->A_mean_convection.topLeftCorner(r, r),
      top->B.leading(r), top->b_mean.head(r));
  }
}

std::shared_ptr<const FixedOperators> RomAssembler::fixed(Index R) const
{
  if (R < 1 || R > max_dim())
  {
    throw DimensionError("RomAssembler: dimension out of range");
  }
  return fixed_[static_cast<std::size_t>(R - 1)];
}

Eigen::VectorXd RomAssembler::load_vector(Index R, double q) const
{
  if (R < 1 || R > max_dim())
  {
    throw DimensionError("RomAssembler: dimension out of range");
  }
  Eigen::VectorXd f(forcing_.points().size());
  forcing_.evaluate(q, f);
  Eigen::VectorXd b = b_mean_.head(R);
  b.noalias() -= phi_q_.leftCols(R).transpose() * f;
  return b;
}

RomOperators RomAssembler::operators(Index R, double q) const
{
  return RomOperators(fixed(R), load_vector(R, q), RomMeta{problem().nu, q, fingerprint_});
}

RomOperators assemble_operators(const pod::PodBasis &basis, Index R, const BurgersProblem &prob)
{
  if (R < 1 || R > basis.dim())
  {
    throw DimensionError("assemble_operators: R exceeds the basis dimension");
  }
  return RomAssembler(basis, prob, R).operators(R, prob.q);
}

namespace
{

void require_dim(const RomOperators &ops, const Eigen::VectorXd &a)
{
  if (a.size() != ops.dim())
  {
    throw DimensionError("coefficient vector length does not match operator dimension");
  }
}

}  // namespace

Eigen::VectorXd residual(const RomOperators &ops, const Eigen::VectorXd &a)
{
  require_dim(ops, a);
  return ops.A() * a + ops.B().contract(a, a) + ops.b();
}

Eigen::MatrixXd jacobian(const RomOperators &ops, const Eigen::VectorXd &a)
{
  require_dim(ops, a);
  const Index n = ops.dim();
  Eigen::MatrixXd J = ops.A();
  const Tensor3 &B = ops.B();
  for (Index i = 0; i < n; ++i)
  {
    // sum_j B_ijk a_j + sum_j B_ikj a_j
    J.row(i) += (B.slice(i).transpose() * a + B.slice(i) * a).transpose();
  }
  return J;
}

std::pair<Eigen::MatrixXd, Eigen::VectorXd> two_level_matrix_rhs(const RomOperators &ops_R,
                                                                 const Eigen::VectorXd &a_r)
{
  const Index R = ops_R.dim();
  if (a_r.size() > R)
  {
    throw DimensionError("two_level_matrix_rhs: coarse dimension exceeds R");
  }
  Eigen::VectorXd padded = Eigen::VectorXd::Zero(R);
  padded.head(a_r.size()) = a_r;
  return {jacobian(ops_R, padded), ops_R.B().contract(padded, padded) - ops_R.b()};
}

void dump_operators_csv(const RomOperators &ops, const std::filesystem::path &prefix)
{
  auto open = [&prefix](const char *name) {
    auto path = prefix;
    path += name;
    std::ofstream os(path);
    if (!os)
    {
      throw IoError("cannot write '" + path.string() + "'");
    }
    os << std::setprecision(17);
    return os;
  };
  const Index n = ops.dim();
  {
    auto os = open("A.csv");
    for (Index i = 0; i < n; ++i)
    {
      for (Index j = 0; j < n; ++j)
      {
        os << ops.A()(i, j) << (j + 1 < n ? "," : "\n");
      }
    }
  }
  {
    auto os = open("b.csv");
    for (Index i = 0; i < n; ++i)
    {
      os << ops.b()[i] << '\n';
    }
  }
  {
    auto os = open("B.csv");
    os << "i,j,k,value\n";
    for (Index i = 0; i < n; ++i)
    {
      for (Index j = 0; j < n; ++j)
      {
        for (Index k = 0; k < n; ++k)
        {
          os << i << ',' << j << ',' << k << ',' << ops.B()(i, j, k) << '\n';
        }
      }
    }
  }
}

}  // namespace rom2l::rom
