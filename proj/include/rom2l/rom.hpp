// Copyright The rom2l Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "rom2l/manufactured.hpp"
#include "rom2l/pod.hpp"

namespace rom2l::rom
{

using Eigen::Index;

/// Dense n x n x n tensor. slice(i) is the n x n matrix (j,k) -> T(i,j,k).
class Tensor3
{
public:
  explicit Tensor3(Index n = 0) : n_(n), data_(static_cast<std::size_t>(n * n * n), 0.0) {}

  Index dim() const { return n_; }

  double &operator()(Index i, Index j, Index k) { return data_[offset(i, j, k)]; }
  double operator()(Index i, Index j, Index k) const { return data_[offset(i, j, k)]; }

  Eigen::Map<Eigen::MatrixXd> slice(Index i) { return {data_.data() + i * n_ * n_, n_, n_}; }
  Eigen::Map<const Eigen::MatrixXd> slice(Index i) const
  {
    return {data_.data() + i * n_ * n_, n_, n_};
  }

  // T(i,j,k) for i,j,k < r.
  Tensor3 leading(Index r) const;

  // c_i = sum_jk T(i,j,k) u_j v_k
  Eigen::VectorXd contract(const Eigen::VectorXd &u, const Eigen::VectorXd &v) const;

private:
  std::size_t offset(Index i, Index j, Index k) const
  {
    return static_cast<std::size_t>(i * n_ * n_ + k * n_ + j);
  }

  Index n_;
  std::vector<double> data_;
};

/// Parameter-independent part of the reduced system.
struct FixedOperators
{
  Eigen::MatrixXd A_diffusion;        // nu (phi_j', phi_i')
  Eigen::MatrixXd A_mean_convection;  // (mean phi_j' + mean' phi_j, phi_i)
  Eigen::MatrixXd A;                  // sum of the two
  Tensor3 B;                          // (phi_j phi_k', phi_i)
  Eigen::VectorXd b_mean;             // nu (mean', phi_i') + (mean mean', phi_i)
  // Row i + R*k, column j holds B_ijk + B_ikj, so reshaping S a to R x R gives
  // the convection part of the Jacobian.
  Eigen::MatrixXd B_symmetrized;

  static std::shared_ptr<const FixedOperators> make(Eigen::MatrixXd A_diffusion,
                                                    Eigen::MatrixXd A_mean_convection,
                                                    Tensor3 B, Eigen::VectorXd b_mean);
};

struct RomMeta
{
  double nu = 0.0;
  double q = 0.0;
  std::uint64_t basis_fingerprint = 0;
};

/// Reduced steady Burgers system; its residual is A a + B(a,a) + b.
class RomOperators
{
public:
  RomOperators(std::shared_ptr<const FixedOperators> fixed, Eigen::VectorXd b, RomMeta meta);

  // Synthetic system with no mean-convection split (A is taken as diffusion).
  static RomOperators from_parts(Eigen::MatrixXd A, Tensor3 B, Eigen::VectorXd b,
                                 RomMeta meta = {});

  Index dim() const { return b_.size(); }
  const Eigen::MatrixXd &A() const { return fixed_->A; }
  const Eigen::MatrixXd &A_diffusion() const { return fixed_->A_diffusion; }
  const Eigen::MatrixXd &A_mean_convection() const { return fixed_->A_mean_convection; }
  const Tensor3 &B() const { return fixed_->B; }
  const Eigen::MatrixXd &B_symmetrized() const { return fixed_->B_symmetrized; }
  const Eigen::VectorXd &b() const { return b_; }
  const RomMeta &meta() const { return meta_; }
  const std::shared_ptr<const FixedOperators> &fixed() const { return fixed_; }

  RomOperators with_load(Eigen::VectorXd b, double q) const;
  // Leading r-blocks of A, B and b.
  RomOperators leading(Index r) const;

private:
  std::shared_ptr<const FixedOperators> fixed_;
  Eigen::VectorXd b_;
  RomMeta meta_;
};

/// Precomputes mode samples at the quadrature points and the fixed operators
/// for every dimension 1..max_dim, so that per-q work is one forcing
/// evaluation plus a matrix-vector product.
class RomAssembler
{
public:
  RomAssembler(const pod::PodBasis &basis, const BurgersProblem &prob, Index max_dim);

  Index max_dim() const { return static_cast<Index>(fixed_.size()); }
  const BurgersProblem &problem() const { return forcing_.problem(); }
  std::uint64_t fingerprint() const { return fingerprint_; }

  std::shared_ptr<const FixedOperators> fixed(Index R) const;

  // b_i = -(f_q, phi_i) + nu (mean', phi_i') + (mean mean', phi_i), i < R.
  Eigen::VectorXd load_vector(Index R, double q) const;

  RomOperators operators(Index R, double q) const;

private:
  Eigen::MatrixXd phi_q_;  // weighted mode values at quadrature points, nq x max_dim
  Eigen::VectorXd b_mean_;
  ForcingEvaluator forcing_;
  std::vector<std::shared_ptr<const FixedOperators>> fixed_;
  std::uint64_t fingerprint_;
};

std::uint64_t basis_fingerprint(const pod::PodBasis &basis);

/// Throws DimensionError if R exceeds the basis dimension.
RomOperators assemble_operators(const pod::PodBasis &basis, Index R, const BurgersProblem &prob);

Eigen::VectorXd residual(const RomOperators &ops, const Eigen::VectorXd &a);
Eigen::MatrixXd jacobian(const RomOperators &ops, const Eigen::VectorXd &a);

/// Linear step of the two-level method about the coarse solution a_r padded
/// with zeros to the dimension of ops_R:
///   Mlin_ik = A_ik + sum_j (B_ijk + B_ikj) a~_j,  rhs_i = B(a~,a~)_i - b_i.
std::pair<Eigen::MatrixXd, Eigen::VectorXd> two_level_matrix_rhs(const RomOperators &ops_R,
                                                                 const Eigen::VectorXd &a_r);

// Writes <prefix>A.csv, <prefix>b.csv and <prefix>B.csv (rows i,j,k,value).
void dump_operators_csv(const RomOperators &ops, const std::filesystem::path &prefix);

}  // namespace rom2l::rom
