// Copyright The rom2l Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "rom2l/fem1d.hpp"
#include "rom2l/manufactured.hpp"

namespace rom2l::pod
{

using fem1d::FeFunction;
using fem1d::Mesh1D;

enum class InnerProduct
{
  MassWeighted,
  Euclidean
};

std::string to_string(InnerProduct ip);
// Accepts "mass"/"mass_weighted"/"l2" and "euclidean"/"identity".
InnerProduct inner_product_from_string(const std::string &s);

// Relative singular-value cutoff that yields 30 modes for the default
// 801-snapshot sweep; the spectrum drops from 4.4e-7 to 8.0e-8 between
// modes 30 and 31.
inline constexpr double kDefaultRankTol = 2e-7;

/// Inclusive parameter grid start:step:end.
struct QGrid
{
  double start = -4.0;
  double end = 4.0;
  double step = 0.01;

  std::vector<double> values() const;
};

struct SnapshotSet
{
  Mesh1D mesh;
  std::vector<double> q_values;
  FeFunction mean;
  // n_nodes x M, column j is the snapshot for q_values[j] minus the mean.
  Eigen::MatrixXd fluctuations;
};

/// Interpolates exact_u(., q) for every q, subtracts the columnwise mean.
/// Uses up to `threads` worker threads (0 = hardware concurrency).
SnapshotSet generate_snapshots(const BurgersProblem &prob, std::span<const double> q_values,
                               const Mesh1D &mesh, unsigned threads = 1);

class PodBasis
{
public:
  PodBasis(Mesh1D mesh, Eigen::MatrixXd modes, std::vector<double> singular_values,
           FeFunction mean, InnerProduct inner_product);

  const Mesh1D &mesh() const { return mesh_; }
  const Eigen::MatrixXd &modes() const { return modes_; }
  const std::vector<double> &singular_values() const { return singular_values_; }
  const FeFunction &mean() const { return mean_; }
  InnerProduct inner_product() const { return inner_product_; }
  // Full (boundary-inclusive) FE mass matrix of the mesh.
  const fem1d::SparseMatrix &mass() const { return mass_; }

  Eigen::Index dim() const { return modes_.cols(); }

  // Gram matrix of the modes in the basis' own inner product.
  Eigen::MatrixXd gram() const;

private:
  Mesh1D mesh_;
  Eigen::MatrixXd modes_;
  std::vector<double> singular_values_;
  FeFunction mean_;
  InnerProduct inner_product_;
  fem1d::SparseMatrix mass_;
};

/// Throws DegenerateSnapshots if every fluctuation is zero.
PodBasis compute_pod(const SnapshotSet &snaps, InnerProduct inner_product = InnerProduct::MassWeighted,
                     double rank_tol = kDefaultRankTol);

// Coefficients of u - mean on the first r modes. Throws DimensionError if r > dim.
Eigen::VectorXd project(const PodBasis &basis, const FeFunction &u, Eigen::Index r);
// mean + sum_j a_j phi_j. Throws DimensionError if a.size() > dim.
FeFunction lift(const PodBasis &basis, const Eigen::VectorXd &a);

/// Everything the online stage needs from an offline run.
struct OfflineData
{
  BurgersProblem problem;
  QGrid grid;
  PodBasis basis;
};

OfflineData build_offline(const BurgersProblem &problem, const QGrid &grid, double h,
                          InnerProduct inner_product = InnerProduct::MassWeighted,
                          double rank_tol = kDefaultRankTol, unsigned threads = 1);

// Writes <path> (JSON header) and <path>.bin (little-endian doubles: mean, then
// the modes column by column). Throws IoError.
void save_offline(const OfflineData &data, const std::filesystem::path &path);
OfflineData load_offline(const std::filesystem::path &path);

}  // namespace rom2l::pod
