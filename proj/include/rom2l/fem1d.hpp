// Copyright The rom2l Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace rom2l::fem1d
{

using Index = Eigen::Index;
using SparseMatrix = Eigen::SparseMatrix<double>;
using ScalarFunction = std::function<double(double)>;

// Uniform mesh of quadratic Lagrange elements on [a,b]. Element e owns the
// global nodes 2e (left vertex), 2e+1 (midpoint) and 2e+2 (right vertex).
// Copies share the immutable node array.
class Mesh1D
{
public:
  static constexpr int kNodesPerElement = 3;

  Mesh1D(double a, double b, Index n_elems);

  double a() const { return data_->a; }
  double b() const { return data_->b; }
  double h() const { return (data_->b - data_->a) / static_cast<double>(data_->n_elems); }
  Index n_elems() const { return data_->n_elems; }
  Index n_nodes() const { return 2 * data_->n_elems + 1; }
  Index n_interior() const { return n_nodes() - 2; }

  std::span<const double> nodes() const { return data_->nodes; }
  double node(Index i) const { return data_->nodes[static_cast<std::size_t>(i)]; }
  double element_left(Index e) const { return node(2 * e); }

  std::array<Index, 3> element_dofs(Index e) const { return {2 * e, 2 * e + 1, 2 * e + 2}; }

  // Geometric equality (same interval and element count).
  bool operator==(const Mesh1D &other) const;

private:
  struct Data
  {
    double a;
    double b;
    Index n_elems;
    std::vector<double> nodes;
  };
  std::shared_ptr<const Data> data_;
};

// Throws InvalidMesh unless a < b and (b-a)/h is an integer to within 1e-9.
Mesh1D build_mesh(double a, double b, double h);

/// Gauss-Legendre rule on the reference interval [-1,1].
struct GaussRule
{
  std::vector<double> points;
  std::vector<double> weights;
};

// n in [1,5].
const GaussRule &gauss_legendre(int n);

/// Quadratic Lagrange shape functions on [-1,1] with nodes -1, 0, 1.
std::array<double, 3> shape_values(double t);
/// Derivatives of the shape functions with respect to the reference coordinate.
std::array<double, 3> shape_derivatives(double t);

class FeFunction
{
public:
  explicit FeFunction(Mesh1D mesh);
  FeFunction(Mesh1D mesh, Eigen::VectorXd coeffs);

  const Mesh1D &mesh() const { return mesh_; }
  const Eigen::VectorXd &coeffs() const { return coeffs_; }

  // Point evaluation; x is clamped to [a,b].
  double value(double x) const;
  double derivative(double x) const;

  FeFunction operator+(const FeFunction &other) const;
  FeFunction operator-(const FeFunction &other) const;
  FeFunction operator*(double s) const;

private:
  Mesh1D mesh_;
  Eigen::VectorXd coeffs_;
};

// Throws MeshMismatch.
void require_same_mesh(const Mesh1D &m1, const Mesh1D &m2);

/// Mass and stiffness matrices, both on the full node set and restricted to the
/// interior nodes (first and last node eliminated).
struct AssembledForms
{
  SparseMatrix mass_full;
  SparseMatrix stiffness_full;
  SparseMatrix mass;
  SparseMatrix stiffness;
};

AssembledForms assemble_mass_stiffness(const Mesh1D &mesh);

// Drops the first and last row/column.
SparseMatrix restrict_to_interior(const SparseMatrix &full);

/// Physical quadrature points and weights (Jacobian included), ordered element
/// by element: sample e*n + g is Gauss point g of element e.
struct QuadratureSamples
{
  Eigen::VectorXd x;
  Eigen::VectorXd w;
};

QuadratureSamples quadrature_samples(const Mesh1D &mesh, int n_points = 3);

// Values (resp. x-derivatives) at the quadrature samples of every column of
// `coeffs` (n_nodes rows).
Eigen::MatrixXd sample_values(const Mesh1D &mesh, const Eigen::MatrixXd &coeffs,
                              int n_points = 3);
Eigen::MatrixXd sample_derivatives(const Mesh1D &mesh, const Eigen::MatrixXd &coeffs,
                                   int n_points = 3);

FeFunction interpolate(const Mesh1D &mesh, const ScalarFunction &f);

double l2_norm(const FeFunction &u);
double h1_seminorm(const FeFunction &u);

// ||u - f||_0 with a 5-point Gauss rule per element.
double l2_error(const FeFunction &u, const ScalarFunction &f);

/// b(u;v,w) = \int u v' w dx.
double trilinear_b(const FeFunction &u, const FeFunction &v, const FeFunction &w);
/// b_skew(u;v,w) = (b(u;v,w) - b(u;w,v)) / 2.
double trilinear_b_skew(const FeFunction &u, const FeFunction &v, const FeFunction &w);

}  // namespace rom2l::fem1d
