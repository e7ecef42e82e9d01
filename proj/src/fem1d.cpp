// Copyright The rom2l Authors
// SPDX-License-Identifier: Apache-2.0

#include "rom2l/fem1d.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rom2l/errors.hpp"

namespace rom2l::fem1d
{

Mesh1D::Mesh1D(double a, double b, Index n_elems)
{
  if (!(a < b) || n_elems < 1)
  {
    throw InvalidMesh("mesh needs a < b and at least one element");
  }
  Data d{a, b, n_elems, {}};
  const Index n = 2 * n_elems + 1;
  d.nodes.resize(static_cast<std::size_t>(n));
  const double dx = (b - a) / static_cast<double>(n - 1);
  for (Index i = 0; i < n; ++i)
  {
    d.nodes[static_cast<std::size_t>(i)] = a + static_cast<double>(i) * dx;
  }
  d.nodes.back() = b;
  data_ = std::make_shared<const Data>(std::move(d));
}

bool Mesh1D::operator==(const Mesh1D &other) const
{
  if (data_ == other.data_)
  {
    return true;
  }
  return data_->a == other.data_->a && data_->b == other.data_->b &&
         data_->n_elems == other.data_->n_elems;
}

Mesh1D build_mesh(double a, double b, double h)
{
  if (!(a < b) || !(h > 0.0))
  {
    throw InvalidMesh("build_mesh: need a < b and h > 0");
  }
  const double ratio = (b - a) / h;
  const double n = std::round(ratio);
  if (n < 1.0 || std::abs(ratio - n) > 1e-9 * std::max(1.0, n))
  {
    std::ostringstream msg;
    msg << "build_mesh: (b-a)/h = " << ratio << " is not an integer element count";
    throw InvalidMesh(msg.str());
  }
  return Mesh1D(a, b, static_cast<Index>(n));
}

const GaussRule &gauss_legendre(int n)
{
  static const std::array<GaussRule, 5> rules = [] {
    std::array<GaussRule, 5> r;
    r[0] = {{0.0}, {2.0}};
    const double p2 = 1.0 / std::sqrt(3.0);
    r[1] = {{-p2, p2}, {1.0, 1.0}};
    const double p3 = std::sqrt(0.6);
    r[2] = {{-p3, 0.0, p3}, {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0}};
    const double s = 2.0 * std::sqrt(1.2);
    const double a4 = std::sqrt(3.0 / 7.0 - s / 7.0), b4 = std::sqrt(3.0 / 7.0 + s / 7.0);
    const double wa = (18.0 + std::sqrt(30.0)) / 36.0, wb = (18.0 - std::sqrt(30.0)) / 36.0;
    r[3] = {{-b4, -a4, a4, b4}, {wb, wa, wa, wb}};
    const double t = 2.0 * std::sqrt(10.0 / 7.0);
    const double a5 = std::sqrt(5.0 - t) / 3.0, b5 = std::sqrt(5.0 + t) / 3.0;
    const double w0 = 128.0 / 225.0;
    const double w1 = (322.0 + 13.0 * std::sqrt(70.0)) / 900.0;
    const double w2 = (322.0 - 13.0 * std::sqrt(70.0)) / 900.0;
    r[4] = {{-b5, -a5, 0.0, a5, b5}, {w2, w1, w0, w1, w2}};
    return r;
  }();
  if (n < 1 || n > 5)
  {
    throw Error("gauss_legendre: supported orders are 1..5");
  }
  return rules[static_cast<std::size_t>(n - 1)];
}

std::array<double, 3> shape_values(double t)
{
  return {0.5 * t * (t - 1.0), 1.0 - t * t, 0.5 * t * (t + 1.0)};
}

std::array<double, 3> shape_derivatives(double t)
{
  return {t - 0.5, -2.0 * t, t + 0.5};
}

FeFunction::FeFunction(Mesh1D mesh)
  : mesh_(std::move(mesh)), coeffs_(Eigen::VectorXd::Zero(mesh_.n_nodes()))
{
}

FeFunction::FeFunction(Mesh1D mesh, Eigen::VectorXd coeffs)
  : mesh_(std::move(mesh)), coeffs_(std::move(coeffs))
{
  if (coeffs_.size() != mesh_.n_nodes())
  {
    throw DimensionError("FeFunction: coefficient count does not match node count");
  }
}

namespace
{

// Element index and reference coordinate for a point in [a,b].
std::pair<Index, double> locate(const Mesh1D &mesh, double x)
{
  x = std::clamp(x, mesh.a(), mesh.b());
  const double h = mesh.h();
  auto e = static_cast<Index>(std::floor((x - mesh.a()) / h));
  e = std::clamp<Index>(e, 0, mesh.n_elems() - 1);
  const double xm = mesh.element_left(e) + 0.5 * h;
  return {e, 2.0 * (x - xm) / h};
}

}  // namespace

double FeFunction::value(double x) const
{
  const auto [e, t] = locate(mesh_, x);
  const auto N = shape_values(t);
  const auto dofs = mesh_.element_dofs(e);
  return N[0] * coeffs_[dofs[0]] + N[1] * coeffs_[dofs[1]] + N[2] * coeffs_[dofs[2]];
}

double FeFunction::derivative(double x) const
{
  const auto [e, t] = locate(mesh_, x);
  const auto dN = shape_derivatives(t);
  const auto dofs = mesh_.element_dofs(e);
  const double scale = 2.0 / mesh_.h();
  return scale *
         (dN[0] * coeffs_[dofs[0]] + dN[1] * coeffs_[dofs[1]] + dN[2] * coeffs_[dofs[2]]);
}

FeFunction FeFunction::operator+(const FeFunction &other) const
{
  require_same_mesh(mesh_, other.mesh_);
  return FeFunction(mesh_, coeffs_ + other.coeffs_);
}

FeFunction FeFunction::operator-(const FeFunction &other) const
{
  require_same_mesh(mesh_, other.mesh_);
  return FeFunction(mesh_, coeffs_ - other.coeffs_);
}

FeFunction FeFunction::operator*(double s) const
{
  return FeFunction(mesh_, coeffs_ * s);
}

void require_same_mesh(const Mesh1D &m1, const Mesh1D &m2)
{
  if (!(m1 == m2))
  {
    throw MeshMismatch("finite element functions live on different meshes");
  }
}

AssembledForms assemble_mass_stiffness(const Mesh1D &mesh)
{
  const GaussRule &rule = gauss_legendre(3);
  const double h = mesh.h();
  const double jac = 0.5 * h;

  // Element matrices are identical on a uniform mesh.
  Eigen::Matrix3d me = Eigen::Matrix3d::Zero();
  Eigen::Matrix3d ke = Eigen::Matrix3d::Zero();
  for (std::size_t g = 0; g < rule.points.size(); ++g)
  {
    const auto N = shape_values(rule.points[g]);
    const auto dN = shape_derivatives(rule.points[g]);
    for (int i = 0; i < 3; ++i)
    {
      for (int j = 0; j < 3; ++j)
      {
        me(i, j) += rule.weights[g] * jac * N[i] * N[j];
        ke(i, j) += rule.weights[g] * jac * (dN[i] / jac) * (dN[j] / jac);
      }
    }
  }

  std::vector<Eigen::Triplet<double>> mt, kt;
  mt.reserve(static_cast<std::size_t>(9 * mesh.n_elems()));
  kt.reserve(static_cast<std::size_t>(9 * mesh.n_elems()));
  for (Index e = 0; e < mesh.n_elems(); ++e)
  {
    const auto dofs = mesh.element_dofs(e);
    for (int i = 0; i < 3; ++i)
    {
      for (int j = 0; j < 3; ++j)
      {
        mt.emplace_back(dofs[i], dofs[j], me(i, j));
        kt.emplace_back(dofs[i], dofs[j], ke(i, j));
      }
    }
  }

  AssembledForms forms;
  const Index n = mesh.n_nodes();
  forms.mass_full.resize(n, n);
  forms.stiffness_full.resize(n, n);
  forms.mass_full.setFromTriplets(mt.begin(), mt.end());
  forms.stiffness_full.setFromTriplets(kt.begin(), kt.end());
  forms.mass = restrict_to_interior(forms.mass_full);
  forms.stiffness = restrict_to_interior(forms.stiffness_full);
  return forms;
}

SparseMatrix restrict_to_interior(const SparseMatrix &full)
{
  const Index n = full.rows() - 2;
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(static_cast<std::size_t>(full.nonZeros()));
  for (Index col = 0; col < full.outerSize(); ++col)
  {
    for (SparseMatrix::InnerIterator it(full, col); it; ++it)
    {
      const Index r = it.row() - 1, c = it.col() - 1;
      if (r >= 0 && r < n && c >= 0 && c < n)
      {
        t.emplace_back(r, c, it.value());
      }
    }
  }
  SparseMatrix out(n, n);
  out.setFromTriplets(t.begin(), t.end());
  return out;
}

QuadratureSamples quadrature_samples(const Mesh1D &mesh, int n_points)
{
  const GaussRule &rule = gauss_legendre(n_points);
  const double h = mesh.h();
  QuadratureSamples s;
  s.x.resize(mesh.n_elems() * n_points);
  s.w.resize(mesh.n_elems() * n_points);
  for (Index e = 0; e < mesh.n_elems(); ++e)
  {
    const double xm = mesh.element_left(e) + 0.5 * h;
    for (int g = 0; g < n_points; ++g)
    {
      s.x[e * n_points + g] = xm + 0.5 * h * rule.points[static_cast<std::size_t>(g)];
      s.w[e * n_points + g] = 0.5 * h * rule.weights[static_cast<std::size_t>(g)];
    }
  }
  return s;
}

namespace
{

template <typename ShapeFn>
Eigen::MatrixXd sample(const Mesh1D &mesh, const Eigen::MatrixXd &coeffs, int n_points,
                       ShapeFn shape, double scale)
{
  if (coeffs.rows() != mesh.n_nodes())
  {
    throw DimensionError("sample: coefficient rows do not match node count");
  }
  const GaussRule &rule = gauss_legendre(n_points);
  Eigen::MatrixXd out(mesh.n_elems() * n_points, coeffs.cols());
  for (Index e = 0; e < mesh.n_elems(); ++e)
  {
    const auto dofs = mesh.element_dofs(e);
    for (int g = 0; g < n_points; ++g)
    {
      const auto N = shape(rule.points[static_cast<std::size_t>(g)]);
      out.row(e * n_points + g) = scale * (N[0] * coeffs.row(dofs[0]) +
                                           N[1] * coeffs.row(dofs[1]) +
                                           N[2] * coeffs.row(dofs[2]));
    }
  }
  return out;
}

}  // namespace

Eigen::MatrixXd sample_values(const Mesh1D &mesh, const Eigen::MatrixXd &coeffs, int n_points)
{
  return sample(mesh, coeffs, n_points, shape_values, 1.0);
}

Eigen::MatrixXd sample_derivatives(const Mesh1D &mesh, const Eigen::MatrixXd &coeffs,
                                   int n_points)
{
  return sample(mesh, coeffs, n_points, shape_derivatives, 2.0 / mesh.h());
}

FeFunction interpolate(const Mesh1D &mesh, const ScalarFunction &f)
{
  Eigen::VectorXd c(mesh.n_nodes());
  for (Index i = 0; i < mesh.n_nodes(); ++i)
  {
    c[i] = f(mesh.node(i));
  }
  return FeFunction(mesh, std::move(c));
}

double l2_norm(const FeFunction &u)
{
  const auto q = quadrature_samples(u.mesh());
  const Eigen::VectorXd v = sample_values(u.mesh(), u.coeffs());
  return std::sqrt(q.w.dot(v.cwiseAbs2()));
}

double h1_seminorm(const FeFunction &u)
{
  const auto q = quadrature_samples(u.mesh());
  const Eigen::VectorXd d = sample_derivatives(u.mesh(), u.coeffs());
  return std::sqrt(q.w.dot(d.cwiseAbs2()));
}

double l2_error(const FeFunction &u, const ScalarFunction &f)
{
  constexpr int n_points = 5;
  const auto q = quadrature_samples(u.mesh(), n_points);
  const Eigen::VectorXd v = sample_values(u.mesh(), u.coeffs(), n_points);
  double sum = 0.0;
  for (Index i = 0; i < q.x.size(); ++i)
  {
    const double diff = v[i] - f(q.x[i]);
    sum += q.w[i] * diff * diff;
  }
  return std::sqrt(sum);
}

double trilinear_b(const FeFunction &u, const FeFunction &v, const FeFunction &w)
{
  require_same_mesh(u.mesh(), v.mesh());
  require_same_mesh(u.mesh(), w.mesh());
  const Mesh1D &mesh = u.mesh();
  const auto q = quadrature_samples(mesh);
  const Eigen::VectorXd uq = sample_values(mesh, u.coeffs());
  const Eigen::VectorXd dvq = sample_derivatives(mesh, v.coeffs());
  const Eigen::VectorXd wq = sample_values(mesh, w.coeffs());
  return (q.w.array() * uq.array() * dvq.array() * wq.array()).sum();
}

double trilinear_b_skew(const FeFunction &u, const FeFunction &v, const FeFunction &w)
{
  return 0.5 * (trilinear_b(u, v, w) - trilinear_b(u, w, v));
}

}  // namespace rom2l::fem1d
