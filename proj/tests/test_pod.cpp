// Copyright The rom2l Authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>

#include <Eigen/Dense>

#include "rom2l/errors.hpp"
#include "rom2l/pod.hpp"

using namespace rom2l;
using namespace rom2l::pod;
using fem1d::build_mesh;
using fem1d::interpolate;

namespace
{

const OfflineData &default_offline()
{
  static const OfflineData data =
      build_offline(BurgersProblem{}, QGrid{}, 1.0 / 200.0, InnerProduct::MassWeighted,
                    kDefaultRankTol, 0);
  return data;
}

double mass_norm(const PodBasis &basis, const Eigen::VectorXd &v)
{
  return std::sqrt(v.dot(basis.mass() * v));
}

}  // namespace

TEST_CASE("default sweep gives thirty modes")
{
  const OfflineData &data = default_offline();
  const PodBasis &basis = data.basis;
  CHECK(QGrid{}.values().size() == 801);
  CHECK(basis.dim() == 30);
  CHECK(basis.mesh().n_nodes() == 3201);
  CHECK((basis.gram() - Eigen::MatrixXd::Identity(30, 30)).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(basis.modes().row(0).cwiseAbs().maxCoeff() == 0.0);
  CHECK(basis.modes().row(3200).cwiseAbs().maxCoeff() == 0.0);
  const auto &s = basis.singular_values();
  for (std::size_t j = 1; j < s.size(); ++j)
  {
    CHECK(s[j] <= s[j - 1]);
  }
  CHECK(s.back() / s.front() > kDefaultRankTol);
  // Mean carries the boundary data.
  CHECK(basis.mean().coeffs()[0] == doctest::Approx(1.0));
  CHECK(basis.mean().coeffs()[3200] == doctest::Approx(-1.0));
}

TEST_CASE("tighter tolerance keeps more modes")
{
  const auto q = QGrid{}.values();
  const auto snaps = generate_snapshots(BurgersProblem{}, q, build_mesh(-4, 4, 1.0 / 200), 0);
  const PodBasis tight = compute_pod(snaps, InnerProduct::MassWeighted, 1e-12);
  CHECK(tight.dim() == 42);
  const PodBasis eucl = compute_pod(snaps, InnerProduct::Euclidean, kDefaultRankTol);
  CHECK((eucl.gram() - Eigen::MatrixXd::Identity(eucl.dim(), eucl.dim())).cwiseAbs().maxCoeff() <
        1e-10);
}

TEST_CASE("snapshot mean")
{
  const BurgersProblem prob;
  const auto mesh = build_mesh(-4.0, 4.0, 0.125);
  const std::vector<double> single = {0.3};
  const SnapshotSet one = generate_snapshots(prob, single, mesh);
  CHECK(one.fluctuations.cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(compute_pod(one), DegenerateSnapshots);

  const std::vector<double> pair = {-1.0, 1.0};
  const SnapshotSet two = generate_snapshots(prob, pair, mesh);
  for (Eigen::Index i = 0; i < mesh.n_nodes(); ++i)
  {
    const double x = mesh.node(i);
    const double avg = 0.5 * (exact_u(prob.with_q(-1.0), x) + exact_u(prob.with_q(1.0), x));
    CHECK(two.mean.coeffs()[i] == doctest::Approx(avg).epsilon(1e-14));
  }

  // Two snapshots are +-d about their mean: one mode, sigma_1 = sqrt(2) ||d||.
  const PodBasis basis = compute_pod(two, InnerProduct::MassWeighted, 1e-12);
  REQUIRE(basis.dim() == 1);
  const Eigen::VectorXd d = two.fluctuations.col(0);
  const double dnorm = fem1d::l2_norm(fem1d::FeFunction(mesh, d));
  CHECK(basis.singular_values()[0] == doctest::Approx(std::sqrt(2.0) * dnorm));
  const auto u0 = interpolate(mesh, [&](double x) { return exact_u(prob.with_q(-1.0), x); });
  CHECK(std::abs(project(basis, u0, 1)[0]) == doctest::Approx(dnorm));
}

TEST_CASE("synthetic low-rank sets")
{
  const auto mesh = build_mesh(0.0, 1.0, 1.0 / 32.0);
  const auto g1 = interpolate(mesh, [](double x) { return std::sin(std::numbers::pi * x); });
  const auto g2 = interpolate(mesh, [](double x) { return x * (1.0 - x) * (x - 0.3); });
  std::mt19937 gen(3);
  std::normal_distribution<double> dist;
  const int m = 12;
  Eigen::MatrixXd F(mesh.n_nodes(), m);
  for (int j = 0; j < m; ++j)
  {
    F.col(j) = dist(gen) * g1.coeffs() + dist(gen) * g2.coeffs();
  }
  const Eigen::VectorXd mean = F.rowwise().mean();
  F.colwise() -= mean;
  SnapshotSet snaps{mesh, std::vector<double>(m, 0.0), fem1d::FeFunction(mesh, mean), F};
  const PodBasis basis = compute_pod(snaps, InnerProduct::MassWeighted, 1e-10);
  CHECK(basis.dim() == 2);

  // Every snapshot lies in the span, so lift(project(.)) reproduces it.
  for (int j = 0; j < m; ++j)
  {
    const fem1d::FeFunction u(mesh, F.col(j) + mean);
    const auto back = lift(basis, project(basis, u, 2));
    CHECK((back.coeffs() - u.coeffs()).cwiseAbs().maxCoeff() < 1e-12);
  }
  CHECK(project(basis, snaps.mean, 2).norm() < 1e-14);
  CHECK_THROWS_AS(project(basis, snaps.mean, 3), DimensionError);
  CHECK_THROWS_AS(lift(basis, Eigen::VectorXd::Zero(3)), DimensionError);
}

TEST_CASE("truncation energy identity")
{
  const BurgersProblem prob;
  const auto mesh = build_mesh(-4.0, 4.0, 0.25);
  const std::vector<double> q = QGrid{-2.0, 2.0, 0.5}.values();
  const SnapshotSet snaps = generate_snapshots(prob, q, mesh);
  const PodBasis basis = compute_pod(snaps, InnerProduct::MassWeighted, 1e-14);
  const auto &s = basis.singular_values();
  REQUIRE(basis.dim() >= 5);
  for (Eigen::Index r = 1; r < basis.dim(); ++r)
  {
    double err2 = 0.0;
    for (std::size_t j = 0; j < q.size(); ++j)
    {
      const fem1d::FeFunction u(mesh, snaps.fluctuations.col(static_cast<Eigen::Index>(j)) +
                                          snaps.mean.coeffs());
      const auto back = lift(basis, project(basis, u, r));
      err2 += std::pow(mass_norm(basis, u.coeffs() - back.coeffs()), 2);
    }
    double tail = 0.0;
    for (std::size_t j = static_cast<std::size_t>(r); j < s.size(); ++j)
    {
      tail += s[j] * s[j];
    }
    CHECK(std::sqrt(err2) == doctest::Approx(std::sqrt(tail)).epsilon(1e-6));
  }
}

TEST_CASE("inner product names")
{
  CHECK(inner_product_from_string("mass") == InnerProduct::MassWeighted);
  CHECK(inner_product_from_string("euclidean") == InnerProduct::Euclidean);
  CHECK(inner_product_from_string(to_string(InnerProduct::MassWeighted)) ==
        InnerProduct::MassWeighted);
  CHECK_THROWS_AS(inner_product_from_string("bogus"), UsageError);
}

TEST_CASE("offline data round trip")
{
  const OfflineData data = build_offline(BurgersProblem{}, QGrid{-4.0, 4.0, 0.1}, 0.125);
  const auto dir = std::filesystem::temp_directory_path() / "rom2l_test_pod";
  std::filesystem::create_directories(dir);
  const auto path = dir / "basis.json";
  save_offline(data, path);
  const OfflineData back = load_offline(path);
  CHECK(back.basis.dim() == data.basis.dim());
  CHECK(back.basis.mesh() == data.basis.mesh());
  CHECK(back.basis.modes() == data.basis.modes());
  CHECK(back.basis.mean().coeffs() == data.basis.mean().coeffs());
  CHECK(back.basis.singular_values() == data.basis.singular_values());
  CHECK(back.problem.nu == data.problem.nu);
  CHECK(back.grid.step == data.grid.step);
  CHECK_THROWS_AS(load_offline(dir / "missing.json"), IoError);
  std::filesystem::remove_all(dir);
}
