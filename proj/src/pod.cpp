// Copyright The rom2l Authors
// SPDX-License-Identifier: Apache-2.0

#include "rom2l/pod.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <thread>

#include <Eigen/SVD>
#include <Eigen/SparseCholesky>
#include <json.hpp>

#include "rom2l/errors.hpp"

namespace rom2l::pod
{

using Eigen::Index;
using json = nlohmann::json;

std::string to_string(InnerProduct ip)
{
  return ip == InnerProduct::MassWeighted ? "mass_weighted" : "euclidean";
}

InnerProduct inner_product_from_string(const std::string &s)
{
  if (s == "mass" || s == "mass_weighted" || s == "l2")
  {
    return InnerProduct::MassWeighted;
  }
  if (s == "euclidean" || s == "identity")
  {
    return InnerProduct::Euclidean;
  }
  throw UsageError("unknown inner product '" + s + "'");
}

std::vector<double> QGrid::values() const
{
  if (!(step > 0.0) || end < start)
  {
    throw UsageError("q grid needs step > 0 and start <= end");
  }
  const auto n = static_cast<Index>(std::floor((end - start) / step + 1e-9)) + 1;
  std::vector<double> q(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i)
  {
    q[static_cast<std::size_t>(i)] = start + static_cast<double>(i) * step;
  }
  return q;
}

SnapshotSet generate_snapshots(const BurgersProblem &prob, std::span<const double> q_values,
                               const Mesh1D &mesh, unsigned threads)
{
  if (q_values.empty())
  {
    throw DimensionError("generate_snapshots: empty parameter list");
  }
  const auto m = static_cast<Index>(q_values.size());
  const Index n = mesh.n_nodes();
  Eigen::MatrixXd snaps(n, m);

  auto fill = [&](Index begin, Index end) {
    for (Index j = begin; j < end; ++j)
    {
      const BurgersProblem pj = prob.with_q(q_values[static_cast<std::size_t>(j)]);
      for (Index i = 0; i < n; ++i)
      {
        snaps(i, j) = exact_u(pj, mesh.node(i));
      }
    }
  };

  if (threads == 0)
  {
    threads = std::max(1u, std::thread::hardware_concurrency());
  }
  const auto workers = static_cast<Index>(std::min<std::size_t>(threads, q_values.size()));
  if (workers <= 1)
  {
    fill(0, m);
  }
  else
  {
    std::vector<std::jthread> pool;
    const Index chunk = (m + workers - 1) / workers;
    for (Index w = 0; w < workers; ++w)
    {
      pool.emplace_back(fill, w * chunk, std::min(m, (w + 1) * chunk));
    }
  }

  Eigen::VectorXd mean = snaps.rowwise().mean();
  snaps.colwise() -= mean;
  return SnapshotSet{mesh, std::vector<double>(q_values.begin(), q_values.end()),
                     FeFunction(mesh, std::move(mean)), std::move(snaps)};
}

PodBasis::PodBasis(Mesh1D mesh, Eigen::MatrixXd modes, std::vector<double> singular_values,
                   FeFunction mean, InnerProduct inner_product)
  : mesh_(std::move(mesh)), modes_(std::move(modes)),
    singular_values_(std::move(singular_values)), mean_(std::move(mean)),
    inner_product_(inner_product)
{
  if (modes_.rows() != mesh_.n_nodes())
  {
    throw DimensionError("PodBasis: mode length does not match node count");
  }
  if (static_cast<Index>(singular_values_.size()) != modes_.cols())
  {
    throw DimensionError("PodBasis: one singular value per mode expected");
  }
  fem1d::require_same_mesh(mesh_, mean_.mesh());
  mass_ = fem1d::assemble_mass_stiffness(mesh_).mass_full;
}

Eigen::MatrixXd PodBasis::gram() const
{
  if (inner_product_ == InnerProduct::MassWeighted)
  {
    return modes_.transpose() * (mass_ * modes_);
  }
  return modes_.transpose() * modes_;
}

PodBasis compute_pod(const SnapshotSet &snaps, InnerProduct inner_product, double rank_tol)
{
  const Mesh1D &mesh = snaps.mesh;
  const Index n = mesh.n_nodes();
  if (snaps.fluctuations.rows() != n)
  {
    throw DimensionError("compute_pod: snapshot rows do not match node count");
  }
  if (snaps.fluctuations.cwiseAbs().maxCoeff() == 0.0)
  {
    throw DegenerateSnapshots("compute_pod: snapshot fluctuations are identically zero");
  }

  // Boundary rows vanish after lifting; only the interior carries information.
  const Eigen::MatrixXd interior = snaps.fluctuations.middleRows(1, n - 2);

  fem1d::SparseMatrix upper;  // L^T with L L^T = M_interior
  Eigen::MatrixXd weighted;
  if (inner_product == InnerProduct::MassWeighted)
  {
    const auto forms = fem1d::assemble_mass_stiffness(mesh);
    Eigen::SimplicialLLT<fem1d::SparseMatrix, Eigen::Lower, Eigen::NaturalOrdering<int>> llt(
      forms.mass);
    if (llt.info() != Eigen::Success)
    {
      throw Error("compute_pod: mass matrix factorization failed");
    }
    upper = llt.matrixU();
    weighted = upper * interior;
  }
  else
  {
    weighted = interior;
  }

  Eigen::BDCSVD<Eigen::MatrixXd> svd(weighted, Eigen::ComputeThinU);
  const Eigen::VectorXd &s = svd.singularValues();
  if (!(s[0] > 0.0))
  {
    throw DegenerateSnapshots("compute_pod: zero singular spectrum");
  }
  Index ell = 0;
  while (ell < s.size() && s[ell] > rank_tol * s[0])
  {
    ++ell;
  }

  Eigen::MatrixXd left = svd.matrixU().leftCols(ell);
  if (inner_product == InnerProduct::MassWeighted)
  {
    left = upper.triangularView<Eigen::Upper>().solve(left);
  }

  Eigen::MatrixXd modes = Eigen::MatrixXd::Zero(n, ell);
  modes.middleRows(1, n - 2) = left;
  // Fix the SVD sign ambiguity: largest-magnitude entry of each mode is positive.
  for (Index j = 0; j < ell; ++j)
  {
    Index imax = 0;
    modes.col(j).cwiseAbs().maxCoeff(&imax);
    if (modes(imax, j) < 0.0)
    {
      modes.col(j) *= -1.0;
    }
  }

  std::vector<double> sv(s.data(), s.data() + ell);
  return PodBasis(mesh, std::move(modes), std::move(sv), snaps.mean, inner_product);
}

Eigen::VectorXd project(const PodBasis &basis, const FeFunction &u, Index r)
{
  if (r < 0 || r > basis.dim())
  {
    throw DimensionError("project: requested more modes than the basis holds");
  }
  fem1d::require_same_mesh(basis.mesh(), u.mesh());
  const Eigen::VectorXd fluct = u.coeffs() - basis.mean().coeffs();
  const auto phi = basis.modes().leftCols(r);
  if (basis.inner_product() == InnerProduct::MassWeighted)
  {
    return phi.transpose() * (basis.mass() * fluct);
  }
  return phi.transpose() * fluct;
}

FeFunction lift(const PodBasis &basis, const Eigen::VectorXd &a)
{
  if (a.size() > basis.dim())
  {
    throw DimensionError("lift: more coefficients than modes");
  }
  return FeFunction(basis.mesh(),
                    basis.mean().coeffs() + basis.modes().leftCols(a.size()) * a);
}

OfflineData build_offline(const BurgersProblem &problem, const QGrid &grid, double h,
                          InnerProduct inner_product, double rank_tol, unsigned threads)
{
  problem.validate();
  const Mesh1D mesh = fem1d::build_mesh(problem.a, problem.b, h);
  const auto q = grid.values();
  const auto snaps = generate_snapshots(problem, q, mesh, threads);
  return OfflineData{problem, grid, compute_pod(snaps, inner_product, rank_tol)};
}

namespace
{

json problem_to_json(const BurgersProblem &p)
{
  return {{"a", p.a},         {"b", p.b}, {"alpha", p.alpha}, {"beta", p.beta},
          {"nu", p.nu},       {"k", p.k}, {"sigma", p.sigma}};
}

BurgersProblem problem_from_json(const json &j)
{
  BurgersProblem p;
  p.a = j.at("a").get<double>();
  p.b = j.at("b").get<double>();
  p.alpha = j.at("alpha").get<double>();
  p.beta = j.at("beta").get<double>();
  p.nu = j.at("nu").get<double>();
  p.k = j.at("k").get<int>();
  p.sigma = j.at("sigma").get<double>();
  return p;
}

std::filesystem::path data_path(const std::filesystem::path &header)
{
  auto p = header;
  p += ".bin";
  return p;
}

}  // namespace

void save_offline(const OfflineData &data, const std::filesystem::path &path)
{
  const PodBasis &basis = data.basis;
  const Mesh1D &mesh = basis.mesh();
  json header = {
    {"format", "rom2l-pod-basis"},
    {"version", 1},
    {"mesh", {{"a", mesh.a()}, {"b", mesh.b()}, {"n_elems", mesh.n_elems()}}},
    {"problem", problem_to_json(data.problem)},
    {"q_grid",
     {{"start", data.grid.start},
      {"end", data.grid.end},
      {"step", data.grid.step},
      {"count", data.grid.values().size()}}},
    {"inner_product", to_string(basis.inner_product())},
    {"n_nodes", mesh.n_nodes()},
    {"dim", basis.dim()},
    {"singular_values", basis.singular_values()},
    {"data_file", data_path(path).filename().string()},
  };

  std::ofstream hs(path);
  if (!hs)
  {
    throw IoError("cannot open '" + path.string() + "' for writing");
  }
  hs << header.dump(2) << '\n';

  std::ofstream bs(data_path(path), std::ios::binary);
  if (!bs)
  {
    throw IoError("cannot open '" + data_path(path).string() + "' for writing");
  }
  const auto bytes = [](Index count) {
    return static_cast<std::streamsize>(count * static_cast<Index>(sizeof(double)));
  };
  bs.write(reinterpret_cast<const char *>(basis.mean().coeffs().data()),
           bytes(mesh.n_nodes()));
  bs.write(reinterpret_cast<const char *>(basis.modes().data()),
           bytes(basis.modes().size()));
  if (!hs || !bs)
  {
    throw IoError("write to '" + path.string() + "' failed");
  }
}

OfflineData load_offline(const std::filesystem::path &path)
{
  std::ifstream hs(path);
  if (!hs)
  {
    throw IoError("cannot open basis header '" + path.string() + "'");
  }
  json header;
  try
  {
    header = json::parse(hs);
  }
  catch (const json::exception &e)
  {
    throw IoError("malformed basis header '" + path.string() + "': " + e.what());
  }
  if (header.value("format", "") != "rom2l-pod-basis")
  {
    throw IoError("'" + path.string() + "' is not a rom2l basis header");
  }

  const auto &jm = header.at("mesh");
  const Mesh1D mesh(jm.at("a").get<double>(), jm.at("b").get<double>(),
                    jm.at("n_elems").get<Index>());
  const auto dim = header.at("dim").get<Index>();
  const Index n = mesh.n_nodes();
  if (header.at("n_nodes").get<Index>() != n)
  {
    throw IoError("basis header node count disagrees with its mesh");
  }

  const auto bin = path.parent_path() / header.at("data_file").get<std::string>();
  std::ifstream bs(bin, std::ios::binary);
  if (!bs)
  {
    throw IoError("cannot open basis data '" + bin.string() + "'");
  }
  Eigen::VectorXd mean(n);
  Eigen::MatrixXd modes(n, dim);
  bs.read(reinterpret_cast<char *>(mean.data()),
          static_cast<std::streamsize>(n * static_cast<Index>(sizeof(double))));
  bs.read(reinterpret_cast<char *>(modes.data()),
          static_cast<std::streamsize>(modes.size() * static_cast<Index>(sizeof(double))));
  if (!bs)
  {
    throw IoError("basis data '" + bin.string() + "' is truncated");
  }

  const auto &jq = header.at("q_grid");
  QGrid grid{jq.at("start").get<double>(), jq.at("end").get<double>(),
             jq.at("step").get<double>()};
  return OfflineData{problem_from_json(header.at("problem")), grid,
                     PodBasis(mesh, std::move(modes),
                              header.at("singular_values").get<std::vector<double>>(),
                              FeFunction(mesh, std::move(mean)),
                              inner_product_from_string(header.at("inner_product")))};
}

}  // namespace rom2l::pod
