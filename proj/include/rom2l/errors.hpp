// Copyright The rom2l Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Core>

namespace rom2l
{

class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

class InvalidMesh : public Error
{
public:
  using Error::Error;
};

class MeshMismatch : public Error
{
public:
  using Error::Error;
};

class DimensionError : public Error
{
public:
  using Error::Error;
};

class DegenerateSnapshots : public Error
{
public:
  using Error::Error;
};

class SingularJacobian : public Error
{
public:
  using Error::Error;
};

// Step-2 matrix of the two-level solve is singular; the linearization about the
// coarse solution is not well posed.
class SingularLinearSystem : public Error
{
public:
  using Error::Error;
};

class NoConvergence : public Error
{
public:
  NoConvergence(const std::string &what, Eigen::VectorXd last_iterate, double residual_norm,
                int iterations)
    : Error(what), last_iterate_(std::move(last_iterate)), residual_norm_(residual_norm),
      iterations_(iterations)
  {
  }

  const Eigen::VectorXd &last_iterate() const { return last_iterate_; }
  double residual_norm() const { return residual_norm_; }
  int iterations() const { return iterations_; }

private:
  Eigen::VectorXd last_iterate_;
  double residual_norm_;
  int iterations_;
};

class IoError : public Error
{
public:
  using Error::Error;
};

class UsageError : public Error
{
public:
  using Error::Error;
};

}  // namespace rom2l
