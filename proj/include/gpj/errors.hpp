// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace gpj
{

struct Error : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

struct InvalidMeshError : Error
{
  using Error::Error;
};

struct DimensionError : Error
{
  using Error::Error;
};

struct ZeroFieldError : Error
{
  using Error::Error;
};

struct AssemblyError : Error
{
  using Error::Error;
};

struct ConfigError : Error
{
  using Error::Error;
};

/// Iterative solve that did not reach its tolerance.
struct SolverError : Error
{
  SolverError(const std::string &what, double final_residual, int iterations)
    : Error(what), residual(final_residual), iterations(iterations)
  {
  }
  double residual;
  int iterations;
};

/// Sherman-Morrison denominator vanished: the shift sits at (or next to) an eigenvalue of J.
struct SingularUpdateError : Error
{
  SingularUpdateError(const std::string &what, double denominator)
    : Error(what), denominator(denominator)
  {
  }
  double denominator;
};

struct DegenerateCombinationError : Error
{
  using Error::Error;
};

}  // namespace gpj
