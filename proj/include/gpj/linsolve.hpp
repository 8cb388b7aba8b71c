// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <limits>
#include <memory>
#include <string>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "gpj/errors.hpp"
#include "gpj/field.hpp"

namespace gpj
{

enum class SolveMode
{
  Spd,       ///< preconditioned conjugate gradients
  Indefinite ///< sparse LU with iterative refinement
};

struct SolveOptions
{
  double tol = 1e-10;
  int max_iter = 0;  ///< 0: 20*sqrt(n)+200
};

inline int default_max_iter(Eigen::Index n)
{
  return static_cast<int>(20.0 * std::sqrt(static_cast<double>(n)) + 200.0);
}

struct SolveResult
{
  Vector x;
  int iterations = 0;
  /// Certified ||B x - rhs|| / ||rhs||, recomputed from the returned x.
  double residual = 0.0;
};

inline double relative_residual(const SparseMatrix &B, const Vector &x, const Vector &rhs)
{
  const double nr = rhs.norm();
  const double r = (B * x - rhs).norm();
  return nr > 0.0 ? r / nr : r;
}

/// Linear solver bound to one symmetric matrix; reused for several right-hand sides.
class SymmetricSolver
{
public:
  SymmetricSolver(const SparseMatrix &B, SolveMode mode, SolveOptions opts = {})
    : B_(&B), mode_(mode), opts_(opts)
  {
    if (B.rows() != B.cols())
      throw DimensionError("solver needs a square matrix");
    if (opts_.max_iter <= 0)
      opts_.max_iter = default_max_iter(B.rows());
    if (mode_ == SolveMode::Spd)
    {
      inv_diag_ = B.diagonal();
      for (Eigen::Index i = 0; i < inv_diag_.size(); ++i)
        inv_diag_[i] = inv_diag_[i] > 0.0 ? 1.0 / inv_diag_[i] : 1.0;
    }
    else
    {
      lu_ = std::make_shared<Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>>>();
      lu_->analyzePattern(B);
      lu_->factorize(B);
      for (Eigen::Index k = 0; k < B.outerSize(); ++k)
      {
        double col = 0.0;
        for (SparseMatrix::InnerIterator it(B, k); it; ++it)
          col += std::abs(it.value());
        norm1_ = std::max(norm1_, col);
      }
      if (lu_->info() != Eigen::Success)
        throw SolverError("sparse LU factorization failed: " + lu_->lastErrorMessage(),
                          std::numeric_limits<double>::infinity(), 0);
    }
  }

  SolveResult solve(const Vector &rhs) const
  {
    if (rhs.size() != B_->rows())
      throw DimensionError("right-hand side does not match the matrix");
    SolveResult res;
    if (rhs.norm() == 0.0)
    {
      res.x = Vector::Zero(rhs.size());
      return res;
    }
    return mode_ == SolveMode::Spd ? pcg(rhs) : direct(rhs);
  }

  SolveMode mode() const { return mode_; }
  const SolveOptions &options() const { return opts_; }

private:
  SolveResult pcg(const Vector &rhs) const
  {
    const SparseMatrix &B = *B_;
    const double target = opts_.tol * rhs.norm();
    SolveResult res;
    res.x = Vector::Zero(rhs.size());
    int it = 0;
    // The outer loop restarts from the true residual when the recurrence has drifted.
    while (true)
    {
      Vector r = rhs - B * res.x;
      if (r.norm() <= target)
        break;
      if (it >= opts_.max_iter)
        throw SolverError("conjugate gradients did not converge", r.norm() / rhs.norm(), it);
      Vector z = inv_diag_.cwiseProduct(r);
      Vector p = z;
      double rz = r.dot(z);
      Vector Bp(rhs.size());
      while (it < opts_.max_iter)
      {
        Bp.noalias() = B * p;
        const double pBp = p.dot(Bp);
        if (!(pBp > 0.0))
          throw SolverError("conjugate gradients hit a non-positive curvature direction",
                            r.norm() / rhs.norm(), it);
        const double alpha = rz / pBp;
        res.x += alpha * p;
        r -= alpha * Bp;
        ++it;
        if (r.norm() <= 0.5 * target)
          break;
        z = inv_diag_.cwiseProduct(r);
        const double rz_new = r.dot(z);
        p = z + (rz_new / rz) * p;
        rz = rz_new;
      }
    }
    res.iterations = it;
    res.residual = relative_residual(B, res.x, rhs);
    return res;
  }

  /// Normwise backward error ||Bx - b|| / (||B||_1 ||x|| + ||b||). Near a shift at an
  /// eigenvalue the solution is meant to blow up, so ||Bx - b|| / ||b|| is not a usable
  /// certificate there.
  double backward_error(const Vector &x, const Vector &rhs) const
  {
    return (*B_ * x - rhs).norm() / (norm1_ * x.norm() + rhs.norm());
  }

  SolveResult direct(const Vector &rhs) const
  {
    SolveResult res;
    res.x = lu_->solve(rhs);
    res.residual = backward_error(res.x, rhs);
    for (int refine = 0; refine < 3 && res.residual > opts_.tol && std::isfinite(res.residual);
         ++refine)
    {
      res.x += lu_->solve(rhs - *B_ * res.x);
      res.residual = backward_error(res.x, rhs);
      ++res.iterations;
    }
    if (!(res.residual <= opts_.tol))
      throw SolverError("direct solve missed the backward error tolerance", res.residual,
                        res.iterations);
    return res;
  }

  const SparseMatrix *B_;
  SolveMode mode_;
  SolveOptions opts_;
  Vector inv_diag_;
  double norm1_ = 0.0;
  std::shared_ptr<Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>>> lu_;
};

/// ||B x - rhs|| <= tol ||rhs|| for SPD B; Jacobi-preconditioned CG.
inline SolveResult solve_spd(const SparseMatrix &B, const Vector &rhs, double tol = 1e-10,
                             int max_iter = 0)
{
  return SymmetricSolver(B, SolveMode::Spd, {tol, max_iter}).solve(rhs);
}

/// Symmetric indefinite B (Rayleigh-shifted systems): sparse LU with iterative refinement,
/// certified by the normwise backward error.
inline SolveResult solve_sym_indef(const SparseMatrix &B, const Vector &rhs, double tol = 1e-10,
                                   int max_iter = 0)
{
  return SymmetricSolver(B, SolveMode::Indefinite, {tol, max_iter}).solve(rhs);
}

struct ShermanMorrisonResult
{
  Vector x;
  double denominator = 1.0;  ///< 1 - c b'B^{-1}a
  double inner_residual = 0.0;  ///< worst certified residual of the inner solves
  double residual = 0.0;  ///< ||(B - c a b') x - rhs|| / ||rhs||
  int iterations = 0;
};

/// Solves (B - c a b') x = rhs with two solves against B:
/// y = B^{-1} rhs, z = B^{-1} a, x = y + z (c b'y) / (1 - c b'z).
inline ShermanMorrisonResult solve_sherman_morrison(const SymmetricSolver &solver,
                                                    const SparseMatrix &B, const Vector &a,
                                                    const Vector &b, double c, const Vector &rhs)
{
  ShermanMorrisonResult out;
  const auto y = solver.solve(rhs);
  out.inner_residual = y.residual;
  out.iterations = y.iterations;
  if (c == 0.0)
  {
    out.x = y.x;
  }
  else
  {
    const auto z = solver.solve(a);
    out.inner_residual = std::max(out.inner_residual, z.residual);
    out.iterations += z.iterations;
    const double cbz = c * b.dot(z.x);
    out.denominator = 1.0 - cbz;
    if (!(std::abs(out.denominator) >= 1e-12 * (1.0 + std::abs(cbz))))
      throw SingularUpdateError("Sherman-Morrison denominator vanishes", out.denominator);
    out.x = y.x + z.x * (c * b.dot(y.x) / out.denominator);
  }
  const Vector full = B * out.x - c * a * b.dot(out.x) - rhs;
  const double nr = rhs.norm();
  out.residual = nr > 0.0 ? full.norm() / nr : full.norm();
  return out;
}

inline ShermanMorrisonResult solve_sherman_morrison(const SparseMatrix &B, const Vector &a,
                                                    const Vector &b, double c, const Vector &rhs,
                                                    SolveMode mode, SolveOptions opts = {})
{
  const SymmetricSolver solver(B, mode, opts);
  return solve_sherman_morrison(solver, B, a, b, c, rhs);
}

}  // namespace gpj
