// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <memory>
#include <stdexcept>

#include "gpj/assembly.hpp"
#include "gpj/field.hpp"
#include "gpj/mesh.hpp"
#include "gpj/potentials.hpp"

namespace gpj
{

struct ModelParams
{
  double omega = 0.0;
  double kappa = 0.0;
  Potential W = harmonic_potential();
};

/// A discretized model: mesh, parameters and every field-independent matrix.
class Problem
{
public:
  /// `tweak_linear` may modify the assembled linear block (fault injection in the
  /// validation suite).
  Problem(MeshPtr mesh, ModelParams params,
          const std::function<void(BlockOperator &)> &tweak_linear = {})
      : mesh_(std::move(mesh)), params_(std::move(params))
  {
    if (params_.kappa < 0.0)
      throw ConfigError("kappa must be non-negative");
    mass_ = assemble_mass(*mesh_);
    linear_ = assemble_linear_block(*mesh_, params_.W, params_.omega);
    if (tweak_linear)
      tweak_linear(linear_);
    mass_block_ = block_diag(mass_);
    stiffness_block_ = block_diag(linear_.stiffness);
  }

  const MeshPtr &mesh() const { return mesh_; }
  const ModelParams &params() const { return params_; }
  double kappa() const { return params_.kappa; }
  double omega() const { return params_.omega; }

  const SparseMatrix &mass() const { return mass_; }
  const SparseMatrix &mass_block() const { return mass_block_; }
  const SparseMatrix &stiffness_block() const { return stiffness_block_; }
  const BlockOperator &linear() const { return linear_; }
  /// S_lin, the 2N x 2N linear part.
  const SparseMatrix &S() const { return linear_.S; }

  std::size_t n() const { return mesh_->n_interior(); }

  ComplexField zero_field() const { return ComplexField(mesh_); }

  void check(const ComplexField &u) const
  {
    if (!u.mesh || !(u.mesh == mesh_ || u.mesh->same_as(*mesh_)))
      throw DimensionError("field does not live on the problem mesh");
  }

private:
  MeshPtr mesh_;
  ModelParams params_;
  SparseMatrix mass_;
  BlockOperator linear_;
  SparseMatrix mass_block_;
  SparseMatrix stiffness_block_;
};

/// Squared L2 norm from the problem mass matrix; throws on the zero field.
inline double mass_of(const Problem &P, const ComplexField &u)
{
  P.check(u);
  const double m = h_inner(u, u, P.mass());
  if (!(m > 0.0))
    throw ZeroFieldError("operator evaluated at the zero field");
  return m;
}

/// [M_rho u_R; M_rho u_I] with rho = |u|^2.
inline Vector density_action(const SparseMatrix &M_rho, const ComplexField &u)
{
  Vector out(2 * u.re.size());
  out << M_rho * u.re, M_rho * u.im;
  return out;
}

/// Dual vector of A(u)u = S u + kappa/||u||^2 diag(M_rho, M_rho) u.
inline Vector apply_A_nl(const Problem &P, const ComplexField &u)
{
  const double m = mass_of(P, u);
  Vector out = P.S() * u.stacked();
  if (P.kappa() != 0.0)
    out += (P.kappa() / m) * density_action(density_mass(u), u);
  return out;
}

/// A_sigma(u) = S + kappa/||u||^2 diag(M_rho, M_rho) + sigma M.
inline SparseMatrix build_A_op(const Problem &P, const ComplexField &u, double sigma)
{
  const double m = mass_of(P, u);
  SparseMatrix A = P.S();
  if (P.kappa() != 0.0)
    A += (P.kappa() / m) * block_diag(density_mass(u));
  if (sigma != 0.0)
    A += sigma * P.mass_block();
  return A;
}

/// J_sigma(u) = B - c * density_u * mass_u'.
///
/// B collects every symmetric contribution, the rank-one part is the derivative of the
/// 1/||u||^2 normalization: c = 2 kappa / ||u||^4, mass_u = [M u_R; M u_I] pairs with the
/// trial direction and density_u = [M_rho u_R; M_rho u_I] with the test function.
struct JOperator
{
  SparseMatrix B;
  Vector mass_u;
  Vector density_u;
  double c = 0.0;

  Vector apply(const Vector &v) const { return B * v - c * density_u * mass_u.dot(v); }

  Eigen::MatrixXd dense() const
  {
    Eigen::MatrixXd D = Eigen::MatrixXd(B);
    D.noalias() -= c * density_u * mass_u.transpose();
    return D;
  }
};

inline JOperator build_J_op(const Problem &P, const ComplexField &u, double sigma)
{
  const double m = mass_of(P, u);
  JOperator J;
  J.mass_u = P.mass_block() * u.stacked();
  const double kappa = P.kappa();
  J.B = P.S();
  if (sigma != 0.0)
    J.B += sigma * P.mass_block();
  if (kappa == 0.0)
  {
    J.density_u = Vector::Zero(J.mass_u.size());
    J.c = 0.0;
    return J;
  }
  const auto D = density_masses(u);
  // kappa/m |u|^2 v + 2 kappa/m Re(u conj v) u
  J.B += (kappa / m) * block_diag(D.rho);
  J.B += (2.0 * kappa / m) * block2x2(D.rr, D.ri, D.ri, D.ii);
  J.density_u = density_action(D.rho, u);
  J.c = 2.0 * kappa / (m * m);
  return J;
}

}  // namespace gpj
