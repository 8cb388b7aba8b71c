// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>

#include "gpj/field.hpp"
#include "gpj/linsolve.hpp"
#include "gpj/operators.hpp"

namespace gpj
{

/// E(u) = 1/2 int |grad_R u|^2 + W_R |u|^2 + kappa/2 |u|^4, integrated pointwise with
/// 3x3 Gauss from the rotational-gradient form (independent of the assembled matrices).
inline double energy(const Problem &P, const ComplexField &u)
{
  P.check(u);
  const Mesh &mesh = *u.mesh;
  const CellQuadrature quad(mesh, 3);
  const double omega = P.omega();
  const double kappa = P.kappa();
  const auto &W = P.params().W;
  double total = 0.0;
  for (std::size_t c = 0; c < mesh.n_cells_total(); ++c)
  {
    const auto vr = cell_values(mesh, u.re, c);
    const auto vi = cell_values(mesh, u.im, c);
    for (const auto &q : quad.points(c))
    {
      double a = 0, b = 0, ax = 0, ay = 0, bx = 0, by = 0;
      for (int k = 0; k < 4; ++k)
      {
        a += vr[k] * q.phi[k];
        b += vi[k] * q.phi[k];
        ax += vr[k] * q.grad[k][0];
        ay += vr[k] * q.grad[k][1];
        bx += vi[k] * q.grad[k][0];
        by += vi[k] * q.grad[k][1];
      }
      // grad_R u = grad u + i Omega/2 R u, R = (y, -x)
      const double Rx = q.y, Ry = -q.x;
      const double gr_x = ax - 0.5 * omega * Rx * b, gr_y = ay - 0.5 * omega * Ry * b;
      const double gi_x = bx + 0.5 * omega * Rx * a, gi_y = by + 0.5 * omega * Ry * a;
      const double rho = a * a + b * b;
      const double WR = W(q.x, q.y) - 0.25 * omega * omega * (q.x * q.x + q.y * q.y);
      total += q.weight * (gr_x * gr_x + gr_y * gr_y + gi_x * gi_x + gi_y * gi_y + WR * rho +
                           0.5 * kappa * rho * rho);
    }
  }
  return 0.5 * total;
}

/// 1/2 u'S u + kappa/4 ||u||_4^4 from the assembled linear block.
inline double energy_quadratic_form(const Problem &P, const ComplexField &u)
{
  P.check(u);
  const Vector v = u.stacked();
  return 0.5 * v.dot(P.S() * v) + 0.25 * P.kappa() * l4_norm4(u);
}

inline double energy_shifted(const Problem &P, const ComplexField &u, double sigma)
{
  return energy(P, u) + 0.5 * sigma * h_inner(u, u, P.mass());
}

inline void require_normalized(const Problem &P, const ComplexField &u)
{
  const double n = l2_norm(u, P.mass());
  if (!(std::abs(n - 1.0) <= 1e-8))
    throw Error("expected an L2-normalized field, got norm " + std::to_string(n));
}

/// lambda(u) = 2 E(u) + kappa/2 ||u||_4^4 for normalized u.
inline double rayleigh(const Problem &P, const ComplexField &u)
{
  require_normalized(P, u);
  return 2.0 * energy(P, u) + 0.5 * P.kappa() * l4_norm4(u);
}

/// <A(u), u> through the operator action; equals rayleigh() for normalized u.
inline double rayleigh_action(const Problem &P, const ComplexField &u)
{
  return u.stacked().dot(apply_A_nl(P, u));
}

/// Dual norm sqrt(r' M^{-1} r) of r = A(u)u - lambda M u, with exact mass solves.
inline double residual_l2(const Problem &P, const ComplexField &u, double lambda)
{
  require_normalized(P, u);
  const Vector r = apply_A_nl(P, u) - lambda * (P.mass_block() * u.stacked());
  const auto n = static_cast<Eigen::Index>(P.n());
  const SymmetricSolver mass_solver(P.mass(), SolveMode::Spd, {1e-12, 0});
  const Vector rr = r.head(n), ri = r.tail(n);
  const auto xr = mass_solver.solve(rr);
  const auto xi = mass_solver.solve(ri);
  return std::sqrt(std::max(0.0, rr.dot(xr.x) + ri.dot(xi.x)));
}

/// sigma = 4/3 E(u); dominates kappa/3 ||u||_4^4 for normalized u.
inline double sufficient_shift(const Problem &P, const ComplexField &u)
{
  return 4.0 / 3.0 * energy(P, u);
}

}  // namespace gpj
