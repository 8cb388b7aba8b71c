// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Sparse>

#include "gpj/errors.hpp"
#include "gpj/field.hpp"
#include "gpj/mesh.hpp"
#include "gpj/potentials.hpp"
#include "gpj/quadrature.hpp"

namespace gpj
{

using Triplet = Eigen::Triplet<double>;
using LocalMatrix = Eigen::Matrix4d;

enum class DofSet
{
  Interior,  ///< Dirichlet nodes eliminated
  All
};

/// Generic Q1 cell loop. `kernel(q, cell, local)` accumulates the contribution of one
/// quadrature point into the 4x4 local matrix (row = test function, column = trial).
template <class Kernel>
SparseMatrix assemble_cells(const Mesh &mesh, int order, DofSet dofs, Kernel &&kernel)
{
  const CellQuadrature quad(mesh, order);
  const auto n = static_cast<Eigen::Index>(dofs == DofSet::Interior ? mesh.n_interior()
                                                                     : mesh.n_nodes());
  std::vector<Triplet> trips;
  trips.reserve(mesh.n_cells_total() * 16);
  for (std::size_t c = 0; c < mesh.n_cells_total(); ++c)
  {
    LocalMatrix local = LocalMatrix::Zero();
    for (const auto &q : quad.points(c))
      kernel(q, c, local);
    const auto nodes = mesh.cell_nodes(c);
    for (int a = 0; a < 4; ++a)
    {
      const auto ra = dofs == DofSet::Interior ? mesh.interior_index(nodes[a])
                                               : static_cast<std::ptrdiff_t>(nodes[a]);
      if (ra == kBoundary)
        continue;
      for (int b = 0; b < 4; ++b)
      {
        const auto cb = dofs == DofSet::Interior ? mesh.interior_index(nodes[b])
                                                 : static_cast<std::ptrdiff_t>(nodes[b]);
        if (cb == kBoundary)
          continue;
        if (local(a, b) != 0.0)
          trips.emplace_back(ra, cb, local(a, b));
      }
    }
  }
  SparseMatrix out(n, n);
  out.setFromTriplets(trips.begin(), trips.end());
  return out;
}

/// K_ij = int grad phi_i . grad phi_j (2x2 Gauss, exact).
inline SparseMatrix assemble_stiffness(const Mesh &mesh, DofSet dofs = DofSet::Interior)
{
  return assemble_cells(mesh, 2, dofs, [](const QuadPoint &q, std::size_t, LocalMatrix &loc) {
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        loc(a, b) += q.weight * (q.grad[a][0] * q.grad[b][0] + q.grad[a][1] * q.grad[b][1]);
  });
}

/// M_ij = int phi_i phi_j (2x2 Gauss, exact).
inline SparseMatrix assemble_mass(const Mesh &mesh, DofSet dofs = DofSet::Interior)
{
  return assemble_cells(mesh, 2, dofs, [](const QuadPoint &q, std::size_t, LocalMatrix &loc) {
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        loc(a, b) += q.weight * q.phi[a] * q.phi[b];
  });
}

/// (M_w)_ij = int w phi_i phi_j with `weight(q, cell)` sampled at Gauss points.
template <class Weight>
SparseMatrix assemble_weighted_mass(const Mesh &mesh, Weight &&weight, int order = 3)
{
  return assemble_cells(mesh, order, DofSet::Interior,
                        [&](const QuadPoint &q, std::size_t cell, LocalMatrix &loc) {
                          const double w = weight(q, cell);
                          if (!std::isfinite(w))
                            throw AssemblyError("non-finite weight at (" + std::to_string(q.x) +
                                                ", " + std::to_string(q.y) + ")");
                          for (int a = 0; a < 4; ++a)
                            for (int b = 0; b < 4; ++b)
                              loc(a, b) += q.weight * w * q.phi[a] * q.phi[b];
                        });
}

/// Mass matrix weighted by the potential.
inline SparseMatrix assemble_potential_mass(const Mesh &mesh, const Potential &W)
{
  W.check_compatible(mesh);
  return assemble_weighted_mass(mesh, [&](const QuadPoint &q, std::size_t) { return W(q.x, q.y); });
}

/// The four density-weighted masses needed by the J-operator.
struct DensityMasses
{
  SparseMatrix rr;   ///< weight u_R^2
  SparseMatrix ri;   ///< weight u_R u_I
  SparseMatrix ii;   ///< weight u_I^2
  SparseMatrix rho;  ///< weight |u|^2
};

inline SparseMatrix density_mass(const ComplexField &u)
{
  const Mesh &mesh = *u.mesh;
  return assemble_weighted_mass(mesh, [&](const QuadPoint &q, std::size_t c) {
    const double a = interpolate(cell_values(mesh, u.re, c), q);
    const double b = interpolate(cell_values(mesh, u.im, c), q);
    return a * a + b * b;
  });
}

inline DensityMasses density_masses(const ComplexField &u)
{
  const Mesh &mesh = *u.mesh;
  auto field_at = [&](const QuadPoint &q, std::size_t c) {
    return std::pair{interpolate(cell_values(mesh, u.re, c), q),
                     interpolate(cell_values(mesh, u.im, c), q)};
  };
  DensityMasses out;
  out.rr = assemble_weighted_mass(mesh, [&](const QuadPoint &q, std::size_t c) {
    const auto [a, b] = field_at(q, c);
    return a * a;
  });
  out.ri = assemble_weighted_mass(mesh, [&](const QuadPoint &q, std::size_t c) {
    const auto [a, b] = field_at(q, c);
    return a * b;
  });
  out.ii = assemble_weighted_mass(mesh, [&](const QuadPoint &q, std::size_t c) {
    const auto [a, b] = field_at(q, c);
    return b * b;
  });
  out.rho = out.rr + out.ii;
  return out;
}

/// C_ij = int phi_i (R . grad phi_j) with R(x, y) = (y, -x). Antisymmetric on the interior
/// because div R = 0 and the trace vanishes; 2x2 Gauss is exact for the cubic integrand.
inline SparseMatrix assemble_rotation(const Mesh &mesh)
{
  return assemble_cells(mesh, 2, DofSet::Interior,
                        [](const QuadPoint &q, std::size_t, LocalMatrix &loc) {
                          for (int a = 0; a < 4; ++a)
                            for (int b = 0; b < 4; ++b)
                              loc(a, b) += q.weight * q.phi[a] *
                                           (q.y * q.grad[b][0] - q.x * q.grad[b][1]);
                        });
}

/// [[A, B], [C, D]] from N x N blocks.
inline SparseMatrix block2x2(const SparseMatrix &A, const SparseMatrix &B, const SparseMatrix &C,
                             const SparseMatrix &D)
{
  const auto n = A.rows();
  std::vector<Triplet> trips;
  trips.reserve(static_cast<std::size_t>(A.nonZeros() + B.nonZeros() + C.nonZeros() + D.nonZeros()));
  auto put = [&](const SparseMatrix &X, Eigen::Index r0, Eigen::Index c0) {
    for (Eigen::Index k = 0; k < X.outerSize(); ++k)
      for (SparseMatrix::InnerIterator it(X, k); it; ++it)
        trips.emplace_back(r0 + it.row(), c0 + it.col(), it.value());
  };
  put(A, 0, 0);
  put(B, 0, n);
  put(C, n, 0);
  put(D, n, n);
  SparseMatrix out(2 * n, 2 * n);
  out.setFromTriplets(trips.begin(), trips.end());
  return out;
}

inline SparseMatrix block_diag(const SparseMatrix &A)
{
  SparseMatrix Z(A.rows(), A.cols());
  return block2x2(A, Z, Z, A);
}

/// Linear part of the operator in real 2N form.
///
/// S = [[A, Omega C], [-Omega C, A]] with A = K + M_W. The quadratic form u'Su equals twice
/// the kappa-free energy: the Omega^2 |x|^2 / 4 terms of |grad_R u|^2 and W_R cancel, leaving
/// the cross term Omega int (u_R R.grad u_I - u_I R.grad u_R) = Omega u_R' C u_I - Omega u_I' C u_R.
struct BlockOperator
{
  SparseMatrix stiffness;  ///< K
  SparseMatrix potential;  ///< M_W
  SparseMatrix A;          ///< K + M_W
  SparseMatrix C;
  double omega = 0.0;
  SparseMatrix S;  ///< assembled 2N x 2N matrix
  /// Quadrature points where W(x) < Omega^2 |x|^2.
  std::size_t assumption_violations = 0;
  std::size_t assumption_checked = 0;
};

inline BlockOperator assemble_linear_block(const Mesh &mesh, const Potential &W, double omega)
{
  W.check_compatible(mesh);
  BlockOperator op;
  op.omega = omega;
  op.stiffness = assemble_stiffness(mesh);
  op.potential = assemble_weighted_mass(mesh, [&](const QuadPoint &q, std::size_t) {
    const double w = W(q.x, q.y);
    ++op.assumption_checked;
    if (w < omega * omega * (q.x * q.x + q.y * q.y))
      ++op.assumption_violations;
    return w;
  });
  op.A = op.stiffness + op.potential;
  op.C = assemble_rotation(mesh);
  const auto n = op.A.rows();
  const SparseMatrix oc = omega == 0.0 ? SparseMatrix(n, n) : SparseMatrix(omega * op.C);
  const SparseMatrix moc = omega == 0.0 ? SparseMatrix(n, n) : SparseMatrix(-omega * op.C);
  op.S = block2x2(op.A, oc, moc, op.A);
  return op;
}

}  // namespace gpj
