// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <utility>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "gpj/errors.hpp"
#include "gpj/mesh.hpp"
#include "gpj/quadrature.hpp"

namespace gpj
{

using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double>;

/// Complex nodal field u = re + i*im on the interior nodes; boundary values are zero.
struct ComplexField
{
  MeshPtr mesh;
  Vector re;
  Vector im;

  ComplexField() = default;
  explicit ComplexField(MeshPtr m)
    : mesh(std::move(m)), re(Vector::Zero(static_cast<Eigen::Index>(mesh->n_interior()))),
      im(Vector::Zero(static_cast<Eigen::Index>(mesh->n_interior())))
  {
  }
  ComplexField(MeshPtr m, Vector real, Vector imag)
    : mesh(std::move(m)), re(std::move(real)), im(std::move(imag))
  {
    const auto n = static_cast<Eigen::Index>(mesh->n_interior());
    if (re.size() != n || im.size() != n)
      throw DimensionError("field coefficient vectors do not match the mesh interior");
  }

  /// Real 2N representation [re; im].
  Vector stacked() const
  {
    Vector v(2 * re.size());
    v << re, im;
    return v;
  }

  static ComplexField from_stacked(MeshPtr m, const Vector &v)
  {
    const auto n = static_cast<Eigen::Index>(m->n_interior());
    if (v.size() != 2 * n)
      throw DimensionError("stacked vector has wrong length");
    return ComplexField(std::move(m), v.head(n), v.tail(n));
  }

  std::size_t size() const { return static_cast<std::size_t>(re.size()); }
};

inline void require_same_mesh(const ComplexField &u, const ComplexField &v)
{
  if (!u.mesh || !v.mesh || !(u.mesh == v.mesh || u.mesh->same_as(*v.mesh)))
    throw DimensionError("fields live on different meshes");
}

/// Values of an interior-indexed nodal vector at the 4 nodes of a cell (0 on the boundary).
inline std::array<double, 4> cell_values(const Mesh &mesh, const Vector &v, std::size_t cell)
{
  std::array<double, 4> out{};
  const auto nodes = mesh.cell_nodes(cell);
  for (int k = 0; k < 4; ++k)
  {
    const auto idx = mesh.interior_index(nodes[k]);
    out[k] = idx == kBoundary ? 0.0 : v[idx];
  }
  return out;
}

inline double interpolate(const std::array<double, 4> &vals, const QuadPoint &q)
{
  return vals[0] * q.phi[0] + vals[1] * q.phi[1] + vals[2] * q.phi[2] + vals[3] * q.phi[3];
}

/// (u, v)_H = Re int u conj(v) = re_u' M re_v + im_u' M im_v.
inline double h_inner(const ComplexField &u, const ComplexField &v, const SparseMatrix &M)
{
  require_same_mesh(u, v);
  if (M.rows() != u.re.size())
    throw DimensionError("mass matrix does not match the field");
  return u.re.dot(M * v.re) + u.im.dot(M * v.im);
}

inline double l2_norm(const ComplexField &u, const SparseMatrix &M)
{
  return std::sqrt(std::max(0.0, h_inner(u, u, M)));
}

/// int |u_h|^p over the domain for the bilinear interpolant, 3x3 Gauss per cell.
inline double lp_norm_p(const ComplexField &u, int p)
{
  const Mesh &mesh = *u.mesh;
  const CellQuadrature quad(mesh, 3);
  double total = 0.0;
  for (std::size_t c = 0; c < mesh.n_cells_total(); ++c)
  {
    const auto vr = cell_values(mesh, u.re, c);
    const auto vi = cell_values(mesh, u.im, c);
    for (const auto &q : quad.points(c))
    {
      const double a = interpolate(vr, q);
      const double b = interpolate(vi, q);
      const double rho = a * a + b * b;
      total += q.weight * (p == 4 ? rho * rho : p == 6 ? rho * rho * rho : std::pow(rho, 0.5 * p));
    }
  }
  return total;
}

inline double l4_norm4(const ComplexField &u) { return lp_norm_p(u, 4); }

/// ||u||_{L^6}^3.
inline double l6_norm3(const ComplexField &u) { return std::sqrt(lp_norm_p(u, 6)); }

inline ComplexField combine(double a, const ComplexField &u, double b, const ComplexField &v)
{
  require_same_mesh(u, v);
  return ComplexField(u.mesh, a * u.re + b * v.re, a * u.im + b * v.im);
}

inline ComplexField scaled(const ComplexField &u, double a)
{
  return ComplexField(u.mesh, a * u.re, a * u.im);
}

inline ComplexField normalize(const ComplexField &u, const SparseMatrix &M)
{
  const double n = l2_norm(u, M);
  if (!(n > 0.0))
    throw ZeroFieldError("cannot normalize the zero field");
  return scaled(u, 1.0 / n);
}

/// Multiply by exp(i*theta) nodewise.
inline ComplexField rotate_phase(const ComplexField &u, double theta)
{
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return ComplexField(u.mesh, c * u.re - s * u.im, s * u.re + c * u.im);
}

/// Global phase that maximizes (exp(i*theta) u, ref)_H, applied to u.
inline ComplexField align_phase(const ComplexField &u, const ComplexField &ref, const SparseMatrix &M)
{
  const double a = u.re.dot(M * ref.re) + u.im.dot(M * ref.im);
  const double b = u.im.dot(M * ref.re) - u.re.dot(M * ref.im);
  return rotate_phase(u, -std::atan2(b, a));
}

/// CSV `x,y,re,im,density` over all nodes, row-major.
inline void write_field_csv(const ComplexField &u, const std::string &path)
{
  std::ofstream out(path);
  if (!out)
    throw Error("cannot open " + path + " for writing");
  const Mesh &mesh = *u.mesh;
  out << "x,y,re,im,density\n";
  char buf[160];
  for (std::size_t id = 0; id < mesh.n_nodes(); ++id)
  {
    const auto k = mesh.interior_index(id);
    const double r = k == kBoundary ? 0.0 : u.re[k];
    const double i = k == kBoundary ? 0.0 : u.im[k];
    std::snprintf(buf, sizeof(buf), "%.15e,%.15e,%.15e,%.15e,%.15e\n", mesh.node_x(id),
                  mesh.node_y(id), r, i, r * r + i * i);
    out << buf;
  }
}

}  // namespace gpj
