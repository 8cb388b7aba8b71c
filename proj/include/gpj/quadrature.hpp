// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "gpj/mesh.hpp"

namespace gpj
{

/// Gauss-Legendre rule on [-1, 1].
struct GaussRule
{
  std::vector<double> points;
  std::vector<double> weights;
};

inline const GaussRule &gauss_rule(int n)
{
  static const GaussRule g1{{0.0}, {2.0}};
  static const GaussRule g2{{-1.0 / std::sqrt(3.0), 1.0 / std::sqrt(3.0)}, {1.0, 1.0}};
  static const GaussRule g3{{-std::sqrt(0.6), 0.0, std::sqrt(0.6)}, {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0}};
  static const GaussRule g5 = [] {
    const double a = std::sqrt(5.0 - 2.0 * std::sqrt(10.0 / 7.0)) / 3.0;
    const double b = std::sqrt(5.0 + 2.0 * std::sqrt(10.0 / 7.0)) / 3.0;
    const double wa = (322.0 + 13.0 * std::sqrt(70.0)) / 900.0;
    const double wb = (322.0 - 13.0 * std::sqrt(70.0)) / 900.0;
    return GaussRule{{-b, -a, 0.0, a, b}, {wb, wa, 128.0 / 225.0, wa, wb}};
  }();
  switch (n)
  {
    case 1: return g1;
    case 2: return g2;
    case 3: return g3;
    case 5: return g5;
    default: throw Error("unsupported Gauss rule order");
  }
}

/// Q1 shape functions on the reference square, nodes counterclockwise from (-1,-1).
inline std::array<double, 4> q1_values(double xi, double eta)
{
  return {0.25 * (1 - xi) * (1 - eta), 0.25 * (1 + xi) * (1 - eta),
          0.25 * (1 + xi) * (1 + eta), 0.25 * (1 - xi) * (1 + eta)};
}

/// Reference-coordinate derivatives (d/dxi, d/deta).
inline std::array<std::array<double, 2>, 4> q1_ref_gradients(double xi, double eta)
{
  return {{{-0.25 * (1 - eta), -0.25 * (1 - xi)},
           {0.25 * (1 - eta), -0.25 * (1 + xi)},
           {0.25 * (1 + eta), 0.25 * (1 + xi)},
           {-0.25 * (1 + eta), 0.25 * (1 - xi)}}};
}

/// One tensor-product quadrature point of a cell, with physical coordinates, the
/// integration weight (including the Jacobian h^2/4) and Q1 values/gradients.
struct QuadPoint
{
  double x;
  double y;
  double weight;
  std::array<double, 4> phi;
  std::array<std::array<double, 2>, 4> grad;
};

/// Quadrature points of every cell with an n x n Gauss rule; shared by all cells of the
/// uniform mesh up to translation.
class CellQuadrature
{
public:
  CellQuadrature(const Mesh &mesh, int order) : mesh_(&mesh)
  {
    const auto &g = gauss_rule(order);
    const double h = mesh.h();
    for (std::size_t b = 0; b < g.points.size(); ++b)
      for (std::size_t a = 0; a < g.points.size(); ++a)
      {
        const double xi = g.points[a];
        const double eta = g.points[b];
        QuadPoint q;
        q.x = 0.5 * h * (xi + 1.0);
        q.y = 0.5 * h * (eta + 1.0);
        q.weight = g.weights[a] * g.weights[b] * 0.25 * h * h;
        q.phi = q1_values(xi, eta);
        const auto rg = q1_ref_gradients(xi, eta);
        for (int k = 0; k < 4; ++k)
          q.grad[k] = {rg[k][0] * 2.0 / h, rg[k][1] * 2.0 / h};
        ref_.push_back(q);
      }
  }

  /// Points of `cell` in physical coordinates.
  std::vector<QuadPoint> points(std::size_t cell) const
  {
    const auto o = mesh_->cell_origin(cell);
    std::vector<QuadPoint> out = ref_;
    for (auto &q : out)
    {
      q.x += o[0];
      q.y += o[1];
    }
    return out;
  }

  std::size_t size() const { return ref_.size(); }

private:
  const Mesh *mesh_;
  std::vector<QuadPoint> ref_;
};

}  // namespace gpj
