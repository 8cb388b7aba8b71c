// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <vector>

#include "gpj/errors.hpp"

namespace gpj
{

inline constexpr std::ptrdiff_t kBoundary = -1;

/// Uniform Cartesian Q1 mesh of (-L, L)^2.
///
/// Nodes are numbered row-major (y outer, x inner): node (i, j) has id j*(n+1)+i and sits at
/// (-L + i*h, -L + j*h). Cell (ci, cj) has id cj*n+ci and lists its nodes counterclockwise
/// from the lower-left corner. Boundary nodes are eliminated; interior nodes carry a dense
/// index 0..n_interior-1 in the same row-major order.
class Mesh
{
public:
  Mesh(double half_width, int cells_per_side) : L_(half_width), n_(cells_per_side)
  {
    if (cells_per_side < 2)
      throw InvalidMeshError("mesh needs at least 2 cells per side to have an interior node");
    if (!(half_width > 0.0))
      throw InvalidMeshError("mesh half-width must be positive");
    h_ = 2.0 * L_ / n_;
    const int np = n_ + 1;
    boundary_.resize(static_cast<std::size_t>(np) * np);
    interior_.resize(boundary_.size());
    std::ptrdiff_t next = 0;
    for (int j = 0; j < np; ++j)
      for (int i = 0; i < np; ++i)
      {
        const auto id = node_id(i, j);
        const bool b = (i == 0 || j == 0 || i == n_ || j == n_);
        boundary_[id] = b;
        interior_[id] = b ? kBoundary : next++;
      }
    n_interior_ = static_cast<std::size_t>(next);
    interior_to_node_.resize(n_interior_);
    for (std::size_t id = 0; id < interior_.size(); ++id)
      if (interior_[id] != kBoundary)
        interior_to_node_[static_cast<std::size_t>(interior_[id])] = id;
  }

  double L() const { return L_; }
  int n_cells() const { return n_; }
  double h() const { return h_; }
  std::size_t n_nodes() const { return boundary_.size(); }
  std::size_t n_interior() const { return n_interior_; }
  std::size_t n_cells_total() const { return static_cast<std::size_t>(n_) * n_; }

  std::size_t node_id(int i, int j) const
  {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(n_ + 1) +
           static_cast<std::size_t>(i);
  }
  double coord(int i) const { return -L_ + i * h_; }
  double node_x(std::size_t id) const { return coord(static_cast<int>(id % (n_ + 1))); }
  double node_y(std::size_t id) const { return coord(static_cast<int>(id / (n_ + 1))); }

  bool is_boundary(std::size_t id) const { return boundary_[id]; }
  const std::vector<bool> &boundary_mask() const { return boundary_; }

  /// Dense interior index or kBoundary.
  std::ptrdiff_t interior_index(std::size_t id) const { return interior_[id]; }
  std::size_t node_of_interior(std::size_t k) const { return interior_to_node_[k]; }

  std::array<std::size_t, 4> cell_nodes(std::size_t cell) const
  {
    const int ci = static_cast<int>(cell % n_);
    const int cj = static_cast<int>(cell / n_);
    return {node_id(ci, cj), node_id(ci + 1, cj), node_id(ci + 1, cj + 1), node_id(ci, cj + 1)};
  }

  /// Lower-left corner of a cell.
  std::array<double, 2> cell_origin(std::size_t cell) const
  {
    return {coord(static_cast<int>(cell % n_)), coord(static_cast<int>(cell / n_))};
  }

  bool same_as(const Mesh &other) const { return L_ == other.L_ && n_ == other.n_; }

private:
  double L_;
  int n_;
  double h_;
  std::size_t n_interior_ = 0;
  std::vector<bool> boundary_;
  std::vector<std::ptrdiff_t> interior_;
  std::vector<std::size_t> interior_to_node_;
};

using MeshPtr = std::shared_ptr<const Mesh>;

inline MeshPtr build_mesh(double L, int n_cells)
{
  return std::make_shared<const Mesh>(L, n_cells);
}

}  // namespace gpj
