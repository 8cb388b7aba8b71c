// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include "gpj/mesh.hpp"

using gpj::Mesh;

TEST(Mesh, CountsAndSpacing)
{
  const Mesh m(8.0, 128);
  EXPECT_DOUBLE_EQ(m.h(), 0.125);
  EXPECT_EQ(m.n_nodes(), 129u * 129u);
  EXPECT_EQ(m.n_interior(), 127u * 127u);
  EXPECT_EQ(m.n_cells_total(), 128u * 128u);
}

TEST(Mesh, SmallestMeshHasOneInteriorNode)
{
  const Mesh m(1.0, 2);
  EXPECT_EQ(m.n_interior(), 1u);
  EXPECT_EQ(m.interior_index(m.node_id(1, 1)), 0);
  EXPECT_DOUBLE_EQ(m.node_x(m.node_id(1, 1)), 0.0);
  EXPECT_DOUBLE_EQ(m.node_y(m.node_id(1, 1)), 0.0);
}

TEST(Mesh, RejectsDegenerateInput)
{
  EXPECT_THROW(Mesh(1.0, 1), gpj::InvalidMeshError);
  EXPECT_THROW(Mesh(0.0, 4), gpj::InvalidMeshError);
  EXPECT_THROW(Mesh(-2.0, 4), gpj::InvalidMeshError);
}

TEST(Mesh, RowMajorNodesWithYOuter)
{
  const Mesh m(2.0, 4);
  EXPECT_EQ(m.node_id(0, 0), 0u);
  EXPECT_EQ(m.node_id(4, 0), 4u);
  EXPECT_EQ(m.node_id(0, 1), 5u);
  EXPECT_DOUBLE_EQ(m.node_x(7), -2.0 + 2 * 1.0);
  EXPECT_DOUBLE_EQ(m.node_y(7), -2.0 + 1 * 1.0);
}

TEST(Mesh, InteriorIndexIsDenseAndOrdered)
{
  const Mesh m(1.0, 5);
  std::ptrdiff_t expected = 0;
  for (std::size_t id = 0; id < m.n_nodes(); ++id)
  {
    if (m.is_boundary(id))
    {
      EXPECT_EQ(m.interior_index(id), gpj::kBoundary);
      continue;
    }
    EXPECT_EQ(m.interior_index(id), expected);
    EXPECT_EQ(m.node_of_interior(static_cast<std::size_t>(expected)), id);
    ++expected;
  }
  EXPECT_EQ(static_cast<std::size_t>(expected), m.n_interior());
}

TEST(Mesh, BoundaryMaskMarksTheFrame)
{
  const Mesh m(1.0, 3);
  const auto &mask = m.boundary_mask();
  std::size_t count = 0;
  for (bool b : mask)
    count += b;
  EXPECT_EQ(count, 4u * 3u);
}

TEST(Mesh, CellNodesCounterclockwise)
{
  const Mesh m(1.0, 4);
  const std::size_t cell = 1 * 4 + 2;  // ci = 2, cj = 1
  const auto nodes = m.cell_nodes(cell);
  EXPECT_EQ(nodes[0], m.node_id(2, 1));
  EXPECT_EQ(nodes[1], m.node_id(3, 1));
  EXPECT_EQ(nodes[2], m.node_id(3, 2));
  EXPECT_EQ(nodes[3], m.node_id(2, 2));
  const auto o = m.cell_origin(cell);
  EXPECT_DOUBLE_EQ(o[0], 0.0);
  EXPECT_DOUBLE_EQ(o[1], -0.5);
  // Signed area of the node polygon is positive.
  double area = 0.0;
  for (int k = 0; k < 4; ++k)
  {
    const auto a = nodes[k], b = nodes[(k + 1) % 4];
    area += m.node_x(a) * m.node_y(b) - m.node_x(b) * m.node_y(a);
  }
  EXPECT_NEAR(0.5 * area, m.h() * m.h(), 1e-14);
}

TEST(Mesh, BuildMeshSharesIdentity)
{
  const auto a = gpj::build_mesh(3.0, 6);
  const auto b = gpj::build_mesh(3.0, 6);
  const auto c = gpj::build_mesh(3.0, 8);
  EXPECT_TRUE(a->same_as(*b));
  EXPECT_FALSE(a->same_as(*c));
}
