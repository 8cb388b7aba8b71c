// SPDX-License-Identifier: Apache-2.0
#include <cmath>

#include <gtest/gtest.h>

#include "gpj/quadrature.hpp"

namespace
{

double integrate_monomial(const gpj::GaussRule &g, int p)
{
  double s = 0.0;
  for (std::size_t k = 0; k < g.points.size(); ++k)
    s += g.weights[k] * std::pow(g.points[k], p);
  return s;
}

}  // namespace

class GaussExactness : public ::testing::TestWithParam<int>
{
};

TEST_P(GaussExactness, IntegratesPolynomialsUpToDegree2nMinus1)
{
  const int n = GetParam();
  const auto &g = gpj::gauss_rule(n);
  ASSERT_EQ(g.points.size(), static_cast<std::size_t>(n));
  for (int p = 0; p <= 2 * n - 1; ++p)
  {
    const double exact = p % 2 ? 0.0 : 2.0 / (p + 1);
    EXPECT_NEAR(integrate_monomial(g, p), exact, 1e-14) << "degree " << p;
  }
  const int p = 2 * n;
  EXPECT_GT(std::abs(integrate_monomial(g, p) - 2.0 / (p + 1)), 1e-6);
}

INSTANTIATE_TEST_SUITE_P(Rules, GaussExactness, ::testing::Values(1, 2, 3, 5));

TEST(Gauss, UnsupportedOrderThrows) { EXPECT_THROW(gpj::gauss_rule(4), gpj::Error); }

TEST(Q1, PartitionOfUnityAndNodalProperty)
{
  const double corners[4][2] = {{-1, -1}, {1, -1}, {1, 1}, {-1, 1}};
  for (int k = 0; k < 4; ++k)
  {
    const auto v = gpj::q1_values(corners[k][0], corners[k][1]);
    for (int j = 0; j < 4; ++j)
      EXPECT_DOUBLE_EQ(v[j], j == k ? 1.0 : 0.0);
  }
  const auto v = gpj::q1_values(0.3, -0.7);
  EXPECT_NEAR(v[0] + v[1] + v[2] + v[3], 1.0, 1e-15);
  const auto g = gpj::q1_ref_gradients(0.3, -0.7);
  EXPECT_NEAR(g[0][0] + g[1][0] + g[2][0] + g[3][0], 0.0, 1e-15);
  EXPECT_NEAR(g[0][1] + g[1][1] + g[2][1] + g[3][1], 0.0, 1e-15);
}

TEST(Q1, ReferenceGradientsMatchFiniteDifferences)
{
  const double xi = 0.21, eta = -0.43, d = 1e-6;
  const auto g = gpj::q1_ref_gradients(xi, eta);
  const auto px = gpj::q1_values(xi + d, eta), mx = gpj::q1_values(xi - d, eta);
  const auto py = gpj::q1_values(xi, eta + d), my = gpj::q1_values(xi, eta - d);
  for (int k = 0; k < 4; ++k)
  {
    EXPECT_NEAR(g[k][0], (px[k] - mx[k]) / (2 * d), 1e-9);
    EXPECT_NEAR(g[k][1], (py[k] - my[k]) / (2 * d), 1e-9);
  }
}

TEST(CellQuadrature, PhysicalPointsAndWeights)
{
  const gpj::Mesh m(2.0, 4);
  for (int order : {2, 3, 5})
  {
    const gpj::CellQuadrature q(m, order);
    EXPECT_EQ(q.size(), static_cast<std::size_t>(order * order));
    const std::size_t cell = 5;  // ci = 1, cj = 1: [-1, 0]^2
    double wsum = 0.0, xint = 0.0, x2y2 = 0.0;
    for (const auto &p : q.points(cell))
    {
      EXPECT_GE(p.x, -1.0);
      EXPECT_LE(p.x, 0.0);
      EXPECT_GE(p.y, -1.0);
      EXPECT_LE(p.y, 0.0);
      wsum += p.weight;
      xint += p.weight * p.x;
      x2y2 += p.weight * p.x * p.x * p.y * p.y;
    }
    EXPECT_NEAR(wsum, 1.0, 1e-14);
    EXPECT_NEAR(xint, -0.5, 1e-14);
    EXPECT_NEAR(x2y2, 1.0 / 9.0, 1e-14);
  }
}

TEST(CellQuadrature, PhysicalGradientsScaleWithH)
{
  const gpj::Mesh m(1.0, 8);
  const gpj::CellQuadrature q(m, 2);
  const auto pts = q.points(0);
  // phi_1 rises from 0 to 1 across the cell in x: slope (1 - eta)/2 / h on average 1/h.
  double avg = 0.0;
  for (const auto &p : pts)
    avg += p.weight * p.grad[1][0];
  EXPECT_NEAR(avg / (m.h() * m.h()), 0.5 / m.h(), 1e-12);
}
