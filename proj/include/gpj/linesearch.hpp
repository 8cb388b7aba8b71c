// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cmath>

#include "gpj/field.hpp"
#include "gpj/operators.hpp"

namespace gpj
{

/// Precomputed terms of the energy along the normalized segment (1-tau) u + tau w:
/// quadratic form (alpha), quartic interaction (beta) and squared mass (zeta).
struct LineSearchCoeffs
{
  std::array<double, 3> alpha{};
  std::array<double, 5> beta{};
  std::array<double, 3> zeta{};
};

inline LineSearchCoeffs compute_coeffs(const Problem &P, const ComplexField &u,
                                       const ComplexField &w)
{
  P.check(u);
  P.check(w);
  LineSearchCoeffs k;
  const Vector uv = u.stacked();
  const Vector wv = w.stacked();
  const Vector Su = P.S() * uv;
  k.alpha = {uv.dot(Su), 2.0 * wv.dot(Su), wv.dot(P.S() * wv)};

  const double kappa = P.kappa();
  if (kappa != 0.0)
  {
    const Mesh &mesh = *u.mesh;
    const CellQuadrature quad(mesh, 3);
    double uu = 0, uw_u = 0, mixed = 0, uw_w = 0, ww = 0;
    for (std::size_t c = 0; c < mesh.n_cells_total(); ++c)
    {
      const auto ur = cell_values(mesh, u.re, c), ui = cell_values(mesh, u.im, c);
      const auto wr = cell_values(mesh, w.re, c), wi = cell_values(mesh, w.im, c);
      for (const auto &q : quad.points(c))
      {
        const double a = interpolate(ur, q), b = interpolate(ui, q);
        const double x = interpolate(wr, q), y = interpolate(wi, q);
        const double nu = a * a + b * b;
        const double nw = x * x + y * y;
        const double re = a * x + b * y;  // Re(u conj w)
        uu += q.weight * nu * nu;
        uw_u += q.weight * re * nu;
        mixed += q.weight * (nw * nu + 2.0 * re * re);
        uw_w += q.weight * re * nw;
        ww += q.weight * nw * nw;
      }
    }
    k.beta = {0.5 * kappa * uu, 2.0 * kappa * uw_u, kappa * mixed, 2.0 * kappa * uw_w,
              0.5 * kappa * ww};
  }
  const Vector Mu_r = P.mass() * u.re, Mu_i = P.mass() * u.im;
  k.zeta = {u.re.dot(Mu_r) + u.im.dot(Mu_i), 2.0 * (w.re.dot(Mu_r) + w.im.dot(Mu_i)),
            h_inner(w, w, P.mass())};
  return k;
}

/// Energy of normalize((1-tau) u + tau w).
inline double eval_f(const LineSearchCoeffs &k, double tau)
{
  const double s = 1.0 - tau;
  const double mass = s * s * k.zeta[0] + s * tau * k.zeta[1] + tau * tau * k.zeta[2];
  if (!(mass > 0.0))
    throw DegenerateCombinationError("combination of iterate and direction has zero mass");
  const double s2 = 1.0 / mass;
  const double quad = s * s * k.alpha[0] + s * tau * k.alpha[1] + tau * tau * k.alpha[2];
  double quart = 0.0;
  double tp = 1.0;
  for (int j = 0; j <= 4; ++j)
  {
    quart += std::pow(s, 4 - j) * tp * k.beta[static_cast<std::size_t>(j)];
    tp *= tau;
  }
  return 0.5 * (s2 * quad + s2 * s2 * quart);
}

struct LineSearchResult
{
  double tau;
  double f;  ///< energy of the next iterate
  int evaluations;
};

/// Golden-section search for a local minimizer of eval_f on [tau_min, tau_max].
template <class F>
LineSearchResult golden_section(F &&f, double tau_min, double tau_max, double tol = 1e-3,
                                int max_eval = 40)
{
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = tau_min, b = tau_max;
  double x1 = b - g * (b - a), x2 = a + g * (b - a);
  double f1 = f(x1), f2 = f(x2);
  int evals = 2;
  while (b - a > tol && evals < max_eval)
  {
    if (f1 <= f2)
    {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - g * (b - a);
      f1 = f(x1);
    }
    else
    {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + g * (b - a);
      f2 = f(x2);
    }
    ++evals;
  }
  return f1 <= f2 ? LineSearchResult{x1, f1, evals} : LineSearchResult{x2, f2, evals};
}

inline LineSearchResult golden_section_min(const LineSearchCoeffs &k, double tau_min = 1e-4,
                                           double tau_max = 2.0, double tol = 1e-3)
{
  auto res = golden_section([&](double t) { return eval_f(k, t); }, tau_min, tau_max, tol);
  // The undamped step is always a candidate; golden section alone may stop a hair short.
  if (tau_min <= 1.0 && 1.0 <= tau_max)
  {
    const double f1 = eval_f(k, 1.0);
    if (f1 < res.f)
      res = {1.0, f1, res.evaluations + 1};
  }
  return res;
}

}  // namespace gpj
