// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdio>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gpj/energy.hpp"
#include "gpj/iterate.hpp"
#include "gpj/linesearch.hpp"
#include "gpj/linsolve.hpp"
#include "gpj/operators.hpp"
#include "gpj/oracle.hpp"
#include "gpj/potentials.hpp"

namespace gpj
{

struct CheckResult
{
  enum class Status
  {
    Pass,
    Fail,
    Skip
  };
  std::string name;
  Status status = Status::Fail;
  std::string detail;
};

inline const char *to_string(CheckResult::Status s)
{
  switch (s)
  {
    case CheckResult::Status::Pass: return "PASS";
    case CheckResult::Status::Fail: return "FAIL";
    case CheckResult::Status::Skip: return "SKIP";
  }
  return "?";
}

struct ValidateOptions
{
  int n_cells = 8;             ///< mesh for the small oracle problems
  bool flip_rotation_sign = false;  ///< fault injection: negate the C block after assembly
  bool rate = true;            ///< include the (slower) convergence-rate experiment
};

namespace detail
{

inline std::string fmt(const char *f, double a, double b = 0.0)
{
  char buf[160];
  std::snprintf(buf, sizeof(buf), f, a, b);
  return buf;
}

inline CheckResult verdict(std::string name, bool ok, std::string detail)
{
  return {std::move(name), ok ? CheckResult::Status::Pass : CheckResult::Status::Fail,
          std::move(detail)};
}

inline Problem validation_problem(int n_cells, double omega, double kappa, bool flip)
{
  ModelParams p;
  p.omega = omega;
  p.kappa = kappa;
  p.W = harmonic_potential();
  std::function<void(BlockOperator &)> tweak;
  if (flip)
    tweak = [](BlockOperator &op) {
      op.C = -op.C;
      const SparseMatrix oc = op.omega * op.C, moc = -op.omega * op.C;
      op.S = block2x2(op.A, oc, moc, op.A);
    };
  return Problem(build_mesh(4.0, n_cells), p, tweak);
}

}  // namespace detail

/// Rate experiment around a converged state: fixed shift with predicted rate 1/2.
struct RateExperiment
{
  RateReport report;
  std::vector<double> errors;
  SpectrumNear spectrum;
};

/// Starts from u* plus a complex perturbation and iterates the undamped shifted J-step with
/// sigma = mu - 2 lambda*, mu being the eigenvalue of J(u*) closest to lambda*. Errors are
/// recorded until they reach `floor`.
inline RateExperiment rate_experiment(const Problem &P, const ComplexField &u_star,
                                      double perturbation = 1e-2, double floor = 1e-10,
                                      int max_steps = 80, std::uint64_t seed = 7)
{
  RateExperiment out;
  const double lambda = rayleigh(P, u_star);
  const auto near = j_spectrum_near(P, u_star, -lambda);
  const double sigma = near.mu - 2.0 * lambda;
  out.spectrum = j_spectrum_near(P, u_star, sigma);
  if (!out.spectrum.converged)
    throw Error("rate experiment: eigenvalue nearest to the shift did not converge");
  out.report.lambda_star = out.spectrum.lambda_star;
  out.report.mu = out.spectrum.mu;
  out.report.sigma = sigma;
  out.report.predicted = predicted_rate(out.spectrum.lambda_star, out.spectrum.mu, sigma);

  const ComplexField noise = random_field(P.mesh(), seed);
  ComplexField u = normalize(combine(1.0, u_star, perturbation, noise), P.mass());
  out.errors.push_back(v_error(P, u, u_star));
  for (int k = 0; k < max_steps && out.errors.back() > floor; ++k)
  {
    u = j_step_shifted(P, u, sigma).u;
    out.errors.push_back(v_error(P, u, u_star));
  }
  out.report.observed = measure_rate(out.errors, 8);
  return out;
}

/// Oracle suite: energy paths, finite-difference derivatives, Sherman-Morrison against
/// dense LU, line-search polynomial, the linear spectrum and the local convergence rate.
inline std::vector<CheckResult> run_validation(const ValidateOptions &opt = {},
                                               std::ostream *progress = nullptr)
{
  using detail::fmt;
  using detail::verdict;
  std::vector<CheckResult> out;
  auto add = [&](CheckResult r) {
    if (progress)
      *progress << to_string(r.status) << "  " << r.name << "  " << r.detail << std::endl;
    out.push_back(std::move(r));
  };
  auto guarded = [&](const std::string &name, const std::function<CheckResult()> &f) {
    try
    {
      add(f());
    }
    catch (const std::exception &e)
    {
      add({name, CheckResult::Status::Fail, std::string("error: ") + e.what()});
    }
  };

  const int n = opt.n_cells;
  const Problem rot = detail::validation_problem(n, 0.6, 50.0, opt.flip_rotation_sign);
  const ComplexField ur = normalize(random_field(rot.mesh(), 1), rot.mass());
  const ComplexField vr = random_field(rot.mesh(), 2);
  const auto dense_unknowns = static_cast<Eigen::Index>(2 * rot.n());
  const bool dense_ok = dense_unknowns <= kDenseCap;
  auto skip_dense = [&](const std::string &name) {
    add({name, CheckResult::Status::Skip,
         "2N = " + std::to_string(dense_unknowns) + " exceeds the dense cap of " +
             std::to_string(kDenseCap)});
  };

  guarded("energy identity", [&] {
    const double a = energy(rot, ur), b = energy_quadratic_form(rot, ur);
    const double rel = std::abs(a - b) / std::abs(a);
    return verdict("energy identity", rel <= 1e-11, fmt("quadrature vs matrix rel diff %.2e", rel));
  });

  guarded("fd gradient", [&] {
    const auto rep = fd_gradient_check(rot, ur, vr, {1e-2, 1e-3});
    const double ratio = rep.errors[1] / rep.errors[0];
    return verdict("fd gradient", rep.errors[1] <= 1e-4 && ratio <= 0.02,
                   fmt("err(1e-3) %.2e, ratio %.3g", rep.errors[1], ratio));
  });

  guarded("fd jacobian", [&] {
    const auto rep = fd_jacobian_check(rot, ur, vr, {1e-2, 1e-3});
    const double ratio = rep.errors[1] / rep.errors[0];
    return verdict("fd jacobian", rep.errors[1] <= 1e-4 && ratio <= 0.02,
                   fmt("err(1e-3) %.2e, ratio %.3g", rep.errors[1], ratio));
  });

  guarded("J(u)u = A(u)u", [&] {
    const Vector Ju = build_J_op(rot, ur, 0.0).apply(ur.stacked());
    const Vector Au = apply_A_nl(rot, ur);
    const double rel = (Ju - Au).norm() / Au.norm();
    return verdict("J(u)u = A(u)u", rel <= 1e-12, fmt("rel diff %.2e", rel));
  });

  guarded("line search polynomial", [&] {
    double worst = 0.0;
    for (int k = 0; k < 10; ++k)
    {
      const ComplexField w = random_field(rot.mesh(), 100 + k);
      const double tau = 0.1 + 0.18 * k;
      const auto coeffs = compute_coeffs(rot, ur, w);
      const double direct = energy(rot, normalize(combine(1.0 - tau, ur, tau, w), rot.mass()));
      worst = std::max(worst, std::abs(eval_f(coeffs, tau) - direct) / std::abs(direct));
    }
    return verdict("line search polynomial", worst <= 1e-11, fmt("max rel diff %.2e", worst));
  });

  if (!dense_ok)
    skip_dense("sherman-morrison vs dense");
  else
    guarded("sherman-morrison vs dense", [&] {
      double worst = 0.0;
      for (int k = 0; k < 5; ++k)
      {
        const ComplexField u = normalize(random_field(rot.mesh(), 200 + k), rot.mass());
        const double sigma = k < 3 ? sufficient_shift(rot, u) : -rayleigh(rot, u) + 0.37 * k;
        const JOperator J = build_J_op(rot, u, sigma);
        const Vector rhs = random_field(rot.mesh(), 300 + k).stacked();
        const auto sm = solve_sherman_morrison(J.B, J.density_u, J.mass_u, J.c, rhs,
                                               k < 3 ? SolveMode::Spd : SolveMode::Indefinite,
                                               {1e-13, 0});
        const Vector x = J.dense().partialPivLu().solve(rhs);
        worst = std::max(worst, (sm.x - x).norm() / x.norm());
      }
      return verdict("sherman-morrison vs dense", worst <= 1e-9, fmt("max rel error %.2e", worst));
    });

  const Problem lin = detail::validation_problem(n, 0.0, 0.0, false);
  if (!dense_ok)
    skip_dense("linear spectrum");
  else
    guarded("linear spectrum", [&] {
      const auto eig = dense_sym_eig(lin.S(), lin.mass_block(), 1);
      StrategyConfig cfg;
      cfg.tol = 1e-10;
      cfg.max_iter = 200;
      const auto h = run(lin, cfg, bubble_initial(lin.mesh(), lin.mass()));
      const double lam = h.last().lambda;
      const double rel = std::abs(lam - eig.values[0]) / eig.values[0];
      return verdict("linear spectrum", h.converged && rel <= 1e-8,
                     fmt("lambda_J %.12g, rel diff %.2e", lam, rel));
    });

  if (!opt.rate)
    add({"convergence rate", CheckResult::Status::Skip, "disabled"});
  else if (!dense_ok)
    skip_dense("convergence rate");
  else
    guarded("convergence rate", [&] {
      const Problem P = detail::validation_problem(n, 0.0, 10.0, false);
      StrategyConfig cfg;
      cfg.tol = 1e-11;
      cfg.max_iter = 200;
      const auto h = run(P, cfg, bubble_initial(P.mesh(), P.mass()));
      if (!h.converged)
        return verdict("convergence rate", false, "reference state did not converge");
      const auto ex = rate_experiment(P, h.final_u);
      const auto &r = ex.report;
      const bool ok = std::abs(r.observed - r.predicted) <= 0.1;
      return verdict("convergence rate", ok, fmt("predicted %.3f observed %.3f", r.predicted, r.observed));
    });

  return out;
}

inline bool all_passed(const std::vector<CheckResult> &results)
{
  for (const auto &r : results)
    if (r.status == CheckResult::Status::Fail)
      return false;
  return true;
}

inline void print_table(const std::vector<CheckResult> &results, std::ostream &os)
{
  std::size_t width = 5;
  for (const auto &r : results)
    width = std::max(width, r.name.size());
  for (const auto &r : results)
  {
    os << to_string(r.status) << "  " << r.name << std::string(width - r.name.size() + 2, ' ')
       << r.detail << '\n';
  }
}

}  // namespace gpj
