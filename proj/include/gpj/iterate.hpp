// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "gpj/energy.hpp"
#include "gpj/field.hpp"
#include "gpj/linesearch.hpp"
#include "gpj/linsolve.hpp"
#include "gpj/operators.hpp"

namespace gpj
{

enum class Method
{
  J,
  A
};

enum class Phase
{
  Damped,
  Shifted
};

inline const char *to_string(Phase p) { return p == Phase::Damped ? "damped" : "shifted"; }

struct Damping
{
  bool optimal = true;
  double tau = 1.0;      ///< fixed step size when !optimal
  double tau_min = 1e-4;
  double tau_max = 2.0;  ///< upper end of the line search
};

struct ShiftDamped
{
  bool automatic = true;  ///< 4/3 E(u^0)
  double sigma = 0.0;
};

struct ShiftAccel
{
  enum class Kind
  {
    None,      ///< keep the damped-phase shift
    Rayleigh,  ///< sigma = -lambda^n
    RayleighClamped
  };
  Kind kind = Kind::Rayleigh;
  double lo = 0.0;
  double hi = 0.0;
};

struct StrategyConfig
{
  Method method = Method::J;
  Damping damping;
  ShiftDamped shift_damped;
  ShiftAccel shift_accel;
  double switch_tol = 1e-3;
  double tol = 1e-8;
  int max_iter = 1000;
  /// Keep every iterate in the history (rate measurements on small meshes).
  bool record_fields = false;
  SolveOptions inner;

  void validate() const
  {
    if (!damping.optimal && !(damping.tau > 0.0 && damping.tau <= 2.0))
      throw ConfigError("strategy.damping: fixed tau must lie in (0, 2]");
    if (!(damping.tau_min > 0.0 && damping.tau_min < damping.tau_max))
      throw ConfigError("strategy.damping: need 0 < tau_min < tau_max");
    if (!(tol > 0.0))
      throw ConfigError("strategy.tol must be positive");
    if (switch_tol < tol && switch_tol != 0.0)
      throw ConfigError("strategy.switch_tol must be >= strategy.tol (or 0 to never shift)");
    if (max_iter < 0)
      throw ConfigError("strategy.max_iter must be non-negative");
    if (shift_accel.kind == ShiftAccel::Kind::RayleighClamped && !(shift_accel.lo <= shift_accel.hi))
      throw ConfigError("strategy.shift_accel: clamp interval is empty");
  }
};

struct IterationState
{
  int n = 0;
  Phase phase = Phase::Damped;
  double lambda = 0.0;
  double energy = 0.0;
  double residual = 0.0;
  double tau = 0.0;
  double sigma = 0.0;
  double gamma = 0.0;
  double mass_tilde = 1.0;    ///< ||u~^{n}|| before normalization
  double ortho_defect = 0.0;  ///< |(u~^{n} - u^{n-1}, u^{n-1})_H|
  double min_nodal = 0.0;     ///< min over real nodal coefficients
  double solve_residual = 0.0;  ///< certified residual of the step's linear solves
  double sm_denominator = 1.0;
  double positivity_bound = 0.0;  ///< 2 kappa ||u||_{L^6}^3
  bool energy_increase = false;
  ComplexField u;  ///< empty unless StrategyConfig::record_fields
};

struct RunHistory
{
  std::vector<IterationState> steps;
  ComplexField final_u;
  bool converged = false;
  int energy_increases = 0;
  int shift_retries = 0;
  std::vector<std::string> log;

  const IterationState &last() const { return steps.back(); }
};

struct RunAborted : Error
{
  RunAborted(const std::string &what, RunHistory h) : Error(what), history(std::move(h)) {}
  RunHistory history;
};

/// Outcome of one outer step before the next state is evaluated.
struct StepResult
{
  ComplexField u;  ///< normalized next iterate
  double tau = 1.0;
  double gamma = 0.0;
  double mass_tilde = 1.0;
  double ortho_defect = 0.0;
  double solve_residual = 0.0;
  double sm_denominator = 1.0;
  double predicted_energy = std::numeric_limits<double>::quiet_NaN();
};

namespace detail
{

/// u~ = (1 - tau) u + tau gamma w, normalized, with the tau choice and telemetry.
inline StepResult damped_combination(const Problem &P, const ComplexField &u,
                                     const ComplexField &w_raw, const Damping &damping)
{
  StepResult out;
  const double inv_gamma = h_inner(w_raw, u, P.mass());
  if (inv_gamma == 0.0 || !std::isfinite(inv_gamma))
    throw Error("degenerate direction: (w, u)_H = 0");
  out.gamma = 1.0 / inv_gamma;
  const ComplexField w = scaled(w_raw, out.gamma);
  if (damping.optimal)
  {
    const auto coeffs = compute_coeffs(P, u, w);
    const auto ls = golden_section_min(coeffs, damping.tau_min, damping.tau_max);
    out.tau = ls.tau;
    out.predicted_energy = ls.f;
  }
  else
  {
    out.tau = damping.tau;
  }
  const ComplexField ut = combine(1.0 - out.tau, u, out.tau, w);
  out.mass_tilde = l2_norm(ut, P.mass());
  out.ortho_defect = std::abs(h_inner(combine(1.0, ut, -1.0, u), u, P.mass()));
  out.u = normalize(ut, P.mass());
  return out;
}

inline SolveOptions with_defaults(SolveOptions o, Eigen::Index n)
{
  if (o.max_iter <= 0)
    o.max_iter = default_max_iter(n);
  return o;
}

}  // namespace detail

/// w = J_sigma(u)^{-1} M u through Sherman-Morrison.
inline ShermanMorrisonResult j_direction(const Problem &P, const ComplexField &u, double sigma,
                                         SolveMode mode, SolveOptions opts = {})
{
  const JOperator J = build_J_op(P, u, sigma);
  const SymmetricSolver solver(J.B, mode, detail::with_defaults(opts, J.B.rows()));
  return solve_sherman_morrison(solver, J.B, J.density_u, J.mass_u, J.c, J.mass_u);
}

/// One damped J-step with a coercive shift.
inline StepResult j_step_damped(const Problem &P, const ComplexField &u, double sigma,
                                const Damping &damping, SolveOptions opts = {},
                                SolveMode mode = SolveMode::Spd)
{
  const auto sm = j_direction(P, u, sigma, mode, opts);
  auto out = detail::damped_combination(P, u, ComplexField::from_stacked(u.mesh, sm.x), damping);
  out.solve_residual = std::max(sm.inner_residual, sm.residual);
  out.sm_denominator = sm.denominator;
  return out;
}

/// Fixed step size overload.
inline StepResult j_step_damped(const Problem &P, const ComplexField &u, double sigma, double tau,
                                SolveOptions opts = {})
{
  Damping d;
  d.optimal = false;
  d.tau = tau;
  return j_step_damped(P, u, sigma, d, opts);
}

/// Undamped shifted J-step u+ = w / ||w||, w = J_sigma(u)^{-1} M u, symmetric-indefinite
/// inner solves. The sign is fixed so that (u+, u)_H > 0, i.e. u+ = gamma w / ||gamma w||.
inline StepResult j_step_shifted(const Problem &P, const ComplexField &u, double sigma,
                                 SolveOptions opts = {})
{
  const auto sm = j_direction(P, u, sigma, SolveMode::Indefinite, opts);
  Damping d;
  d.optimal = false;
  d.tau = 1.0;
  auto out = detail::damped_combination(P, u, ComplexField::from_stacked(u.mesh, sm.x), d);
  out.solve_residual = std::max(sm.inner_residual, sm.residual);
  out.sm_denominator = sm.denominator;
  return out;
}

/// Projected Sobolev gradient step with A_sigma(u) = A(u) + sigma I; gamma^{-1} = (u^, u)_H.
inline StepResult a_step(const Problem &P, const ComplexField &u, double sigma,
                         const Damping &damping, SolveMode mode = SolveMode::Spd,
                         SolveOptions opts = {})
{
  const SparseMatrix A = build_A_op(P, u, sigma);
  const SymmetricSolver solver(A, mode, detail::with_defaults(opts, A.rows()));
  const auto sol = solver.solve(P.mass_block() * u.stacked());
  auto out = detail::damped_combination(P, u, ComplexField::from_stacked(u.mesh, sol.x), damping);
  out.solve_residual = sol.residual;
  return out;
}

inline StepResult a_step(const Problem &P, const ComplexField &u, double sigma, double tau,
                         SolveMode mode = SolveMode::Spd, SolveOptions opts = {})
{
  Damping d;
  d.optimal = false;
  d.tau = tau;
  return a_step(P, u, sigma, d, mode, opts);
}

/// Shift for the accelerated phase. The clamp acts on the eigenvalue estimate; the
/// operator shift is its negative.
inline double next_shift(double lambda, const ShiftAccel &accel, double fixed_sigma)
{
  switch (accel.kind)
  {
    case ShiftAccel::Kind::None: return fixed_sigma;
    case ShiftAccel::Kind::Rayleigh: return -lambda;
    case ShiftAccel::Kind::RayleighClamped: return -std::clamp(lambda, accel.lo, accel.hi);
  }
  return fixed_sigma;
}

/// lambda, E and residual of a normalized iterate.
inline IterationState evaluate_state(const Problem &P, const ComplexField &u)
{
  IterationState s;
  s.energy = energy(P, u);
  s.lambda = rayleigh(P, u);
  s.residual = residual_l2(P, u, s.lambda);
  s.min_nodal = u.re.size() ? u.re.minCoeff() : 0.0;
  if (P.kappa() != 0.0)
    s.positivity_bound = 2.0 * P.kappa() * l6_norm3(u);
  return s;
}

/// Damped phase until the residual drops below switch_tol, then undamped steps with the
/// accelerating shift; stops at residual <= tol or after max_iter steps.
inline RunHistory run(const Problem &P, const StrategyConfig &config, const ComplexField &u0,
                      const std::function<void(const IterationState &)> &observer = {})
{
  config.validate();
  RunHistory hist;
  ComplexField u = normalize(u0, P.mass());
  auto state = evaluate_state(P, u);
  const double sigma_damped =
      config.shift_damped.automatic ? 4.0 / 3.0 * state.energy : config.shift_damped.sigma;
  // A fixed damped shift below the coercivity bound (targeting an excited state) needs the
  // indefinite inner solver.
  const SolveMode damped_mode =
      sigma_damped >= 4.0 / 3.0 * state.energy ? SolveMode::Spd : SolveMode::Indefinite;
  Phase phase = state.residual < config.switch_tol ? Phase::Shifted : Phase::Damped;
  state.phase = phase;
  state.sigma = sigma_damped;
  if (config.record_fields)
    state.u = u;
  hist.steps.push_back(state);
  if (observer)
    observer(state);

  auto fail = [&](const std::string &msg) {
    hist.final_u = u;
    hist.log.push_back(msg);
    throw RunAborted(msg, std::move(hist));
  };

  for (int n = 1; n <= config.max_iter; ++n)
  {
    if (state.residual <= config.tol)
      break;
    StepResult step;
    double sigma = sigma_damped;
    try
    {
      if (phase == Phase::Damped)
      {
        step = config.method == Method::J
                   ? j_step_damped(P, u, sigma, config.damping, config.inner, damped_mode)
                   : a_step(P, u, sigma, config.damping, damped_mode, config.inner);
      }
      else
      {
        sigma = next_shift(state.lambda, config.shift_accel, sigma_damped);
        auto shifted = [&](double s) {
          return config.method == Method::J
                     ? j_step_shifted(P, u, s, config.inner)
                     : a_step(P, u, s, 1.0, SolveMode::Indefinite, config.inner);
        };
        try
        {
          step = shifted(sigma);
        }
        catch (const SingularUpdateError &)
        {
          sigma += 1e-6 * (1.0 + std::abs(sigma));
          ++hist.shift_retries;
          hist.log.push_back("step " + std::to_string(n) + ": singular shift, retrying with " +
                             std::to_string(sigma));
          step = shifted(sigma);
        }
      }
    }
    catch (const RunAborted &)
    {
      throw;
    }
    catch (const Error &e)
    {
      fail("step " + std::to_string(n) + " failed: " + e.what());
    }

    if (!step.u.re.allFinite() || !step.u.im.allFinite())
      fail("step " + std::to_string(n) + " produced a non-finite iterate");
    u = std::move(step.u);
    IterationState next;
    try
    {
      next = evaluate_state(P, u);
    }
    catch (const Error &e)
    {
      fail("step " + std::to_string(n) + ": state evaluation failed: " + e.what());
    }
    if (!std::isfinite(next.energy) || !std::isfinite(next.residual))
      fail("step " + std::to_string(n) + ": non-finite energy or residual");
    next.n = n;
    next.phase = phase;
    next.tau = step.tau;
    next.sigma = sigma;
    next.gamma = step.gamma;
    next.mass_tilde = step.mass_tilde;
    next.ortho_defect = step.ortho_defect;
    next.solve_residual = step.solve_residual;
    next.sm_denominator = step.sm_denominator;
    if (phase == Phase::Damped && next.energy > state.energy + 1e-9)
    {
      next.energy_increase = true;
      ++hist.energy_increases;
      hist.log.push_back("step " + std::to_string(n) + ": energy increased by " +
                         std::to_string(next.energy - state.energy));
    }
    if (config.record_fields)
      next.u = u;
    state = next;
    hist.steps.push_back(state);
    if (observer)
      observer(state);
    if (phase == Phase::Damped && config.switch_tol > 0.0 && state.residual < config.switch_tol)
      phase = Phase::Shifted;
  }
  hist.final_u = u;
  hist.converged = state.residual <= config.tol;
  return hist;
}

/// RunHistory CSV, 16 significant digits.
inline void write_history_csv(const RunHistory &h, const std::string &path)
{
  std::ofstream out(path);
  if (!out)
    throw Error("cannot open " + path + " for writing");
  out << "iter,phase,residual,energy,lambda,tau,sigma,mass_tilde,ortho_defect\n";
  char buf[256];
  for (const auto &s : h.steps)
  {
    std::snprintf(buf, sizeof(buf), "%d,%s,%.15e,%.15e,%.15e,%.15e,%.15e,%.15e,%.15e\n", s.n,
                  to_string(s.phase), s.residual, s.energy, s.lambda, s.tau, s.sigma, s.mass_tilde,
                  s.ortho_defect);
    out << buf;
  }
}

}  // namespace gpj
