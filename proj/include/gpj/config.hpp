// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <set>
#include <string>
#include <type_traits>
#include <vector>

#include <json.hpp>

#include "gpj/errors.hpp"
#include "gpj/iterate.hpp"
#include "gpj/mesh.hpp"
#include "gpj/operators.hpp"
#include "gpj/potentials.hpp"

namespace gpj
{

using json = nlohmann::json;

struct PotentialConfig
{
  std::string kind = "harmonic";  ///< harmonic | zero | disorder | file
  double epsilon = 0.0;           ///< disorder cell width relative to 2L
  std::string path;               ///< file potentials
  std::uint64_t seed = 0;
};

struct RunConfig
{
  std::string name = "custom";
  double L = 8.0;
  int n_cells = 128;
  double omega = 0.0;
  double kappa = 0.0;
  PotentialConfig potential;
  std::string initial = "bubble";
  StrategyConfig strategy;
  std::string output_dir = "gpj_out";
  bool dump_fields = false;
};

namespace detail
{

inline void reject_unknown(const json &j, const std::string &path, std::set<std::string> allowed)
{
  if (!j.is_object())
    throw ConfigError(path + ": expected an object");
  for (const auto &[key, _] : j.items())
    if (!allowed.count(key))
      throw ConfigError((path.empty() ? key : path + "." + key) + ": unknown key");
}

template <typename T>
T get(const json &j, const std::string &key, const std::string &path, T fallback)
{
  if (!j.contains(key))
    return fallback;
  const std::string where = path.empty() ? key : path + "." + key;
  const json &v = j.at(key);
  if constexpr (std::is_same_v<T, bool>)
  {
    if (!v.is_boolean())
      throw ConfigError(where + ": expected a boolean");
  }
  else if constexpr (std::is_integral_v<T>)
  {
    if (!v.is_number_integer())
      throw ConfigError(where + ": expected an integer");
  }
  else if constexpr (std::is_floating_point_v<T>)
  {
    if (!v.is_number())
      throw ConfigError(where + ": expected a number");
  }
  else
  {
    if (!v.is_string())
      throw ConfigError(where + ": expected a string");
  }
  return v.get<T>();
}

template <typename T>
T require(const json &j, const std::string &key, const std::string &path)
{
  if (!j.contains(key))
    throw ConfigError((path.empty() ? key : path + "." + key) + ": missing required key");
  return get<T>(j, key, path, T{});
}

/// Accepts either "name" or {"kind": "name", ...}.
inline std::string kind_of(const json &j, const std::string &path)
{
  if (j.is_string())
    return j.get<std::string>();
  if (j.is_object())
    return require<std::string>(j, "kind", path);
  throw ConfigError(path + ": expected a string or an object with a 'kind'");
}

inline Damping parse_damping(const json &j)
{
  const std::string path = "strategy.damping";
  Damping d;
  const auto kind = kind_of(j, path);
  if (kind == "optimal")
  {
    if (j.is_object())
    {
      reject_unknown(j, path, {"kind", "tau_min", "tau_max"});
      d.tau_min = get<double>(j, "tau_min", path, d.tau_min);
      d.tau_max = get<double>(j, "tau_max", path, d.tau_max);
    }
  }
  else if (kind == "fixed")
  {
    if (!j.is_object())
      throw ConfigError(path + ".tau: missing required key");
    reject_unknown(j, path, {"kind", "tau"});
    d.optimal = false;
    d.tau = require<double>(j, "tau", path);
    if (!(d.tau > 0.0 && d.tau <= 2.0))
      throw ConfigError(path + ".tau: must lie in (0, 2]");
  }
  else
    throw ConfigError(path + ".kind: unknown damping '" + kind + "' (optimal | fixed)");
  return d;
}

inline ShiftDamped parse_shift_damped(const json &j)
{
  const std::string path = "strategy.shift_damped";
  ShiftDamped s;
  const auto kind = kind_of(j, path);
  if (kind == "auto")
  {
    if (j.is_object())
      reject_unknown(j, path, {"kind"});
  }
  else if (kind == "fixed")
  {
    if (!j.is_object())
      throw ConfigError(path + ".sigma: missing required key");
    reject_unknown(j, path, {"kind", "sigma"});
    s.automatic = false;
    s.sigma = require<double>(j, "sigma", path);
  }
  else
    throw ConfigError(path + ".kind: unknown shift '" + kind + "' (auto | fixed)");
  return s;
}

inline ShiftAccel parse_shift_accel(const json &j)
{
  const std::string path = "strategy.shift_accel";
  ShiftAccel s;
  const auto kind = kind_of(j, path);
  if (kind == "none")
    s.kind = ShiftAccel::Kind::None;
  else if (kind == "rayleigh")
    s.kind = ShiftAccel::Kind::Rayleigh;
  else if (kind == "rayleigh_clamped")
  {
    if (!j.is_object())
      throw ConfigError(path + ".lo: missing required key");
    reject_unknown(j, path, {"kind", "lo", "hi"});
    s.kind = ShiftAccel::Kind::RayleighClamped;
    s.lo = require<double>(j, "lo", path);
    s.hi = require<double>(j, "hi", path);
    if (!(s.lo <= s.hi))
      throw ConfigError(path + ": lo must not exceed hi");
    return s;
  }
  else
    throw ConfigError(path + ".kind: unknown shift '" + kind +
                      "' (none | rayleigh | rayleigh_clamped)");
  if (j.is_object())
    reject_unknown(j, path, {"kind"});
  return s;
}

}  // namespace detail

inline RunConfig parse_config(const json &j)
{
  using namespace detail;
  RunConfig c;
  reject_unknown(j, "", {"name", "domain", "model", "method", "initial", "strategy", "output"});
  c.name = get<std::string>(j, "name", "", c.name);

  if (!j.contains("domain"))
    throw ConfigError("domain: missing required key");
  const json &d = j.at("domain");
  reject_unknown(d, "domain", {"L", "n_cells"});
  c.L = require<double>(d, "L", "domain");
  c.n_cells = require<int>(d, "n_cells", "domain");
  if (!(c.L > 0.0))
    throw ConfigError("domain.L: must be positive");
  if (c.n_cells < 2)
    throw ConfigError("domain.n_cells: must be at least 2");

  if (!j.contains("model"))
    throw ConfigError("model: missing required key");
  const json &m = j.at("model");
  reject_unknown(m, "model", {"omega", "kappa", "potential"});
  c.omega = get<double>(m, "omega", "model", 0.0);
  c.kappa = require<double>(m, "kappa", "model");
  if (c.kappa < 0.0)
    throw ConfigError("model.kappa: must be non-negative");
  if (m.contains("potential"))
  {
    const json &p = m.at("potential");
    const std::string path = "model.potential";
    c.potential.kind = kind_of(p, path);
    if (p.is_object())
    {
      reject_unknown(p, path, {"kind", "params", "seed"});
      if (p.contains("seed"))
      {
        if (!p.at("seed").is_number_unsigned())
          throw ConfigError(path + ".seed: expected a non-negative integer");
        c.potential.seed = p.at("seed").get<std::uint64_t>();
      }
      if (p.contains("params"))
      {
        const json &pp = p.at("params");
        reject_unknown(pp, path + ".params", {"epsilon", "path"});
        c.potential.epsilon = get<double>(pp, "epsilon", path + ".params", 0.0);
        c.potential.path = get<std::string>(pp, "path", path + ".params", "");
      }
    }
    const auto &k = c.potential.kind;
    if (k == "disorder" && !(c.potential.epsilon > 0.0))
      throw ConfigError(path + ".params.epsilon: required (positive) for a disorder potential");
    if (k == "file" && c.potential.path.empty())
      throw ConfigError(path + ".params.path: required for a file potential");
    if (k != "harmonic" && k != "zero" && k != "disorder" && k != "file")
      throw ConfigError(path + ".kind: unknown potential '" + k +
                        "' (harmonic | zero | disorder | file)");
  }

  const auto method = get<std::string>(j, "method", "", "J");
  if (method == "J")
    c.strategy.method = Method::J;
  else if (method == "A")
    c.strategy.method = Method::A;
  else
    throw ConfigError("method: expected 'J' or 'A', got '" + method + "'");

  c.initial = get<std::string>(j, "initial", "", c.initial);
  if (c.initial != "bubble")
    throw ConfigError("initial: only 'bubble' is supported, got '" + c.initial + "'");

  if (j.contains("strategy"))
  {
    const json &s = j.at("strategy");
    reject_unknown(s, "strategy",
                   {"damping", "shift_damped", "shift_accel", "switch_tol", "tol", "max_iter"});
    auto &st = c.strategy;
    if (s.contains("damping"))
      st.damping = parse_damping(s.at("damping"));
    if (s.contains("shift_damped"))
      st.shift_damped = parse_shift_damped(s.at("shift_damped"));
    if (s.contains("shift_accel"))
      st.shift_accel = parse_shift_accel(s.at("shift_accel"));
    st.switch_tol = get<double>(s, "switch_tol", "strategy", st.switch_tol);
    st.tol = get<double>(s, "tol", "strategy", st.tol);
    st.max_iter = get<int>(s, "max_iter", "strategy", st.max_iter);
    if (!(st.tol > 0.0))
      throw ConfigError("strategy.tol: must be positive");
    if (st.switch_tol != 0.0 && st.switch_tol < st.tol)
      throw ConfigError("strategy.switch_tol: must be >= strategy.tol (or 0 to never shift)");
    if (st.max_iter < 0)
      throw ConfigError("strategy.max_iter: must be non-negative");
    st.validate();
  }

  if (j.contains("output"))
  {
    const json &o = j.at("output");
    reject_unknown(o, "output", {"dir", "dump_fields"});
    c.output_dir = get<std::string>(o, "dir", "output", c.output_dir);
    c.dump_fields = get<bool>(o, "dump_fields", "output", c.dump_fields);
  }
  return c;
}

inline RunConfig load_config(const std::string &path)
{
  std::ifstream in(path);
  if (!in)
    throw ConfigError("cannot open config file " + path);
  json j;
  try
  {
    in >> j;
  }
  catch (const json::parse_error &e)
  {
    throw ConfigError(path + ": malformed JSON: " + e.what());
  }
  return parse_config(j);
}

inline json to_json(const RunConfig &c)
{
  json pot = {{"kind", c.potential.kind}};
  json params = json::object();
  if (c.potential.epsilon > 0.0)
    params["epsilon"] = c.potential.epsilon;
  if (!c.potential.path.empty())
    params["path"] = c.potential.path;
  if (!params.empty())
    pot["params"] = params;
  if (c.potential.kind == "disorder")
    pot["seed"] = c.potential.seed;

  const auto &s = c.strategy;
  json damping = s.damping.optimal
                     ? json{{"kind", "optimal"}, {"tau_min", s.damping.tau_min},
                            {"tau_max", s.damping.tau_max}}
                     : json{{"kind", "fixed"}, {"tau", s.damping.tau}};
  json shift_damped = s.shift_damped.automatic ? json("auto")
                                               : json{{"kind", "fixed"}, {"sigma", s.shift_damped.sigma}};
  json shift_accel;
  switch (s.shift_accel.kind)
  {
    case ShiftAccel::Kind::None: shift_accel = "none"; break;
    case ShiftAccel::Kind::Rayleigh: shift_accel = "rayleigh"; break;
    case ShiftAccel::Kind::RayleighClamped:
      shift_accel = {{"kind", "rayleigh_clamped"}, {"lo", s.shift_accel.lo}, {"hi", s.shift_accel.hi}};
      break;
  }
  return {{"name", c.name},
          {"domain", {{"L", c.L}, {"n_cells", c.n_cells}}},
          {"model", {{"omega", c.omega}, {"kappa", c.kappa}, {"potential", pot}}},
          {"method", s.method == Method::J ? "J" : "A"},
          {"initial", c.initial},
          {"strategy",
           {{"damping", damping},
            {"shift_damped", shift_damped},
            {"shift_accel", shift_accel},
            {"switch_tol", s.switch_tol},
            {"tol", s.tol},
            {"max_iter", s.max_iter}}},
          {"output", {{"dir", c.output_dir}, {"dump_fields", c.dump_fields}}}};
}

inline Potential make_potential(const RunConfig &c, const MeshPtr &mesh)
{
  const auto &p = c.potential;
  if (p.kind == "harmonic")
    return harmonic_potential();
  if (p.kind == "zero")
    return zero_potential();
  if (p.kind == "disorder")
    return disorder(c.L, p.epsilon, p.seed);
  if (p.kind == "file")
    return potential_from_file(p.path, mesh);
  throw ConfigError("model.potential.kind: unknown potential '" + p.kind + "'");
}

inline Problem make_problem(const RunConfig &c)
{
  auto mesh = build_mesh(c.L, c.n_cells);
  ModelParams params;
  params.omega = c.omega;
  params.kappa = c.kappa;
  params.W = make_potential(c, mesh);
  return Problem(mesh, params);
}

inline ComplexField initial_field(const RunConfig &c, const Problem &P)
{
  if (c.initial == "bubble")
    return bubble_initial(P.mesh(), P.mass());
  throw ConfigError("initial: unknown initial field '" + c.initial + "'");
}

/// Built-in experiment setups at desk resolution (128 cells per side).
inline std::vector<std::string> preset_names()
{
  return {"harmonic", "disorder", "vortex_text", "vortex_figure"};
}

inline RunConfig preset(const std::string &name)
{
  RunConfig c;
  c.name = name;
  c.n_cells = 128;
  c.output_dir = "gpj_out/" + name;
  if (name == "harmonic")
  {
    c.L = 8.0;
    c.kappa = 1000.0;
  }
  else if (name == "disorder")
  {
    c.L = 8.0;
    c.kappa = 1.0;
    c.potential.kind = "disorder";
    c.potential.epsilon = 1.0 / 64.0;
    c.potential.seed = 1;
    c.strategy.max_iter = 3000;
  }
  else if (name == "vortex_text" || name == "vortex_figure")
  {
    c.L = 10.0;
    c.kappa = 1000.0;
    c.omega = name == "vortex_text" ? 0.99 : 0.85;
    c.strategy.switch_tol = 1e-6;
    c.strategy.max_iter = 5000;
  }
  else
  {
    std::string known;
    for (const auto &n : preset_names())
      known += (known.empty() ? "" : ", ") + n;
    throw ConfigError("unknown preset '" + name + "' (" + known + ")");
  }
  return c;
}

}  // namespace gpj
