// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "gpj/errors.hpp"
#include "gpj/field.hpp"
#include "gpj/mesh.hpp"

namespace gpj
{

/// External trapping potential W(x, y).
struct Potential
{
  std::string name;
  std::function<double(double, double)> eval;
  /// Piecewise constant on a checker_cells x checker_cells grid of (-L, L)^2; 0 if smooth.
  int checker_cells = 0;
  double half_width = 0.0;

  double operator()(double x, double y) const { return eval(x, y); }

  /// Checkerboard squares must be unions of mesh cells so that Gauss points never straddle
  /// a jump.
  void check_compatible(const Mesh &mesh) const
  {
    if (checker_cells <= 0)
      return;
    if (std::abs(mesh.L() - half_width) > 1e-12 * half_width || mesh.n_cells() % checker_cells != 0)
      throw ConfigError("potential '" + name + "': checkerboard of " +
                        std::to_string(checker_cells) + " cells is not aligned with a mesh of " +
                        std::to_string(mesh.n_cells()) + " cells");
  }
};

inline double harmonic(double x, double y) { return 0.5 * (x * x + y * y); }

inline Potential harmonic_potential() { return {"harmonic", &harmonic}; }

inline Potential zero_potential()
{
  return {"zero", [](double, double) { return 0.0; }};
}

/// splitmix64 step; `state` is advanced in place.
inline std::uint64_t splitmix64(std::uint64_t &state)
{
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Checkerboard values of the disorder potential, row-major (y outer).
inline std::vector<double> disorder_cells(double L, double epsilon, std::uint64_t seed)
{
  const double inv = 1.0 / epsilon;
  const long m = std::lround(inv);
  if (m < 1 || std::abs(inv - static_cast<double>(m)) > 1e-9 * inv)
    throw ConfigError("disorder epsilon must be the reciprocal of a positive integer");
  const double side = 2.0 * epsilon * L;
  const double black = 1.0 / (side * side);
  std::vector<double> cells(static_cast<std::size_t>(m * m));
  std::uint64_t state = seed;
  for (auto &c : cells)
    c = (splitmix64(state) >> 63) ? black : 0.0;
  return cells;
}

inline Potential disorder(double L, double epsilon, std::uint64_t seed)
{
  const auto cells = std::make_shared<const std::vector<double>>(disorder_cells(L, epsilon, seed));
  const int m = static_cast<int>(std::lround(1.0 / epsilon));
  const double side = 2.0 * L / m;
  Potential p;
  p.name = "disorder";
  p.checker_cells = m;
  p.half_width = L;
  p.eval = [cells, m, side, L](double x, double y) {
    const int ci = std::clamp(static_cast<int>(std::floor((x + L) / side)), 0, m - 1);
    const int cj = std::clamp(static_cast<int>(std::floor((y + L) / side)), 0, m - 1);
    return (*cells)[static_cast<std::size_t>(cj) * m + ci];
  };
  return p;
}

/// Nodal interpolant of the bi-quadratic bubble (1 - x^2/L^2)(1 - y^2/L^2), not normalized.
inline ComplexField bubble(MeshPtr mesh)
{
  ComplexField u(mesh);
  const double L = mesh->L();
  for (std::size_t k = 0; k < mesh->n_interior(); ++k)
  {
    const auto id = mesh->node_of_interior(k);
    const double x = mesh->node_x(id);
    const double y = mesh->node_y(id);
    u.re[static_cast<Eigen::Index>(k)] = (1.0 - x * x / (L * L)) * (1.0 - y * y / (L * L));
  }
  return u;
}

/// L2-normalized bubble; M is the interior mass matrix of the mesh.
inline ComplexField bubble_initial(MeshPtr mesh, const SparseMatrix &M)
{
  return normalize(bubble(std::move(mesh)), M);
}

enum class PotentialLayout
{
  Nodal,
  CellCentered
};

/// CSV `x,y,w`, row-major. Values are written with 17 significant digits so that a
/// read-back reproduces them bit for bit.
inline void write_potential_csv(const Potential &w, const Mesh &mesh, const std::string &path,
                                PotentialLayout layout)
{
  std::ofstream out(path);
  if (!out)
    throw Error("cannot open " + path + " for writing");
  out << "x,y,w\n";
  char buf[128];
  if (layout == PotentialLayout::Nodal)
  {
    for (std::size_t id = 0; id < mesh.n_nodes(); ++id)
    {
      const double x = mesh.node_x(id), y = mesh.node_y(id);
      std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", x, y, w(x, y));
      out << buf;
    }
  }
  else
  {
    for (std::size_t c = 0; c < mesh.n_cells_total(); ++c)
    {
      const auto o = mesh.cell_origin(c);
      const double x = o[0] + 0.5 * mesh.h(), y = o[1] + 0.5 * mesh.h();
      std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", x, y, w(x, y));
      out << buf;
    }
  }
}

/// Reads a potential written on `mesh` nodes ((n+1)^2 rows, bilinear interpolation) or on
/// cell centres (n^2 rows, piecewise constant).
inline Potential potential_from_file(const std::string &path, MeshPtr mesh)
{
  std::ifstream in(path);
  if (!in)
    throw ConfigError("cannot open potential file " + path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("x,y,w", 0) != 0)
    throw ConfigError(path + ": expected header 'x,y,w'");
  std::vector<double> xs, ys, ws;
  std::size_t lineno = 1;
  while (std::getline(in, line))
  {
    ++lineno;
    if (line.empty())
      continue;
    double v[3];
    std::stringstream ss(line);
    std::string tok;
    for (int k = 0; k < 3; ++k)
    {
      if (!std::getline(ss, tok, ','))
        throw ConfigError(path + ":" + std::to_string(lineno) + ": expected 3 columns");
      try
      {
        v[k] = std::stod(tok);
      }
      catch (const std::exception &)
      {
        throw ConfigError(path + ":" + std::to_string(lineno) + ": not a number: " + tok);
      }
      if (!std::isfinite(v[k]))
        throw ConfigError(path + ":" + std::to_string(lineno) + ": non-finite value");
    }
    xs.push_back(v[0]);
    ys.push_back(v[1]);
    ws.push_back(v[2]);
  }
  const int n = mesh->n_cells();
  const std::size_t nodal = static_cast<std::size_t>(n + 1) * (n + 1);
  const std::size_t cellc = static_cast<std::size_t>(n) * n;
  const double tol = 1e-9 * mesh->L();
  auto values = std::make_shared<const std::vector<double>>(ws);
  Potential p;
  p.name = "file:" + path;
  const double L = mesh->L(), h = mesh->h();
  if (ws.size() == nodal)
  {
    for (std::size_t id = 0; id < nodal; ++id)
      if (std::abs(xs[id] - mesh->node_x(id)) > tol || std::abs(ys[id] - mesh->node_y(id)) > tol)
        throw ConfigError(path + ": node coordinates do not match the mesh at row " +
                          std::to_string(id + 2));
    p.eval = [values, n, L, h](double x, double y) {
      const int i = std::clamp(static_cast<int>(std::floor((x + L) / h)), 0, n - 1);
      const int j = std::clamp(static_cast<int>(std::floor((y + L) / h)), 0, n - 1);
      const double s = (x + L) / h - i, t = (y + L) / h - j;
      const auto at = [&](int a, int b) {
        return (*values)[static_cast<std::size_t>(b) * (n + 1) + static_cast<std::size_t>(a)];
      };
      return (1 - s) * (1 - t) * at(i, j) + s * (1 - t) * at(i + 1, j) + s * t * at(i + 1, j + 1) +
             (1 - s) * t * at(i, j + 1);
    };
  }
  else if (ws.size() == cellc)
  {
    for (std::size_t c = 0; c < cellc; ++c)
    {
      const auto o = mesh->cell_origin(c);
      if (std::abs(xs[c] - (o[0] + 0.5 * h)) > tol || std::abs(ys[c] - (o[1] + 0.5 * h)) > tol)
        throw ConfigError(path + ": cell-centre coordinates do not match the mesh at row " +
                          std::to_string(c + 2));
    }
    p.checker_cells = n;
    p.half_width = L;
    p.eval = [values, n, L, h](double x, double y) {
      const int i = std::clamp(static_cast<int>(std::floor((x + L) / h)), 0, n - 1);
      const int j = std::clamp(static_cast<int>(std::floor((y + L) / h)), 0, n - 1);
      return (*values)[static_cast<std::size_t>(j) * n + static_cast<std::size_t>(i)];
    };
  }
  else
  {
    throw ConfigError(path + ": " + std::to_string(ws.size()) + " rows match neither " +
                      std::to_string(nodal) + " nodes nor " + std::to_string(cellc) + " cells");
  }
  return p;
}

}  // namespace gpj
