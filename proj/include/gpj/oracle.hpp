// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "gpj/energy.hpp"
#include "gpj/field.hpp"
#include "gpj/iterate.hpp"
#include "gpj/operators.hpp"

namespace gpj
{

/// Dense computations are capped at this many real unknowns.
inline constexpr Eigen::Index kDenseCap = 5000;

/// Deterministic random field with coefficients in [-1, 1] (imaginary part optional).
inline ComplexField random_field(MeshPtr mesh, std::uint64_t seed, bool complex = true)
{
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  ComplexField u(mesh);
  for (Eigen::Index k = 0; k < u.re.size(); ++k)
    u.re[k] = dist(gen);
  if (complex)
    for (Eigen::Index k = 0; k < u.im.size(); ++k)
      u.im[k] = dist(gen);
  return u;
}

struct DenseEigenpairs
{
  Vector values;           ///< ascending
  Eigen::MatrixXd vectors; ///< M-orthonormal columns
  double max_residual = 0.0;  ///< max_i ||A x_i - lambda_i M x_i||
};

/// k smallest eigenpairs of A x = lambda M x (A, M symmetric, M SPD), dense.
inline DenseEigenpairs dense_sym_eig(const Eigen::MatrixXd &A, const Eigen::MatrixXd &M,
                                     Eigen::Index k)
{
  if (A.rows() > kDenseCap)
    throw DimensionError("dense eigensolve limited to " + std::to_string(kDenseCap) +
                         " unknowns, got " + std::to_string(A.rows()));
  if (A.rows() != A.cols() || M.rows() != A.rows() || M.cols() != A.cols())
    throw DimensionError("pencil matrices must be square and of equal size");
  if (k < 1 || k > A.rows())
    throw DimensionError("requested " + std::to_string(k) + " eigenpairs of a " +
                         std::to_string(A.rows()) + "-dimensional pencil");
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(A, M);
  if (es.info() != Eigen::Success)
    throw Error("dense generalized eigensolve failed");
  DenseEigenpairs out;
  out.values = es.eigenvalues().head(k);
  out.vectors = es.eigenvectors().leftCols(k);
  for (Eigen::Index i = 0; i < k; ++i)
  {
    const Vector x = out.vectors.col(i);
    out.max_residual =
        std::max(out.max_residual, (A * x - out.values[i] * (M * x)).norm() / x.norm());
  }
  return out;
}

inline DenseEigenpairs dense_sym_eig(const SparseMatrix &A, const SparseMatrix &M, Eigen::Index k)
{
  return dense_sym_eig(Eigen::MatrixXd(A), Eigen::MatrixXd(M), k);
}

/// Spectral data of J(u*) around a converged eigenpair.
struct SpectrumNear
{
  double lambda_star = 0.0;
  double mu = 0.0;       ///< eigenvalue of J(u*) other than lambda* closest to -sigma
  Vector mu_vector;      ///< J x = mu M x
  Eigen::MatrixXd adjoint;  ///< adjoint eigenvectors of lambda* (columns)
  double mu_residual = 0.0;  ///< ||J x - mu M x|| / ||M x||
  double pairing = 0.0;  ///< smallest singular value of adjoint' M primal (deflation denominator)
  bool converged = false;
  bool defective = false;
};

/// Eigenvalue lambda* (from the Rayleigh quotient), adjoint eigenvectors of J(u*) for
/// lambda*, and the eigenvalue mu of J(u*) nearest to -sigma once the lambda*-eigenspace is
/// removed by oblique projection. The lambda*-eigenspace is two-dimensional: the global
/// phase direction i u* shares the eigenvalue.
inline SpectrumNear j_spectrum_near(const Problem &P, const ComplexField &u_star, double sigma,
                                    int max_iter = 2000)
{
  const auto N2 = static_cast<Eigen::Index>(2 * P.n());
  if (N2 > kDenseCap)
    throw DimensionError("j_spectrum_near is limited to " + std::to_string(kDenseCap) +
                         " unknowns");
  SpectrumNear out;
  out.lambda_star = rayleigh(P, u_star);
  const Eigen::MatrixXd J = build_J_op(P, u_star, 0.0).dense();
  const Eigen::MatrixXd M = Eigen::MatrixXd(P.mass_block());

  Eigen::MatrixXd X(N2, 2);
  X.col(0) = u_star.stacked();
  X.col(1) = ComplexField(u_star.mesh, -u_star.im, u_star.re).stacked();

  // Block inverse iteration on J' - s M right next to lambda*.
  const double s = out.lambda_star * (1.0 + 1e-10) + 1e-12;
  const Eigen::PartialPivLU<Eigen::MatrixXd> adj_lu((J - s * M).transpose());
  Eigen::MatrixXd Y = M * X;
  for (int it = 0; it < 4; ++it)
  {
    Y = adj_lu.solve(M * Y);
    Y = Eigen::HouseholderQR<Eigen::MatrixXd>(Y).householderQ() * Eigen::MatrixXd::Identity(N2, 2);
  }
  out.adjoint = Y;
  const Eigen::Matrix2d G = Y.transpose() * M * X;
  out.pairing = Eigen::JacobiSVD<Eigen::Matrix2d>(G).singularValues().minCoeff();
  out.defective = out.pairing < 1e-10 * M.norm();
  const Eigen::Matrix2d Ginv = G.inverse();
  auto deflate = [&](Vector v) -> Vector { return v - X * (Ginv * (Y.transpose() * (M * v))); };

  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(J + sigma * M);
  std::mt19937_64 gen(12345);
  std::normal_distribution<double> dist;
  Vector v(N2);
  for (Eigen::Index i = 0; i < N2; ++i)
    v[i] = dist(gen);
  v = deflate(v);
  v.normalize();
  for (int it = 0; it < max_iter; ++it)
  {
    v = deflate(lu.solve(M * v));
    v.normalize();
    const Vector Jv = J * v, Mv = M * v;
    // Least-squares eigenvalue estimate (J is not symmetric).
    out.mu = Mv.dot(Jv) / Mv.dot(Mv);
    out.mu_residual = (Jv - out.mu * Mv).norm() / Mv.norm();
    if (out.mu_residual < 1e-11)
    {
      out.converged = true;
      break;
    }
  }
  out.mu_vector = v;
  return out;
}

inline double predicted_rate(double lambda_star, double mu, double sigma)
{
  return std::abs(lambda_star + sigma) / std::abs(mu + sigma);
}

/// ||u - u*||_V with the gradient seminorm, after aligning the global phase of u to u*.
inline double v_error(const Problem &P, const ComplexField &u, const ComplexField &u_star)
{
  const ComplexField a = align_phase(u, u_star, P.mass());
  const Vector d = a.stacked() - u_star.stacked();
  return std::sqrt(std::max(0.0, d.dot(P.stiffness_block() * d)));
}

inline std::vector<double> error_sequence(const Problem &P, const RunHistory &h,
                                          const ComplexField &u_star)
{
  std::vector<double> e;
  for (const auto &s : h.steps)
  {
    if (!s.u.mesh)
      throw Error("error_sequence needs a history recorded with record_fields");
    e.push_back(v_error(P, s.u, u_star));
  }
  return e;
}

/// Successive ratios e_{n+1} / e_n.
inline std::vector<double> error_ratios(const std::vector<double> &e)
{
  std::vector<double> r;
  for (std::size_t i = 0; i + 1 < e.size(); ++i)
    r.push_back(e[i + 1] / e[i]);
  return r;
}

/// Geometric mean of the last k error ratios.
inline double measure_rate(const std::vector<double> &errors, std::size_t k = 8)
{
  if (errors.size() < k + 1)
    throw Error("measure_rate needs " + std::to_string(k + 1) + " errors, got " +
                std::to_string(errors.size()));
  const double last = errors.back();
  const double first = errors[errors.size() - 1 - k];
  if (!(first > 0.0) || !(last > 0.0))
    throw Error("measure_rate: non-positive error in window");
  return std::pow(last / first, 1.0 / static_cast<double>(k));
}

struct RateReport
{
  double lambda_star = 0.0;
  double mu = 0.0;
  double sigma = 0.0;
  double predicted = 0.0;
  double observed = 0.0;
};

inline nlohmann::json to_json(const RateReport &r)
{
  return {{"lambda_star", r.lambda_star},
          {"mu", r.mu},
          {"sigma", r.sigma},
          {"predicted", r.predicted},
          {"observed", r.observed}};
}

inline RateReport rate_report_from_json(const nlohmann::json &j)
{
  return {j.at("lambda_star").get<double>(), j.at("mu").get<double>(), j.at("sigma").get<double>(),
          j.at("predicted").get<double>(), j.at("observed").get<double>()};
}

/// Central-difference errors at several step sizes.
struct FdReport
{
  std::vector<double> steps;
  std::vector<double> errors;

  /// errors[i+1] / errors[i]
  std::vector<double> ratios() const { return error_ratios(errors); }
};

/// Relative error of (A(u+tv) - A(u-tv)) / 2t against the assembled J(u) v.
inline FdReport fd_jacobian_check(const Problem &P, const ComplexField &u, const ComplexField &v,
                                  std::vector<double> steps = {1e-2, 1e-3, 1e-4})
{
  FdReport rep;
  rep.steps = steps;
  const Vector Jv = build_J_op(P, u, 0.0).apply(v.stacked());
  for (double t : steps)
  {
    const Vector fd =
        (apply_A_nl(P, combine(1.0, u, t, v)) - apply_A_nl(P, combine(1.0, u, -t, v))) / (2.0 * t);
    rep.errors.push_back((fd - Jv).norm() / Jv.norm());
  }
  return rep;
}

/// Relative error of (E(u+tv) - E(u-tv)) / 2t against v'E'(u), where
/// E'(u) = A(u)u + kappa (1 - 1/||u||^2) M_rho u undoes the mass scaling inside A.
inline FdReport fd_gradient_check(const Problem &P, const ComplexField &u, const ComplexField &v,
                                  std::vector<double> steps = {1e-2, 1e-3, 1e-4})
{
  FdReport rep;
  rep.steps = steps;
  const double m = mass_of(P, u);
  Vector grad = apply_A_nl(P, u);
  if (P.kappa() != 0.0)
    grad += P.kappa() * (1.0 - 1.0 / m) * density_action(density_mass(u), u);
  const double exact = v.stacked().dot(grad);
  for (double t : steps)
  {
    const double fd =
        (energy(P, combine(1.0, u, t, v)) - energy(P, combine(1.0, u, -t, v))) / (2.0 * t);
    rep.errors.push_back(std::abs(fd - exact) / std::max(std::abs(exact), 1e-300));
  }
  return rep;
}

}  // namespace gpj
