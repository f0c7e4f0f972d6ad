// SPDX-License-Identifier: MIT

#include "hemicontact/newton.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/LU>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <limits>

namespace hemicontact {

namespace {

bool finite(const Eigen::VectorXd& v) { return v.allFinite(); }

double true_residual(const SparseMat& A, const Eigen::VectorXd& x, const Eigen::VectorXd& b) {
  return (A * x - b).norm();
}

}  // namespace

Eigen::VectorXd solve_linear_system(const SparseMat& A, const Eigen::VectorXd& b,
                                    const NewtonConfig& cfg, int* used_fallback) {
  const auto n = A.rows();
  if (used_fallback) *used_fallback = 0;
  const double bnorm = b.norm();
  const double accept = cfg.cg_tol * std::max(bnorm, 1e-300) * 10.0;

  if (bnorm == 0.0) return Eigen::VectorXd::Zero(n);

  {
    Eigen::ConjugateGradient<SparseMat, Eigen::Lower | Eigen::Upper,
                             Eigen::DiagonalPreconditioner<double>>
        cg;
    cg.setTolerance(cfg.cg_tol);
    cg.setMaxIterations(std::max<Eigen::Index>(10 * n, 100));
    cg.compute(A);
    if (cg.info() == Eigen::Success) {
      Eigen::VectorXd x = cg.solve(b);
      if (finite(x) && true_residual(A, x, b) <= accept) return x;
    }
  }

  if (used_fallback) *used_fallback = 1;
  if (n <= cfg.dense_threshold) {
    Eigen::MatrixXd D(A);
    Eigen::VectorXd x = Eigen::PartialPivLU<Eigen::MatrixXd>(D).solve(b);
    if (finite(x) && true_residual(A, x, b) <= accept) return x;
    x = Eigen::FullPivLU<Eigen::MatrixXd>(D).solve(b);
    if (finite(x) && true_residual(A, x, b) <= accept) return x;
  } else {
    Eigen::SparseLU<SparseMat> lu;
    lu.compute(A);
    if (lu.info() == Eigen::Success) {
      Eigen::VectorXd x = lu.solve(b);
      if (finite(x) && true_residual(A, x, b) <= accept) return x;
    }
  }
  // Breakdown: hand back NaN so the caller can report nonconvergence.
  return Eigen::VectorXd::Constant(n, std::numeric_limits<double>::quiet_NaN());
}

NewtonStats newton_solve(const ResidualFn& residual, const JacobianFn& jacobian, Eigen::VectorXd& x,
                         const NewtonConfig& cfg) {
  NewtonStats stats;
  Eigen::VectorXd G = residual(x);
  double norm = G.norm();
  const double target = std::max(cfg.abs_tol, cfg.rel_tol * norm);
  stats.residual_norm = norm;
  if (!std::isfinite(norm)) return stats;
  if (norm <= cfg.abs_tol) {
    stats.converged = true;
    return stats;
  }

  for (int it = 0; it < cfg.max_iterations; ++it) {
    int fb = 0;
    Eigen::VectorXd dx = solve_linear_system(jacobian(x), -G, cfg, &fb);
    stats.linear_fallbacks += fb;
    if (!finite(dx)) break;

    // Backtracking on the residual norm; sufficient decrease in Armijo form.
    double s = 1.0;
    bool accepted = false;
    Eigen::VectorXd x_try, G_try;
    double norm_try = norm;
    for (int bt = 0; bt <= cfg.max_backtracks; ++bt) {
      x_try = x + s * dx;
      G_try = residual(x_try);
      norm_try = G_try.norm();
      if (std::isfinite(norm_try) && norm_try <= (1.0 - 1e-4 * s) * norm) {
        accepted = true;
        break;
      }
      s *= 0.5;
      ++stats.backtracks;
    }
    if (!accepted) break;

    x = std::move(x_try);
    G = std::move(G_try);
    norm = norm_try;
    ++stats.iterations;
    stats.residual_norm = norm;
    if (norm <= target) {
      stats.converged = true;
      return stats;
    }
  }
  stats.residual_norm = norm;
  return stats;
}

}  // namespace hemicontact
