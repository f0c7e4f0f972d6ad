// SPDX-License-Identifier: MIT

#ifndef HEMICONTACT_NEWTON_HPP
#define HEMICONTACT_NEWTON_HPP

#include <Eigen/Core>
#include <functional>

#include "hemicontact/fem.hpp"

namespace hemicontact {

struct NewtonConfig {
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;      // relative to the initial residual norm
  int max_iterations = 50;
  int max_backtracks = 40;
  double cg_tol = 1e-10;       // relative tolerance of the iterative linear solve
  int dense_threshold = 2000;  // direct dense fallback below this many unknowns
};

struct NewtonStats {
  int iterations = 0;
  double residual_norm = 0.0;
  bool converged = false;
  int backtracks = 0;         // total over all iterations
  int linear_fallbacks = 0;   // times the direct fallback replaced CG
};

using ResidualFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
using JacobianFn = std::function<SparseMat(const Eigen::VectorXd&)>;

// Newton step linear solve: preconditioned conjugate gradients first (the
// systems are symmetric), verified by the true residual; direct fallback
// (dense below dense_threshold, sparse LU above) when CG stalls. A NaN/Inf
// result signals breakdown to the caller instead of throwing.
Eigen::VectorXd solve_linear_system(const SparseMat& A, const Eigen::VectorXd& b,
                                    const NewtonConfig& cfg, int* used_fallback = nullptr);

// Damped Newton iteration on G(x) = 0 with monotone residual decrease
// (backtracking halves the step until the norm drops). Starts converged when
// the initial residual is already below abs_tol, so exact rest states stay
// bit-exact. Nonconvergence is reported through the flag, never thrown.
NewtonStats newton_solve(const ResidualFn& residual, const JacobianFn& jacobian, Eigen::VectorXd& x,
                         const NewtonConfig& cfg = {});

}  // namespace hemicontact

#endif
