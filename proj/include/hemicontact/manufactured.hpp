// SPDX-License-Identifier: MIT

#ifndef HEMICONTACT_MANUFACTURED_HPP
#define HEMICONTACT_MANUFACTURED_HPP

#include <Eigen/Core>
#include <memory>
#include <utility>
#include <vector>

#include "hemicontact/coupling.hpp"
#include "hemicontact/hvi.hpp"

namespace hemicontact {

// --------------------------------------------------------------------------
// Closed-form coupled solution on the unit square used by the convergence
// study. Clamped on x = 0, traction on x = 1 and y = 1, contact on y = 0.
// With P(x) = x^2 - x^3 and q(y) = (1 - y)(1 + a y):
//
//   u(x, y, t)  = e^{-t} (-alpha P'(x) y, alpha P(x)),   v = -e^{-t} U,
//   th(x, y, t) = e^{-t} P(x) q(y),
//
// The strain vanishes on y = 0, so the exact contact traction is purely
// thermal: -sigma_nu = c_exp e^{-t} P(x). Choosing alpha = c_exp / kappa_n
// makes the linear normal law hold exactly; the tangential velocity is zero
// on y = 0, and a = 1 + kappa_th / k matches the thermal boundary law. The
// volume force, Neumann traction and heat source absorb the remaining
// residuals, so the solvers face the full coupled system with every term
// active (viscosity, elasticity, memory, expansion, conduction, strain-rate
// heating) yet the discretization error is measurable against closed forms.
// --------------------------------------------------------------------------

struct ManufacturedCase {
  // Model parameters; the derived alpha and a keep the boundary laws exact.
  double mu_v = 1.0, lambda_v = 1.0;
  double mu_e = 0.1, lambda_e = 0.1;
  double memory_g = 0.1;
  double c_exp = 0.1;
  double k_cond = 1.0;
  double c11 = 0.1;
  double kappa_n = 0.05, kappa_t = 0.05, kappa_th = 0.05;
  double alpha = 2.0;
  double a = 1.05;

  Mesh mesh;
  MaterialModel material;
  BoundaryLaw normal, tangential, thermal;
  System system;  // points into the members above

  Eigen::Vector2d exact_u(double t, const Eigen::Vector2d& x) const;
  Eigen::Vector2d exact_v(double t, const Eigen::Vector2d& x) const;
  double exact_theta(double t, const Eigen::Vector2d& x) const;
  SymTensor exact_stress(double t, const Eigen::Vector2d& x) const;

  Eigen::Vector2d volume_force(double t, const Eigen::Vector2d& x) const;
  double heat_source(double t, const Eigen::Vector2d& x) const;

  // Dual load vectors on the free coordinates (volume rule of degree 4,
  // two-point Gauss per Neumann edge).
  Eigen::VectorXd assemble_mech_load(double t) const;
  Eigen::VectorXd assemble_heat_load(double t) const;

  // L2 errors of a nodal iterate against the exact field at time t.
  double error_u(const Field& u, double t) const;
  double error_theta(const Field& theta, double t) const;
};

// Builds the case on an n x n structured square; the System inside points at
// the returned object, hence the stable heap allocation.
std::unique_ptr<ManufacturedCase> make_manufactured_case(int n_cells);

struct ConvergenceRow {
  int cells = 0;
  int steps = 0;
  double h = 0.0;
  double dt = 0.0;
  double err_u = 0.0;
  double err_theta = 0.0;
  int fp_iterations = 0;
};

// Solves the case at each (cells, steps) level with the coupled fixed-point
// driver and tabulates final-time errors.
std::vector<ConvergenceRow> run_manufactured_convergence(
    const std::vector<std::pair<int, int>>& levels, double T, const CouplingConfig& cfg);

// CSV with per-level errors and observed orders between consecutive levels.
std::string format_convergence(const std::vector<ConvergenceRow>& rows);

}  // namespace hemicontact

#endif
