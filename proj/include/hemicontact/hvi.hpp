// SPDX-License-Identifier: MIT

#ifndef HEMICONTACT_HVI_HPP
#define HEMICONTACT_HVI_HPP

#include <Eigen/Core>
#include <functional>
#include <vector>

#include "hemicontact/material.hpp"
#include "hemicontact/mesh.hpp"
#include "hemicontact/newton.hpp"
#include "hemicontact/nonsmooth.hpp"

namespace hemicontact {

struct TimeGrid {
  double T = 1.0;
  int n_steps = 1;

  double dt() const { return T / n_steps; }
  double time(int n) const { return (T * n) / n_steps; }
  int n_nodes() const { return n_steps + 1; }
  void validate() const;
  bool same_as(const TimeGrid& o) const { return T == o.T && n_steps == o.n_steps; }
};

// One dual-space coefficient vector (free displacement coordinates) per grid
// node; the coupling iterate eta lives here.
using DualTrajectory = std::vector<Eigen::VectorXd>;

struct StepSolveStats {
  int newton_iterations = 0;
  double residual_norm = 0.0;
  double regularization_epsilon_used = 0.0;
  bool converged = false;
};

// --------------------------------------------------------------------------
// A fully specified problem instance: geometry, constitutive model, the three
// multivalued boundary laws, loads, and initial data. Null laws mean the
// corresponding boundary term is absent; null loads mean zero.
// --------------------------------------------------------------------------

struct System {
  const Mesh* mesh = nullptr;
  const MaterialModel* material = nullptr;
  const BoundaryLaw* law_normal = nullptr;
  const BoundaryLaw* law_tangential = nullptr;
  const BoundaryLaw* law_thermal = nullptr;

  // Free-coordinate dual vectors of the combined loads at time t.
  std::function<Eigen::VectorXd(double)> load_mech;  // f0 volume + Neumann traction
  std::function<Eigen::VectorXd(double)> load_heat;  // heat source g

  Field u0, v0, theta0;

  // Per-law smoothing floors. Solves run at the floors; on failure the
  // widths restart at epsilon_start_scale * velocity_scale and anneal by
  // x0.1 back down onto the floors.
  double epsilon_normal = 1e-6;
  double epsilon_tangential = 1e-6;
  double epsilon_thermal = 1e-6;
  double epsilon_start_scale = 1e-2;
  double velocity_scale = 1.0;
  NewtonConfig newton;

  void validate() const;
};

struct MechTrajectory {
  TimeGrid grid;
  std::vector<Field> u;                 // n_steps + 1 snapshots
  std::vector<Field> v;                 // velocities, same layout
  std::vector<StepSolveStats> stats;    // per step; stats[n] covers node n+1
  std::vector<double> dissipation;      // contact dissipation increment per node, [0] = 0
  int total_newton_iterations() const;
};

struct ThermTrajectory {
  TimeGrid grid;
  std::vector<Field> theta;
  std::vector<StepSolveStats> stats;
  int total_newton_iterations() const;
};

// --------------------------------------------------------------------------
// The two decoupled subproblem solvers. Each step is backward Euler in the
// rate variable (displacements integrate the velocity), solved by damped
// Newton on the regularized system with epsilon-continuation on failure.
// Nonconvergence after continuation throws SolverError.
// --------------------------------------------------------------------------

// Momentum balance under a frozen coupling eta (zero when null):
// M (v^{n+1}-v^n)/dt + A(t, v^{n+1}) + contact(v^{n+1}) + eta(t) = f(t),
// u^{n+1} = u^n + dt v^{n+1}.
MechTrajectory solve_P1(const System& sys, const TimeGrid& grid,
                        const DualTrajectory* eta = nullptr);

// Heat balance driven by the mechanical velocity:
// M (th^{n+1}-th^n)/dt + C2(t, th^{n+1}) + boundary(th^{n+1}) = C3(t, v^{n+1}) + g(t).
ThermTrajectory solve_P2(const System& sys, const TimeGrid& grid, const MechTrajectory& mech);

// --------------------------------------------------------------------------
// Diagnostics shared by reports and tests.
// --------------------------------------------------------------------------

// Stored elastic energy: the potential whose gradient is the law's stress.
double elastic_potential(const TensorLaw& law, double t, const Field& u);

// Kinetic plus stored elastic energy.
double mechanical_energy(const System& sys, double t, const Field& u, const Field& v);

// Power spent against the regularized contact tractions at velocity v.
double contact_power(const System& sys, double t, const Field& v);

}  // namespace hemicontact

#endif
