// SPDX-License-Identifier: MIT

#ifndef HEMICONTACT_COUPLING_HPP
#define HEMICONTACT_COUPLING_HPP

#include <Eigen/Core>
#include <string>
#include <vector>

#include "hemicontact/fem.hpp"
#include "hemicontact/hvi.hpp"

namespace hemicontact {

// Per-node dual coefficient vector over the displacement space; the iterate
// of the staggered coupling loop.
struct CouplingState {
  TimeGrid grid;
  DualTrajectory eta;

  static CouplingState zero(const TimeGrid& grid, const Mesh& mesh);
  void validate(const Mesh& mesh) const;
};

// --------------------------------------------------------------------------
// Smallness audit: the four inequalities tying the bulk monotonicity and
// coercivity constants to the boundary-law constants times the composite
// trace constants. Margins are left minus right; the strict pair needs
// margin > 0, the non-strict pair margin >= 0.
// --------------------------------------------------------------------------

struct SmallnessCondition {
  std::string name;
  double left = 0.0;
  double right = 0.0;
  double margin = 0.0;  // left - right
  bool strict = false;
  bool pass = false;
};

struct SmallnessReport {
  // Constants in effect over the scenario window (modulation folded in).
  double m_A = 0.0, alpha_A = 0.0;
  double m_nu = 0.0, m_tau = 0.0, c1_nu = 0.0, c1_tau = 0.0;
  double m_K = 0.0, alpha_K = 0.0;
  double m_0 = 0.0, c1_th = 0.0;
  TraceConstants trace;
  std::vector<SmallnessCondition> conditions;
  // Whether the law or its negative has a regular superpotential (decidable
  // or declared); informational, not part of pass.
  bool regular_normal = false, regular_tangential = false, regular_thermal = false;
  bool pass = false;
};

SmallnessReport check_smallness(const System& sys, const TimeGrid& grid,
                                const TraceConstants& trace);

// --------------------------------------------------------------------------
// Coupling context: the Riesz map realizing the dual norm on the free
// displacement space and the forms the memory convolution pairs against.
// --------------------------------------------------------------------------

class CouplingContext {
 public:
  CouplingContext(const System& sys, const TimeGrid& grid, bool lumped_riesz = false);

  const System& system() const { return *sys_; }
  const TimeGrid& grid() const { return grid_; }
  double dual_norm(const Eigen::VectorXd& eta) const { return riesz_.dual_norm(eta); }

  // Trapezoidal convolution of the relaxation kernel with the strain history
  // of u up to node n, as a dual vector. Exact for constant kernel and
  // constant-in-time u.
  Eigen::VectorXd memory_convolution(const MechTrajectory& u, int n) const;

  // One application of the coupling operator: solve the mechanical chain
  // under eta, the thermal chain under its velocity, then assemble
  // elasticity + memory + thermal expansion as dual vectors per node.
  DualTrajectory lambda_apply(const CouplingState& eta, MechTrajectory* mech_out = nullptr,
                              ThermTrajectory* therm_out = nullptr) const;

  // max over nodes of exp(-rho t_n) * dual_norm(a_n - b_n).
  double weighted_distance(const DualTrajectory& a, const DualTrajectory& b, double rho,
                           int* argmax_node = nullptr) const;

 private:
  const System* sys_;
  TimeGrid grid_;
  SparseMat strain_form_;  // (eps(u), eps(v)) on free coordinates
  SparseMat div_form_;     // (div u, div v) on free coordinates
  RieszMap riesz_;
};

// --------------------------------------------------------------------------
// Fixed-point driver and its reports.
// --------------------------------------------------------------------------

struct IterationRow {
  int iteration = 0;      // 1-based
  double distance = 0.0;  // weighted distance to the previous iterate
  double ratio = 0.0;     // distance / previous distance, 0 before iteration 2
  int p1_newton = 0;
  int p2_newton = 0;
};

struct IterationReport {
  std::vector<IterationRow> rows;
  int total_iterations = 0;
  bool converged = false;
  double final_distance = 0.0;
  double rho = 0.0;            // weight actually used
  double fitted_contraction = 0.0;  // probe estimate of the map constant
  int largest_ratio_node = -1;      // diagnostic: node dominating the last distance
};

struct CouplingConfig {
  double tolerance = 1e-8;  // absolute, weighted norm
  int max_iterations = 30;
  double rho = -1.0;  // < 0: fit from a probe pair, rho = 2 * fitted constant
  bool lumped_riesz = false;
  bool force = false;  // proceed when the smallness audit fails
};

struct CoupledSolution {
  MechTrajectory mech;
  ThermTrajectory therm;
  CouplingState eta;  // converged coupling
  IterationReport report;
};

// Iterates eta <- Lambda(eta) from eta0 (zero when null) in the weighted
// norm until the successive distance drops below tolerance. Subproblem
// failures propagate as SolverError; exhaustion is reported, not thrown.
CoupledSolution fixed_point_solve(const System& sys, const TimeGrid& grid,
                                  const CouplingConfig& cfg = {},
                                  const CouplingState* eta0 = nullptr);

// --------------------------------------------------------------------------
// Empirical stability constants: solve both subproblem chains under two
// couplings and fit max over nodes of squared solution distance over the
// cumulative squared coupling distance. Nodes with denominator < 1e-14 are
// skipped. bounded is false when the tail ratios dwarf the early ones.
// --------------------------------------------------------------------------

struct EstimateReport {
  double c_displacement = 0.0;
  double c_velocity = 0.0;
  double c_theta = 0.0;
  double c_lambda = 0.0;  // same fit applied to the coupling-map outputs
  std::vector<double> ratios_velocity;  // per node, 0 where skipped
  long skipped_nodes = 0;
  bool bounded = true;
};

EstimateReport verify_estimates(const System& sys, const TimeGrid& grid, const CouplingState& eta1,
                                const CouplingState& eta2, bool lumped_riesz = false);

}  // namespace hemicontact

#endif
