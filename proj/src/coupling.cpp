// SPDX-License-Identifier: MIT

#include "hemicontact/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hemicontact/runtime.hpp"

namespace hemicontact {

CouplingState CouplingState::zero(const TimeGrid& grid, const Mesh& mesh) {
  CouplingState s;
  s.grid = grid;
  s.eta.assign(static_cast<size_t>(grid.n_nodes()), Eigen::VectorXd::Zero(mesh.n_vec_dofs));
  return s;
}

void CouplingState::validate(const Mesh& mesh) const {
  if (static_cast<int>(eta.size()) != grid.n_nodes())
    throw ValidationError("coupling state: node count does not match the grid");
  for (const auto& e : eta)
    if (e.size() != mesh.n_vec_dofs)
      throw ValidationError("coupling state: vector length does not match the displacement space");
}

// --------------------------------------------------------------------------
// Smallness audit
// --------------------------------------------------------------------------

namespace {

struct LawConstants {
  double m = 0.0;   // relaxed monotonicity, modulation folded in
  double c1 = 0.0;  // growth slope, modulation folded in
  bool regular = false;
};

LawConstants effective_constants(const BoundaryLaw* law, double t0, double t1) {
  LawConstants out;
  if (!law) {
    out.regular = true;  // absent term imposes nothing
    return out;
  }
  const double m_hi = law->mod.max_on(t0, t1);
  out.m = law->m_relaxed * m_hi;
  out.c1 = law->c1 * m_hi;
  out.regular = law->regularity() != Regularity::Unknown;
  return out;
}

}  // namespace

SmallnessReport check_smallness(const System& sys, const TimeGrid& grid,
                                const TraceConstants& trace) {
  sys.validate();
  grid.validate();
  SmallnessReport rep;
  rep.trace = trace;

  const auto& d = sys.material->declared;
  rep.m_A = d.m_A;
  rep.alpha_A = d.alpha_A;
  rep.m_K = d.m_K;
  rep.alpha_K = d.alpha_K;

  const LawConstants n = effective_constants(sys.law_normal, 0.0, grid.T);
  const LawConstants tau = effective_constants(sys.law_tangential, 0.0, grid.T);
  const LawConstants th = effective_constants(sys.law_thermal, 0.0, grid.T);
  rep.m_nu = n.m;
  rep.c1_nu = n.c1;
  rep.m_tau = tau.m;
  rep.c1_tau = tau.c1;
  rep.m_0 = th.m;
  rep.c1_th = th.c1;
  rep.regular_normal = n.regular;
  rep.regular_tangential = tau.regular;
  rep.regular_thermal = th.regular;

  const double g2 = trace.c_e_bar * trace.c_e_bar * trace.gamma_norm2();
  const double gs2 = trace.c_e * trace.c_e * trace.gamma_s_norm2();

  auto add = [&](const std::string& name, double left, double right, bool strict) {
    SmallnessCondition c{name, left, right, left - right, strict, false};
    c.pass = strict ? c.margin > 0.0 : c.margin >= 0.0;
    rep.conditions.push_back(c);
  };
  add("viscosity monotonicity vs contact drop", rep.m_A, std::max(rep.m_nu, rep.m_tau) * g2, false);
  add("viscosity coercivity vs contact growth", rep.alpha_A,
      6.0 * std::max(rep.c1_nu, rep.c1_tau) * g2, true);
  add("conductivity monotonicity vs thermal drop", rep.m_K, rep.m_0 * gs2, false);
  add("conductivity coercivity vs thermal growth", rep.alpha_K, rep.c1_th * gs2, true);

  rep.pass = true;
  for (const auto& c : rep.conditions) rep.pass = rep.pass && c.pass;
  return rep;
}

// --------------------------------------------------------------------------
// CouplingContext
// --------------------------------------------------------------------------

CouplingContext::CouplingContext(const System& sys, const TimeGrid& grid, bool lumped_riesz)
    : sys_(&sys), grid_(grid) {
  sys.validate();
  grid.validate();
  const Mesh& mesh = *sys.mesh;
  strain_form_ = restrict_form_vector(mesh, assemble_form(FormKind::Energy, mesh));
  div_form_ = restrict_form_vector(mesh, assemble_form(FormKind::DivDiv, mesh));
  riesz_ = RieszMap(strain_form_, lumped_riesz);
}

Eigen::VectorXd CouplingContext::memory_convolution(const MechTrajectory& u, int n) const {
  const Mesh& mesh = *sys_->mesh;
  if (n < 0 || n >= static_cast<int>(u.u.size()))
    throw ValidationError("memory convolution: node index out of range");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(mesh.n_vec_dofs);
  if (n == 0 || sys_->material->memory.empty()) return out;
  const double dt = u.grid.dt();
  const double tn = u.grid.time(n);
  for (int k = 0; k <= n; ++k) {
    const double w = (k == 0 || k == n) ? 0.5 * dt : dt;
    const auto [a, b] = sys_->material->eval_memory_kernel(tn - u.grid.time(k));
    const Eigen::VectorXd x = free_coords_vector(mesh, u.u[static_cast<size_t>(k)]);
    if (a != 0.0) out += (w * a) * (strain_form_ * x);
    if (b != 0.0) out += (w * b) * (div_form_ * x);
  }
  return out;
}

DualTrajectory CouplingContext::lambda_apply(const CouplingState& eta, MechTrajectory* mech_out,
                                             ThermTrajectory* therm_out) const {
  const Mesh& mesh = *sys_->mesh;
  eta.validate(mesh);
  if (!eta.grid.same_as(grid_)) throw ValidationError("coupling state grid mismatch");

  MechTrajectory mech = solve_P1(*sys_, grid_, &eta.eta);
  ThermTrajectory therm = solve_P2(*sys_, grid_, mech);

  const bool has_memory = !sys_->material->memory.empty();
  const int nn = grid_.n_nodes();
  const double dt = grid_.dt();

  // Strain-history products reused across target nodes.
  std::vector<Eigen::VectorXd> p_eps, p_div;
  if (has_memory) {
    p_eps.resize(static_cast<size_t>(nn));
    p_div.resize(static_cast<size_t>(nn));
    for (int k = 0; k < nn; ++k) {
      const Eigen::VectorXd x = free_coords_vector(mesh, mech.u[static_cast<size_t>(k)]);
      p_eps[static_cast<size_t>(k)] = strain_form_ * x;
      p_div[static_cast<size_t>(k)] = div_form_ * x;
    }
  }

  DualTrajectory out(static_cast<size_t>(nn));
  for (int m = 0; m < nn; ++m) {
    const double t = grid_.time(m);
    Eigen::VectorXd v =
        assemble_A(mesh, sys_->material->elasticity, t, mech.u[static_cast<size_t>(m)]);
    v += assemble_C1(mesh, sys_->material->expansion, t, therm.theta[static_cast<size_t>(m)]);
    if (has_memory && m > 0) {
      for (int k = 0; k <= m; ++k) {
        const double w = (k == 0 || k == m) ? 0.5 * dt : dt;
        const auto [a, b] = sys_->material->eval_memory_kernel(t - grid_.time(k));
        if (a != 0.0) v += (w * a) * p_eps[static_cast<size_t>(k)];
        if (b != 0.0) v += (w * b) * p_div[static_cast<size_t>(k)];
      }
    }
    out[static_cast<size_t>(m)] = std::move(v);
  }

  if (mech_out) *mech_out = std::move(mech);
  if (therm_out) *therm_out = std::move(therm);
  return out;
}

double CouplingContext::weighted_distance(const DualTrajectory& a, const DualTrajectory& b,
                                          double rho, int* argmax_node) const {
  double best = 0.0;
  int arg = -1;
  for (size_t n = 0; n < a.size(); ++n) {
    const double d = std::exp(-rho * grid_.time(static_cast<int>(n))) * dual_norm(a[n] - b[n]);
    if (d > best) {
      best = d;
      arg = static_cast<int>(n);
    }
  }
  if (argmax_node) *argmax_node = arg;
  return best;
}

// --------------------------------------------------------------------------
// Fixed-point driver
// --------------------------------------------------------------------------

namespace {

// Deterministic probe perturbation: smooth in node and coordinate, unit-free
// amplitude delta.
DualTrajectory probe_perturbation(const TimeGrid& grid, int nf, double delta) {
  DualTrajectory out(static_cast<size_t>(grid.n_nodes()));
  for (int n = 0; n < grid.n_nodes(); ++n) {
    Eigen::VectorXd v(nf);
    for (int i = 0; i < nf; ++i) v[i] = delta * std::sin(0.37 * i + 1.3 * n + 0.5);
    out[static_cast<size_t>(n)] = v;
  }
  return out;
}

// max over nodes of ||num_n||^2 / cumulative trapezoid of ||den||^2.
double fit_ratio(const CouplingContext& ctx, const TimeGrid& grid,
                 const std::vector<double>& num_sq, const std::vector<double>& den_sq,
                 long* skipped = nullptr) {
  const double dt = grid.dt();
  double cum = 0.0;
  double best = 0.0;
  for (int n = 1; n < grid.n_nodes(); ++n) {
    cum += 0.5 * dt * (den_sq[static_cast<size_t>(n - 1)] + den_sq[static_cast<size_t>(n)]);
    if (cum < 1e-14) {
      if (skipped) ++*skipped;
      continue;
    }
    best = std::max(best, num_sq[static_cast<size_t>(n)] / cum);
  }
  (void)ctx;
  return best;
}

}  // namespace

CoupledSolution fixed_point_solve(const System& sys, const TimeGrid& grid,
                                  const CouplingConfig& cfg, const CouplingState* eta0) {
  CouplingContext ctx(sys, grid, cfg.lumped_riesz);
  const Mesh& mesh = *sys.mesh;

  CouplingState cur = eta0 ? *eta0 : CouplingState::zero(grid, mesh);
  cur.validate(mesh);
  if (!cur.grid.same_as(grid)) throw ValidationError("initial coupling state grid mismatch");

  CoupledSolution sol;
  sol.report.rho = std::max(cfg.rho, 0.0);

  // First application; also one endpoint of the rho probe.
  MechTrajectory mech;
  ThermTrajectory therm;
  DualTrajectory next = ctx.lambda_apply(cur, &mech, &therm);

  // Quick exit: the start was already the fixed point (rest scenarios).
  double raw = ctx.weighted_distance(next, cur.eta, 0.0);
  if (raw <= cfg.tolerance) {
    sol.report.rows.push_back({1, raw, 0.0, mech.total_newton_iterations(),
                               therm.total_newton_iterations()});
    sol.report.total_iterations = 1;
    sol.report.converged = true;
    sol.report.final_distance = raw;
    sol.mech = std::move(mech);
    sol.therm = std::move(therm);
    sol.eta.grid = grid;
    sol.eta.eta = std::move(next);
    return sol;
  }

  if (cfg.rho < 0.0) {
    // Probe the map's stability constant at the start point and weight the
    // norm so one application contracts by about one half.
    CouplingState probe;
    probe.grid = grid;
    probe.eta = probe_perturbation(grid, mesh.n_vec_dofs, 1e-2);
    for (size_t n = 0; n < probe.eta.size(); ++n) probe.eta[n] += cur.eta[n];
    DualTrajectory probe_out = ctx.lambda_apply(probe);

    std::vector<double> num_sq(static_cast<size_t>(grid.n_nodes()), 0.0);
    std::vector<double> den_sq(static_cast<size_t>(grid.n_nodes()), 0.0);
    for (int n = 0; n < grid.n_nodes(); ++n) {
      const double dn = ctx.dual_norm(probe_out[static_cast<size_t>(n)] -
                                      next[static_cast<size_t>(n)]);
      const double de = ctx.dual_norm(probe.eta[static_cast<size_t>(n)] -
                                      cur.eta[static_cast<size_t>(n)]);
      num_sq[static_cast<size_t>(n)] = dn * dn;
      den_sq[static_cast<size_t>(n)] = de * de;
    }
    const double c_fit = fit_ratio(ctx, grid, num_sq, den_sq);
    sol.report.fitted_contraction = c_fit;
    sol.report.rho = (std::isfinite(c_fit) && c_fit > 0.0) ? 2.0 * c_fit : 1.0;
  }
  const double rho = sol.report.rho;

  double prev_dist = 0.0;
  for (int it = 1; it <= cfg.max_iterations; ++it) {
    int arg = -1;
    const double dist = ctx.weighted_distance(next, cur.eta, rho, &arg);
    IterationRow row{it, dist, it >= 2 && prev_dist > 0.0 ? dist / prev_dist : 0.0,
                     mech.total_newton_iterations(), therm.total_newton_iterations()};
    sol.report.rows.push_back(row);
    sol.report.total_iterations = it;
    sol.report.final_distance = dist;
    sol.report.largest_ratio_node = arg;

    cur.eta = std::move(next);
    if (dist <= cfg.tolerance) {
      sol.report.converged = true;
      break;
    }
    if (it == cfg.max_iterations) break;
    prev_dist = dist;
    next = ctx.lambda_apply(cur, &mech, &therm);
  }

  sol.mech = std::move(mech);
  sol.therm = std::move(therm);
  sol.eta = std::move(cur);
  return sol;
}

// --------------------------------------------------------------------------
// Stability-constant fitting
// --------------------------------------------------------------------------

EstimateReport verify_estimates(const System& sys, const TimeGrid& grid, const CouplingState& eta1,
                                const CouplingState& eta2, bool lumped_riesz) {
  CouplingContext ctx(sys, grid, lumped_riesz);
  const Mesh& mesh = *sys.mesh;
  eta1.validate(mesh);
  eta2.validate(mesh);

  MechTrajectory mech1, mech2;
  ThermTrajectory therm1, therm2;
  DualTrajectory out1 = ctx.lambda_apply(eta1, &mech1, &therm1);
  DualTrajectory out2 = ctx.lambda_apply(eta2, &mech2, &therm2);

  const int nn = grid.n_nodes();
  std::vector<double> den_sq(static_cast<size_t>(nn), 0.0);
  std::vector<double> u_sq(static_cast<size_t>(nn), 0.0);
  std::vector<double> v_sq(static_cast<size_t>(nn), 0.0);
  std::vector<double> th_sq(static_cast<size_t>(nn), 0.0);
  std::vector<double> la_sq(static_cast<size_t>(nn), 0.0);

  Field du = Field::vector(mesh), dv = Field::vector(mesh), dth = Field::scalar(mesh);
  for (int n = 0; n < nn; ++n) {
    const size_t k = static_cast<size_t>(n);
    const double de = ctx.dual_norm(eta1.eta[k] - eta2.eta[k]);
    den_sq[k] = de * de;
    du.values = mech1.u[k].values - mech2.u[k].values;
    dv.values = mech1.v[k].values - mech2.v[k].values;
    dth.values = therm1.theta[k].values - therm2.theta[k].values;
    const double eu = energy_norm(du), ev = energy_norm(dv), eth = gradient_norm(dth);
    u_sq[k] = eu * eu;
    v_sq[k] = ev * ev;
    th_sq[k] = eth * eth;
    const double el = ctx.dual_norm(out1[k] - out2[k]);
    la_sq[k] = el * el;
  }

  EstimateReport rep;
  rep.c_displacement = fit_ratio(ctx, grid, u_sq, den_sq, &rep.skipped_nodes);
  rep.c_velocity = fit_ratio(ctx, grid, v_sq, den_sq);
  rep.c_theta = fit_ratio(ctx, grid, th_sq, den_sq);
  rep.c_lambda = fit_ratio(ctx, grid, la_sq, den_sq);

  // Per-node velocity ratios for the report; growth diagnostic compares the
  // tail against the early window.
  rep.ratios_velocity.assign(static_cast<size_t>(nn), 0.0);
  {
    const double dt = grid.dt();
    double cum = 0.0;
    double early = 0.0, late = 0.0;
    for (int n = 1; n < nn; ++n) {
      cum += 0.5 * dt * (den_sq[static_cast<size_t>(n - 1)] + den_sq[static_cast<size_t>(n)]);
      if (cum < 1e-14) continue;
      const double r = v_sq[static_cast<size_t>(n)] / cum;
      rep.ratios_velocity[static_cast<size_t>(n)] = r;
      if (n <= nn / 2)
        early = std::max(early, r);
      else
        late = std::max(late, r);
    }
    rep.bounded = std::isfinite(rep.c_velocity) && std::isfinite(rep.c_theta) &&
                  (early == 0.0 || late <= 10.0 * std::max(early, 1e-300));
  }
  return rep;
}

}  // namespace hemicontact
