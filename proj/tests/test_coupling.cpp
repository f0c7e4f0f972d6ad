// SPDX-License-Identifier: MIT

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <vector>

#include "hemicontact/coupling.hpp"
#include "hemicontact/fem.hpp"
#include "hemicontact/hvi.hpp"
#include "hemicontact/material.hpp"
#include "hemicontact/mesh.hpp"
#include "hemicontact/nonsmooth.hpp"
#include "hemicontact/runtime.hpp"

using namespace hemicontact;

namespace {

Eigen::VectorXd random_vector(int n, std::uint64_t seed, double scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  Eigen::VectorXd out(n);
  for (int i = 0; i < n; ++i) out[i] = scale * U(rng);
  return out;
}

// Continuous piecewise-linear density with a shallow dip: slope s0, then a
// slight descent, then s0 again. Worst downward slope gives the relaxed
// monotonicity constant.
BoundaryLaw dipped_law(LawRole role, double s0) {
  BoundaryLaw law;
  law.role = role;
  const double drop = 0.2 * s0;
  std::vector<std::vector<double>> pieces;
  pieces.push_back({0.0, s0});
  pieces.push_back({0.5 * (s0 + drop), -drop});
  pieces.push_back({-0.5 * (s0 + drop), s0});
  law.density = PiecewiseDensity({0.5, 1.0}, pieces);
  law.c0 = 0.5 * (s0 + drop);
  law.c1 = s0;
  law.m_relaxed = drop;
  return law;
}

BoundaryLaw stepped_thermal_law() {
  BoundaryLaw law;
  law.role = LawRole::Thermal;
  law.density = PiecewiseDensity({1.0}, {{0.0, 0.03}, {0.02, 0.03}});
  law.c0 = 0.02;
  law.c1 = 0.03;
  law.m_relaxed = 0.0;  // the jump at 1 goes up
  return law;
}

// Small fully coupled block: every constitutive term active, loads gentle
// enough that the smallness audit passes with room to spare.
struct CoupledFixture {
  Mesh mesh;
  MaterialModel mat;
  BoundaryLaw normal, tangential, thermal;
  Eigen::VectorXd f, g;
  System sys;

  explicit CoupledFixture(int cells = 6, double T = 1.0) {
    mesh = make_unit_square_mesh(cells);
    mat.viscosity.two_mu = 2.0;
    mat.viscosity.lambda = 1.0;
    mat.elasticity.two_mu = 0.4;
    mat.elasticity.lambda = 0.4;
    mat.memory.push_back({0.2, 1.0, 0.0});
    mat.expansion.c_exp = 0.3;
    mat.conductivity.k = 1.0;
    mat.heat_coupling.c.at(0, 0) = 0.3;
    mat.heat_coupling.c.at(1, 1) = 0.3;
    mat.heating.lambda = 0.4;
    mat.derive_declared(0.0, T);

    normal = dipped_law(LawRole::Normal, 0.05);
    tangential = dipped_law(LawRole::Tangential, 0.04);
    thermal = stepped_thermal_law();

    sys.mesh = &mesh;
    sys.material = &mat;
    sys.law_normal = &normal;
    sys.law_tangential = &tangential;
    sys.law_thermal = &thermal;
    sys.u0 = Field::vector(mesh);
    sys.v0 = Field::vector(mesh);
    sys.theta0 = Field::scalar(mesh);
    f = random_vector(mesh.n_vec_dofs, 91, 0.05);
    g = random_vector(mesh.n_scal_dofs, 92, 0.02);
    sys.load_mech = [this](double t) { return (1.0 + 0.5 * std::sin(t)) * f; };
    sys.load_heat = [this](double) { return g; };
    sys.velocity_scale = 0.3;
  }

  CoupledFixture(const CoupledFixture&) = delete;
};

}  // namespace

TEST_CASE("a zero coupling state matches the grid and the displacement space") {
  Mesh mesh = make_unit_square_mesh(3);
  TimeGrid grid{1.0, 5};
  CouplingState s = CouplingState::zero(grid, mesh);
  REQUIRE(static_cast<int>(s.eta.size()) == 6);
  for (const auto& e : s.eta) {
    CHECK(e.size() == mesh.n_vec_dofs);
    CHECK(e.isZero(0.0));
  }
  CHECK_NOTHROW(s.validate(mesh));

  CouplingState bad = s;
  bad.eta.pop_back();
  CHECK_THROWS_AS(bad.validate(mesh), ValidationError);
  CouplingState bad2 = s;
  bad2.eta[0] = Eigen::VectorXd::Zero(3);
  CHECK_THROWS_AS(bad2.validate(mesh), ValidationError);
}

TEST_CASE("the smallness audit reproduces hand arithmetic") {
  Mesh mesh = make_unit_square_mesh(2);
  MaterialModel mat;
  mat.viscosity.two_mu = 2.0;
  mat.viscosity.lambda = 1.0;
  mat.conductivity.k = 1.0;
  mat.derive_declared(0.0, 1.0);
  REQUIRE(mat.declared.m_A == doctest::Approx(2.0));
  REQUIRE(mat.declared.alpha_A == doctest::Approx(2.0));
  REQUIRE(mat.declared.m_K == doctest::Approx(1.0));

  BoundaryLaw normal;
  normal.role = LawRole::Normal;
  normal.density = PiecewiseDensity::linear(0.5);
  normal.c1 = 0.5;
  normal.m_relaxed = 0.25;
  normal.mod = Modulation({{0.0, 1.0}, {1.0, 2.0}});  // max 2 on [0, 1]

  BoundaryLaw thermal;
  thermal.role = LawRole::Thermal;
  thermal.density = PiecewiseDensity::linear(0.2);
  thermal.c1 = 0.2;
  thermal.m_relaxed = 0.1;

  System sys;
  sys.mesh = &mesh;
  sys.material = &mat;
  sys.law_normal = &normal;
  sys.law_thermal = &thermal;
  sys.u0 = Field::vector(mesh);
  sys.v0 = Field::vector(mesh);
  sys.theta0 = Field::scalar(mesh);

  TraceConstants trace;
  trace.gamma_norm = 0.5;    // gamma^2 = 0.25
  trace.gamma_s_norm = 0.4;  // gamma_s^2 = 0.16

  TimeGrid grid{1.0, 4};
  SmallnessReport rep = check_smallness(sys, grid, trace);

  // Modulation peak 2 doubles the declared law constants.
  CHECK(rep.m_nu == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(rep.c1_nu == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(rep.m_tau == 0.0);
  CHECK(rep.c1_tau == 0.0);
  CHECK(rep.m_0 == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(rep.c1_th == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(rep.regular_tangential);  // absent law imposes nothing

  REQUIRE(rep.conditions.size() == 4);
  CHECK(rep.conditions[0].name == "viscosity monotonicity vs contact drop");
  CHECK(rep.conditions[1].name == "viscosity coercivity vs contact growth");
  CHECK(rep.conditions[2].name == "conductivity monotonicity vs thermal drop");
  CHECK(rep.conditions[3].name == "conductivity coercivity vs thermal growth");
  CHECK(rep.conditions[0].right == doctest::Approx(0.5 * 0.25).epsilon(1e-14));
  CHECK(rep.conditions[0].margin == doctest::Approx(2.0 - 0.125).epsilon(1e-14));
  CHECK(rep.conditions[1].right == doctest::Approx(6.0 * 1.0 * 0.25).epsilon(1e-14));
  CHECK(rep.conditions[1].margin == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(rep.conditions[2].margin == doctest::Approx(1.0 - 0.1 * 0.16).epsilon(1e-14));
  CHECK(rep.conditions[3].margin == doctest::Approx(1.0 - 0.2 * 0.16).epsilon(1e-14));
  CHECK_FALSE(rep.conditions[0].strict);
  CHECK(rep.conditions[1].strict);
  CHECK(rep.pass);

  // The non-strict pair accepts equality, the strict pair rejects it.
  MaterialModel tight = mat;
  tight.declared.m_A = 0.5 * 0.25;  // equals the drop side exactly
  System sys_tight = sys;
  sys_tight.material = &tight;
  SmallnessReport rt = check_smallness(sys_tight, grid, trace);
  CHECK(rt.conditions[0].margin == 0.0);
  CHECK(rt.conditions[0].pass);

  tight.declared.m_A = mat.declared.m_A;
  tight.declared.alpha_A = 6.0 * 1.0 * 0.25;  // equals the growth side exactly
  SmallnessReport rs = check_smallness(sys_tight, grid, trace);
  CHECK(rs.conditions[1].margin == 0.0);
  CHECK_FALSE(rs.conditions[1].pass);
  CHECK_FALSE(rs.pass);

  // An oversized growth constant flips the audit.
  BoundaryLaw big = normal;
  big.density = PiecewiseDensity::linear(2.0);
  big.c1 = 2.0;
  big.mod = Modulation();
  System sys_big = sys;
  sys_big.law_normal = &big;
  SmallnessReport rb = check_smallness(sys_big, grid, trace);
  CHECK(rb.conditions[1].right == doctest::Approx(3.0).epsilon(1e-14));
  CHECK_FALSE(rb.conditions[1].pass);
  CHECK_FALSE(rb.pass);
}

TEST_CASE("memory convolution matches an independent trapezoid on a manufactured history") {
  Mesh mesh = make_unit_square_mesh(3);
  MaterialModel mat;
  mat.viscosity.two_mu = 2.0;
  mat.conductivity.k = 1.0;
  mat.memory.push_back({1.0, 1.0, 0.0});
  mat.memory.push_back({0.0, 2.0, 0.5});
  mat.derive_declared(0.0, 1.0);

  System sys;
  sys.mesh = &mesh;
  sys.material = &mat;
  sys.u0 = Field::vector(mesh);
  sys.v0 = Field::vector(mesh);
  sys.theta0 = Field::scalar(mesh);

  TimeGrid grid{1.0, 20};
  CouplingContext ctx(sys, grid);

  // History u(t) = t * uhat.
  const Eigen::VectorXd uhat = random_vector(mesh.n_vec_dofs, 3);
  MechTrajectory traj;
  traj.grid = grid;
  for (int n = 0; n < grid.n_nodes(); ++n) {
    Field u = Field::vector(mesh);
    set_free_coords_vector(mesh, grid.time(n) * uhat, u);
    traj.u.push_back(std::move(u));
    traj.v.push_back(Field::vector(mesh));
  }

  const Eigen::MatrixXd E =
      Eigen::MatrixXd(restrict_form_vector(mesh, assemble_form(FormKind::Energy, mesh)));
  const Eigen::MatrixXd D =
      Eigen::MatrixXd(restrict_form_vector(mesh, assemble_form(FormKind::DivDiv, mesh)));

  CHECK(ctx.memory_convolution(traj, 0).isZero(0.0));
  const double dt = grid.dt();
  for (int n : {1, 7, 20}) {
    double ce = 0.0, cd = 0.0;  // scalar trapezoid weights per form
    for (int k = 0; k <= n; ++k) {
      const double w = (k == 0 || k == n) ? 0.5 * dt : dt;
      const double lag = grid.time(n) - grid.time(k);
      ce += w * std::exp(-lag) * grid.time(k);
      cd += w * 0.5 * std::exp(-lag / 2.0) * grid.time(k);
    }
    const Eigen::VectorXd want = ce * (E * uhat) + cd * (D * uhat);
    const Eigen::VectorXd got = ctx.memory_convolution(traj, n);
    CHECK((got - want).norm() <= 1e-13 * (1.0 + want.norm()));
  }

  // The trapezoid rule is second order against the closed-form integral
  // of exp(-(t-s)) s, namely t - 1 + exp(-t).
  auto trapz_error = [&](int steps) {
    const double h = 1.0 / steps;
    double acc = 0.0;
    for (int k = 0; k <= steps; ++k) {
      const double w = (k == 0 || k == steps) ? 0.5 * h : h;
      acc += w * std::exp(-(1.0 - k * h)) * (k * h);
    }
    return std::abs(acc - std::exp(-1.0));  // exact value at t = 1
  };
  const double e10 = trapz_error(10);
  const double e20 = trapz_error(20);
  CHECK(e10 / e20 == doctest::Approx(4.0).epsilon(0.1));

  // A kernel that barely relaxes behaves as a constant one; a linear-in-time
  // history is then integrated exactly.
  MaterialModel slow = mat;
  slow.memory.clear();
  slow.memory.push_back({0.7, 1e12, 0.0});
  System sys2 = sys;
  sys2.material = &slow;
  CouplingContext ctx2(sys2, grid);
  const Eigen::VectorXd got = ctx2.memory_convolution(traj, 20);
  const Eigen::VectorXd want = 0.7 * 0.5 * (E * uhat);  // 0.7 * t^2/2 at t = 1
  CHECK((got - want).norm() <= 1e-9 * want.norm());
}

TEST_CASE("with no bulk coupling terms the map is zero and the driver exits at once") {
  Mesh mesh = make_unit_square_mesh(3);
  MaterialModel mat;
  mat.viscosity.two_mu = 2.0;
  mat.viscosity.lambda = 1.0;
  mat.conductivity.k = 1.0;
  mat.derive_declared(0.0, 1.0);

  System sys;
  sys.mesh = &mesh;
  sys.material = &mat;
  sys.u0 = Field::vector(mesh);
  sys.v0 = Field::vector(mesh);
  sys.theta0 = Field::scalar(mesh);
  const Eigen::VectorXd f = random_vector(mesh.n_vec_dofs, 17, 0.1);
  sys.load_mech = [&](double) { return f; };

  TimeGrid grid{0.5, 6};
  CouplingContext ctx(sys, grid);
  CouplingState any = CouplingState::zero(grid, mesh);
  for (auto& e : any.eta) e = random_vector(mesh.n_vec_dofs, 23, 0.2);
  DualTrajectory out = ctx.lambda_apply(any);
  for (const auto& v : out) CHECK(v.isZero(0.0));

  // Starting at zero hits the fixed point with the first application.
  CoupledSolution sol = fixed_point_solve(sys, grid);
  CHECK(sol.report.converged);
  CHECK(sol.report.total_iterations == 1);
  CHECK(sol.report.final_distance == 0.0);
  CHECK(sol.report.rho == 0.0);
  REQUIRE(sol.report.rows.size() == 1);
  CHECK(sol.report.rows[0].p1_newton > 0);  // the chain itself is loaded

  // Starting away from it converges on the second application.
  CoupledSolution sol2 = fixed_point_solve(sys, grid, {}, &any);
  CHECK(sol2.report.converged);
  CHECK(sol2.report.total_iterations == 2);
  CHECK(sol2.report.final_distance == 0.0);

  // Grid mismatch in the start state is rejected.
  CouplingState wrong = CouplingState::zero(TimeGrid{0.5, 5}, mesh);
  CHECK_THROWS_AS(fixed_point_solve(sys, grid, {}, &wrong), ValidationError);
}

TEST_CASE("weighted distances decay with the weight and report the dominating node") {
  Mesh mesh = make_unit_square_mesh(2);
  MaterialModel mat;
  mat.viscosity.two_mu = 2.0;
  mat.conductivity.k = 1.0;
  mat.derive_declared(0.0, 1.0);
  System sys;
  sys.mesh = &mesh;
  sys.material = &mat;
  sys.u0 = Field::vector(mesh);
  sys.v0 = Field::vector(mesh);
  sys.theta0 = Field::scalar(mesh);
  TimeGrid grid{1.0, 2};
  CouplingContext ctx(sys, grid);

  const Eigen::VectorXd e = random_vector(mesh.n_vec_dofs, 5);
  DualTrajectory a(3, Eigen::VectorXd::Zero(mesh.n_vec_dofs));
  a[1] = e;
  a[2] = 2.0 * e;
  DualTrajectory b(3, Eigen::VectorXd::Zero(mesh.n_vec_dofs));

  int arg = -1;
  const double flat = ctx.weighted_distance(a, b, 0.0, &arg);
  CHECK(arg == 2);  // the late node dominates without weighting
  CHECK(flat == doctest::Approx(2.0 * ctx.dual_norm(e)).epsilon(1e-13));

  const double damped = ctx.weighted_distance(a, b, 4.0, &arg);
  CHECK(arg == 1);  // a strong weight promotes the early node
  CHECK(damped < flat);
  CHECK(damped == doctest::Approx(std::exp(-4.0 * 0.5) * ctx.dual_norm(e)).epsilon(1e-13));
}

TEST_CASE("the coupled block contracts, converges, and forgets its starting point") {
  CoupledFixture fx;
  TimeGrid grid{1.0, 12};

  const TraceConstants trace = estimate_trace_constants(fx.mesh);
  const SmallnessReport small = check_smallness(fx.sys, grid, trace);
  REQUIRE(small.pass);

  CouplingConfig cfg;
  cfg.tolerance = 1e-8;
  cfg.max_iterations = 30;
  CoupledSolution sol = fixed_point_solve(fx.sys, grid, cfg);
  CHECK(sol.report.converged);
  CHECK(sol.report.total_iterations <= 30);
  CHECK(sol.report.final_distance <= 1e-8);
  CHECK(sol.report.rho > 0.0);
  CHECK(sol.report.fitted_contraction > 0.0);
  REQUIRE(sol.report.rows.size() >= 3);
  for (size_t i = 1; i < sol.report.rows.size(); ++i) {
    CHECK(sol.report.rows[i].ratio > 0.0);
    CHECK(sol.report.rows[i].ratio < 1.0);
  }

  // Bitwise repeatability of the whole report.
  CoupledSolution rerun = fixed_point_solve(fx.sys, grid, cfg);
  CHECK(rerun.report.total_iterations == sol.report.total_iterations);
  CHECK(rerun.report.final_distance == sol.report.final_distance);
  CHECK(rerun.report.rho == sol.report.rho);
  for (size_t i = 0; i < sol.report.rows.size(); ++i)
    CHECK(rerun.report.rows[i].distance == sol.report.rows[i].distance);
  CHECK(rerun.mech.u.back().values == sol.mech.u.back().values);
  CHECK(rerun.therm.theta.back().values == sol.therm.theta.back().values);

  // A perturbed start lands on the same trajectory.
  CouplingState seeded = CouplingState::zero(grid, fx.mesh);
  for (size_t n = 0; n < seeded.eta.size(); ++n)
    seeded.eta[n] = random_vector(fx.mesh.n_vec_dofs, 100 + n, 0.05);
  CoupledSolution sol2 = fixed_point_solve(fx.sys, grid, cfg, &seeded);
  CHECK(sol2.report.converged);

  CouplingContext ctx(fx.sys, grid);
  double scale = 0.0;
  for (const auto& e : sol.eta.eta) scale = std::max(scale, ctx.dual_norm(e));
  REQUIRE(scale > 0.0);
  const double gap = ctx.weighted_distance(sol.eta.eta, sol2.eta.eta, sol.report.rho);
  CHECK(gap <= 1e-6 * scale);
  const double du = (sol.mech.u.back().values - sol2.mech.u.back().values).lpNorm<Eigen::Infinity>();
  const double uref = sol.mech.u.back().values.lpNorm<Eigen::Infinity>();
  CHECK(du <= 1e-6 * uref);
}

TEST_CASE("lumped and consistent dual norms agree on the fixed point itself") {
  CoupledFixture fx;
  TimeGrid grid{1.0, 10};
  CouplingConfig cfg;
  cfg.tolerance = 1e-9;
  CoupledSolution dense = fixed_point_solve(fx.sys, grid, cfg);
  CouplingConfig lumped_cfg = cfg;
  lumped_cfg.lumped_riesz = true;
  CoupledSolution lumped = fixed_point_solve(fx.sys, grid, lumped_cfg);
  CHECK(dense.report.converged);
  CHECK(lumped.report.converged);
  const double du =
      (dense.mech.u.back().values - lumped.mech.u.back().values).lpNorm<Eigen::Infinity>();
  const double dth =
      (dense.therm.theta.back().values - lumped.therm.theta.back().values).lpNorm<Eigen::Infinity>();
  const double uref = dense.mech.u.back().values.lpNorm<Eigen::Infinity>();
  const double thref = dense.therm.theta.back().values.lpNorm<Eigen::Infinity>();
  CHECK(du <= 1e-5 * uref);
  CHECK(dth <= 1e-5 * (1.0 + thref));
}

TEST_CASE("fitted stability constants are finite, symmetric, and bounded") {
  CoupledFixture fx;
  TimeGrid grid{1.0, 10};

  CouplingState eta1 = CouplingState::zero(grid, fx.mesh);
  CouplingState eta2 = CouplingState::zero(grid, fx.mesh);
  for (size_t n = 1; n < eta2.eta.size(); ++n)
    eta2.eta[n] = random_vector(fx.mesh.n_vec_dofs, 200 + n, 0.05);

  EstimateReport rep = verify_estimates(fx.sys, grid, eta1, eta2);
  CHECK(std::isfinite(rep.c_displacement));
  CHECK(std::isfinite(rep.c_velocity));
  CHECK(std::isfinite(rep.c_theta));
  CHECK(std::isfinite(rep.c_lambda));
  CHECK(rep.c_velocity > 0.0);
  CHECK(rep.c_theta > 0.0);
  CHECK(rep.bounded);
  CHECK(rep.skipped_nodes < grid.n_nodes());
  CHECK(static_cast<int>(rep.ratios_velocity.size()) == grid.n_nodes());

  // Swapping the pair changes nothing: every fitted quantity is a norm of
  // differences.
  EstimateReport swapped = verify_estimates(fx.sys, grid, eta2, eta1);
  CHECK(swapped.c_velocity == doctest::Approx(rep.c_velocity).epsilon(1e-12));
  CHECK(swapped.c_theta == doctest::Approx(rep.c_theta).epsilon(1e-12));
  CHECK(swapped.c_lambda == doctest::Approx(rep.c_lambda).epsilon(1e-12));

  // Identical couplings leave nothing to fit.
  EstimateReport same = verify_estimates(fx.sys, grid, eta1, eta1);
  CHECK(same.c_velocity == 0.0);
  CHECK(same.skipped_nodes == grid.n_steps);
}

TEST_CASE("the staggered chain is first order in the step size") {
  CoupledFixture fx(4, 1.0);
  CouplingConfig cfg;
  cfg.tolerance = 1e-11;
  auto final_u = [&](int steps) {
    TimeGrid grid{1.0, steps};
    CoupledSolution sol = fixed_point_solve(fx.sys, grid, cfg);
    REQUIRE(sol.report.converged);
    return free_coords_vector(fx.mesh, sol.mech.u.back());
  };
  const Eigen::VectorXd u8 = final_u(8);
  const Eigen::VectorXd u16 = final_u(16);
  const Eigen::VectorXd u32 = final_u(32);
  const double d1 = (u8 - u16).norm();
  const double d2 = (u16 - u32).norm();
  REQUIRE(d2 > 0.0);
  CHECK(d1 / d2 == doctest::Approx(2.0).epsilon(0.3));
}
