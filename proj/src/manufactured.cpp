// SPDX-License-Identifier: MIT

#include "hemicontact/manufactured.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "hemicontact/runtime.hpp"

namespace hemicontact {

namespace {

// Degree-4 rule, 6 points; weights sum to 1 and scale by the element area.
struct TriPoint {
  double b0, b1, b2, w;
};
constexpr TriPoint kTriRule[6] = {
    {0.108103018168070, 0.445948490915965, 0.445948490915965, 0.223381589678011},
    {0.445948490915965, 0.108103018168070, 0.445948490915965, 0.223381589678011},
    {0.445948490915965, 0.445948490915965, 0.108103018168070, 0.223381589678011},
    {0.816847572980459, 0.091576213509771, 0.091576213509771, 0.109951743655322},
    {0.091576213509771, 0.816847572980459, 0.091576213509771, 0.109951743655322},
    {0.091576213509771, 0.091576213509771, 0.816847572980459, 0.109951743655322},
};

// Two-point Gauss on [0, 1], exact through cubics.
constexpr double kEdgeS[2] = {0.21132486540518713, 0.78867513459481287};

double P(double x) { return x * x - x * x * x; }
double dP(double x) { return 2.0 * x - 3.0 * x * x; }
double ddP(double x) { return 2.0 - 6.0 * x; }

}  // namespace

Eigen::Vector2d ManufacturedCase::exact_u(double t, const Eigen::Vector2d& x) const {
  const double e = std::exp(-t);
  return {-e * alpha * dP(x.x()) * x.y(), e * alpha * P(x.x())};
}

Eigen::Vector2d ManufacturedCase::exact_v(double t, const Eigen::Vector2d& x) const {
  return -exact_u(t, x);
}

double ManufacturedCase::exact_theta(double t, const Eigen::Vector2d& x) const {
  const double q = (1.0 - x.y()) * (1.0 + a * x.y());
  return std::exp(-t) * P(x.x()) * q;
}

SymTensor ManufacturedCase::exact_stress(double t, const Eigen::Vector2d& x) const {
  const double e = std::exp(-t);
  const double A1 = (2.0 * (mu_e - mu_v) + memory_g * t) * e;
  const double A2 = (lambda_e - lambda_v) * e;
  const double E11 = -alpha * ddP(x.x()) * x.y();  // sole strain entry of U
  const double q = (1.0 - x.y()) * (1.0 + a * x.y());
  const double th = c_exp * e * P(x.x()) * q;
  SymTensor s = SymTensor::zero(2);
  s.at(0, 0) = (A1 + A2) * E11 - th;
  s.at(1, 1) = A2 * E11 - th;
  return s;
}

Eigen::Vector2d ManufacturedCase::volume_force(double t, const Eigen::Vector2d& x) const {
  const double e = std::exp(-t);
  const double A1 = (2.0 * (mu_e - mu_v) + memory_g * t) * e;
  const double A2 = (lambda_e - lambda_v) * e;
  const double q = (1.0 - x.y()) * (1.0 + a * x.y());
  const double dq = a - 1.0 - 2.0 * a * x.y();
  // u'' - div sigma, with P''' = -6 supplying the first divergence term.
  const double f1 =
      -e * alpha * dP(x.x()) * x.y() - 6.0 * (A1 + A2) * alpha * x.y() + c_exp * e * dP(x.x()) * q;
  const double f2 = e * alpha * P(x.x()) + A2 * alpha * ddP(x.x()) + c_exp * e * P(x.x()) * dq;
  return {f1, f2};
}

double ManufacturedCase::heat_source(double t, const Eigen::Vector2d& x) const {
  const double e = std::exp(-t);
  const double q = (1.0 - x.y()) * (1.0 + a * x.y());
  const double lap = ddP(x.x()) * q + P(x.x()) * (-2.0 * a);
  // th' - k lap th - R(v), R(v) = -c : eps(v).
  return -e * P(x.x()) * q - k_cond * e * lap + c11 * alpha * ddP(x.x()) * x.y() * e;
}

Eigen::VectorXd ManufacturedCase::assemble_mech_load(double t) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(mesh.n_vec_dofs);
  for (int tri = 0; tri < mesh.n_triangles(); ++tri) {
    const auto& tv = mesh.triangles[static_cast<size_t>(tri)];
    const double area = mesh.tri_area[static_cast<size_t>(tri)];
    for (const TriPoint& p : kTriRule) {
      const Eigen::Vector2d xq = p.b0 * mesh.vertices[static_cast<size_t>(tv[0])] +
                                 p.b1 * mesh.vertices[static_cast<size_t>(tv[1])] +
                                 p.b2 * mesh.vertices[static_cast<size_t>(tv[2])];
      const Eigen::Vector2d f = volume_force(t, xq);
      const double bary[3] = {p.b0, p.b1, p.b2};
      for (int a_loc = 0; a_loc < 3; ++a_loc)
        for (int k = 0; k < 2; ++k) {
          const int dof = mesh.vec_dof[static_cast<size_t>(2 * tv[a_loc] + k)];
          if (dof >= 0) out[dof] += area * p.w * bary[a_loc] * f[k];
        }
    }
  }
  for (int e = 0; e < mesh.n_boundary_edges(); ++e) {
    const BoundaryEdge& edge = mesh.boundary_edges[static_cast<size_t>(e)];
    if (edge.tag != BoundaryTag::Neumann) continue;
    const Eigen::Vector2d& pa = mesh.vertices[static_cast<size_t>(edge.a)];
    const Eigen::Vector2d& pb = mesh.vertices[static_cast<size_t>(edge.b)];
    const Eigen::Vector2d& nrm = mesh.edge_normal[static_cast<size_t>(e)];
    const double len = mesh.edge_length[static_cast<size_t>(e)];
    for (const double s : kEdgeS) {
      const Eigen::Vector2d xq = (1.0 - s) * pa + s * pb;
      const SymTensor sig = exact_stress(t, xq);
      Eigen::Vector2d traction;
      for (int k = 0; k < 2; ++k)
        traction[k] = sig.at(k, 0) * nrm.x() + sig.at(k, 1) * nrm.y();
      const double phi[2] = {1.0 - s, s};
      const int verts[2] = {edge.a, edge.b};
      for (int a_loc = 0; a_loc < 2; ++a_loc)
        for (int k = 0; k < 2; ++k) {
          const int dof = mesh.vec_dof[static_cast<size_t>(2 * verts[a_loc] + k)];
          if (dof >= 0) out[dof] += 0.5 * len * phi[a_loc] * traction[k];
        }
    }
  }
  return out;
}

Eigen::VectorXd ManufacturedCase::assemble_heat_load(double t) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(mesh.n_scal_dofs);
  for (int tri = 0; tri < mesh.n_triangles(); ++tri) {
    const auto& tv = mesh.triangles[static_cast<size_t>(tri)];
    const double area = mesh.tri_area[static_cast<size_t>(tri)];
    for (const TriPoint& p : kTriRule) {
      const Eigen::Vector2d xq = p.b0 * mesh.vertices[static_cast<size_t>(tv[0])] +
                                 p.b1 * mesh.vertices[static_cast<size_t>(tv[1])] +
                                 p.b2 * mesh.vertices[static_cast<size_t>(tv[2])];
      const double g = heat_source(t, xq);
      const double bary[3] = {p.b0, p.b1, p.b2};
      for (int a_loc = 0; a_loc < 3; ++a_loc) {
        const int dof = mesh.scal_dof[static_cast<size_t>(tv[a_loc])];
        if (dof >= 0) out[dof] += area * p.w * bary[a_loc] * g;
      }
    }
  }
  return out;
}

double ManufacturedCase::error_u(const Field& u, double t) const {
  double acc = 0.0;
  for (int tri = 0; tri < mesh.n_triangles(); ++tri) {
    const auto& tv = mesh.triangles[static_cast<size_t>(tri)];
    const double area = mesh.tri_area[static_cast<size_t>(tri)];
    for (const TriPoint& p : kTriRule) {
      const Eigen::Vector2d xq = p.b0 * mesh.vertices[static_cast<size_t>(tv[0])] +
                                 p.b1 * mesh.vertices[static_cast<size_t>(tv[1])] +
                                 p.b2 * mesh.vertices[static_cast<size_t>(tv[2])];
      const double bary[3] = {p.b0, p.b1, p.b2};
      Eigen::Vector2d uh = Eigen::Vector2d::Zero();
      for (int a_loc = 0; a_loc < 3; ++a_loc) {
        uh.x() += bary[a_loc] * u.values[2 * tv[a_loc]];
        uh.y() += bary[a_loc] * u.values[2 * tv[a_loc] + 1];
      }
      acc += area * p.w * (uh - exact_u(t, xq)).squaredNorm();
    }
  }
  return std::sqrt(acc);
}

double ManufacturedCase::error_theta(const Field& theta, double t) const {
  double acc = 0.0;
  for (int tri = 0; tri < mesh.n_triangles(); ++tri) {
    const auto& tv = mesh.triangles[static_cast<size_t>(tri)];
    const double area = mesh.tri_area[static_cast<size_t>(tri)];
    for (const TriPoint& p : kTriRule) {
      const Eigen::Vector2d xq = p.b0 * mesh.vertices[static_cast<size_t>(tv[0])] +
                                 p.b1 * mesh.vertices[static_cast<size_t>(tv[1])] +
                                 p.b2 * mesh.vertices[static_cast<size_t>(tv[2])];
      const double bary[3] = {p.b0, p.b1, p.b2};
      double th = 0.0;
      for (int a_loc = 0; a_loc < 3; ++a_loc) th += bary[a_loc] * theta.values[tv[a_loc]];
      const double diff = th - exact_theta(t, xq);
      acc += area * p.w * diff * diff;
    }
  }
  return std::sqrt(acc);
}

std::unique_ptr<ManufacturedCase> make_manufactured_case(int n_cells) {
  if (n_cells < 1) throw ValidationError("manufactured case needs at least one cell per side");
  auto mc = std::make_unique<ManufacturedCase>();
  mc->alpha = mc->c_exp / mc->kappa_n;
  mc->a = 1.0 + mc->kappa_th / mc->k_cond;

  SquareTags tags;
  tags.left = BoundaryTag::Dirichlet;
  tags.right = BoundaryTag::Neumann;
  tags.bottom = BoundaryTag::Contact;
  tags.top = BoundaryTag::Neumann;
  mc->mesh = make_unit_square_mesh(n_cells, tags);

  MaterialModel& m = mc->material;
  m.viscosity.two_mu = 2.0 * mc->mu_v;
  m.viscosity.lambda = mc->lambda_v;
  m.elasticity.two_mu = 2.0 * mc->mu_e;
  m.elasticity.lambda = mc->lambda_e;
  m.memory.push_back({mc->memory_g, 1.0, 0.0});
  m.expansion.c_exp = mc->c_exp;
  m.conductivity.k = mc->k_cond;
  m.heat_coupling.c = SymTensor::zero(2);
  m.heat_coupling.c.at(0, 0) = mc->c11;
  m.heat_coupling.c.at(1, 1) = mc->c11;
  m.derive_declared(0.0, 1.0);
  m.validate();

  auto linear_law = [](const char* name, LawRole role, double slope) {
    BoundaryLaw law;
    law.name = name;
    law.role = role;
    law.density = PiecewiseDensity::linear(slope);
    law.c1 = slope;
    law.m_relaxed = 0.0;
    law.validate();
    return law;
  };
  mc->normal = linear_law("normal", LawRole::Normal, mc->kappa_n);
  mc->tangential = linear_law("tangential", LawRole::Tangential, mc->kappa_t);
  mc->thermal = linear_law("thermal", LawRole::Thermal, mc->kappa_th);

  System& sys = mc->system;
  sys.mesh = &mc->mesh;
  sys.material = &mc->material;
  sys.law_normal = &mc->normal;
  sys.law_tangential = &mc->tangential;
  sys.law_thermal = &mc->thermal;
  ManufacturedCase* c = mc.get();
  sys.load_mech = [c](double t) { return c->assemble_mech_load(t); };
  sys.load_heat = [c](double t) { return c->assemble_heat_load(t); };

  sys.u0 = Field::vector(mc->mesh);
  sys.v0 = Field::vector(mc->mesh);
  sys.theta0 = Field::scalar(mc->mesh);
  for (int v = 0; v < mc->mesh.n_vertices(); ++v) {
    const Eigen::Vector2d& x = mc->mesh.vertices[static_cast<size_t>(v)];
    const Eigen::Vector2d u0 = mc->exact_u(0.0, x);
    const Eigen::Vector2d v0 = mc->exact_v(0.0, x);
    sys.u0.values[2 * v] = u0.x();
    sys.u0.values[2 * v + 1] = u0.y();
    sys.v0.values[2 * v] = v0.x();
    sys.v0.values[2 * v + 1] = v0.y();
    sys.theta0.values[v] = mc->exact_theta(0.0, x);
  }
  sys.u0.apply_constraints();
  sys.v0.apply_constraints();
  sys.theta0.apply_constraints();

  sys.velocity_scale = std::abs(mc->alpha);
  sys.validate();
  return mc;
}

std::vector<ConvergenceRow> run_manufactured_convergence(
    const std::vector<std::pair<int, int>>& levels, double T, const CouplingConfig& cfg) {
  std::vector<ConvergenceRow> rows;
  for (const auto& [cells, steps] : levels) {
    auto mc = make_manufactured_case(cells);
    TimeGrid grid;
    grid.T = T;
    grid.n_steps = steps;
    const CoupledSolution sol = fixed_point_solve(mc->system, grid, cfg);
    if (!sol.report.converged) {
      std::ostringstream msg;
      msg << "manufactured study: coupling loop stalled at " << cells << " cells, " << steps
          << " steps (final distance " << sol.report.final_distance << ")";
      throw SolverError(msg.str());
    }
    ConvergenceRow row;
    row.cells = cells;
    row.steps = steps;
    row.h = 1.0 / cells;
    row.dt = T / steps;
    row.err_u = mc->error_u(sol.mech.u.back(), T);
    row.err_theta = mc->error_theta(sol.therm.theta.back(), T);
    row.fp_iterations = sol.report.total_iterations;
    rows.push_back(row);
  }
  return rows;
}

std::string format_convergence(const std::vector<ConvergenceRow>& rows) {
  std::ostringstream out;
  out << "cells [-],steps [-],h [m],dt [s],err_u [m],err_theta [K],order_u [-],order_theta "
         "[-],fp_iterations [-]\n";
  char buf[256];
  for (size_t i = 0; i < rows.size(); ++i) {
    const ConvergenceRow& r = rows[i];
    double order_u = 0.0, order_th = 0.0;
    if (i > 0 && r.err_u > 0.0 && rows[i - 1].err_u > 0.0)
      order_u = std::log2(rows[i - 1].err_u / r.err_u);
    if (i > 0 && r.err_theta > 0.0 && rows[i - 1].err_theta > 0.0)
      order_th = std::log2(rows[i - 1].err_theta / r.err_theta);
    std::snprintf(buf, sizeof buf, "%d,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d\n", r.cells,
                  r.steps, r.h, r.dt, r.err_u, r.err_theta, order_u, order_th, r.fp_iterations);
    out << buf;
  }
  return out.str();
}

}  // namespace hemicontact
