// SPDX-License-Identifier: MIT

#include "hemicontact/hvi.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hemicontact/fem.hpp"
#include "hemicontact/runtime.hpp"

namespace hemicontact {

void TimeGrid::validate() const {
  if (n_steps < 1) throw ValidationError("time grid: n_steps must be >= 1");
  if (!(T > 0.0)) throw ValidationError("time grid: final time must be positive");
}

void System::validate() const {
  if (!mesh || !mesh->finalized) throw ValidationError("system: mesh missing or not finalized");
  if (!material) throw ValidationError("system: material model missing");
  if (u0.values.size() != 2 * mesh->n_vertices() || v0.values.size() != 2 * mesh->n_vertices() ||
      theta0.values.size() != mesh->n_vertices())
    throw ValidationError("system: initial field sizes do not match the mesh");
  if (u0.max_constraint_violation() > 0.0 || v0.max_constraint_violation() > 0.0)
    throw ValidationError("system: initial displacement/velocity must vanish on the clamped boundary");
  if (!(epsilon_normal > 0.0) || !(epsilon_tangential > 0.0) || !(epsilon_thermal > 0.0))
    throw ValidationError("system: regularization widths must be positive");
}

int MechTrajectory::total_newton_iterations() const {
  int n = 0;
  for (const auto& s : stats) n += s.newton_iterations;
  return n;
}

int ThermTrajectory::total_newton_iterations() const {
  int n = 0;
  for (const auto& s : stats) n += s.newton_iterations;
  return n;
}

namespace {

using Triplet = Eigen::Triplet<double>;

// Regularized contact tractions lumped at the contact vertices. The normal
// law acts on v.nu, the tangential law isotropically on the tangential
// component; both smoothed with width eps.
struct ContactAssembler {
  const Mesh* mesh = nullptr;
  const BoundaryLaw* normal = nullptr;
  const BoundaryLaw* tangential = nullptr;
  double eps_n = 1e-6;
  double eps_t = 1e-6;

  // Continuation widens both smoothing widths onto a common coarse level.
  ContactAssembler widened(double cur) const {
    ContactAssembler c = *this;
    c.eps_n = std::max(eps_n, cur);
    c.eps_t = std::max(eps_t, cur);
    return c;
  }
  double max_width() const { return std::max(normal ? eps_n : 0.0, tangential ? eps_t : 0.0); }

  void add_residual(double t, const Field& vel, Eigen::VectorXd& r) const {
    if (!normal && !tangential) return;
    const RegularizedDensity bn(normal ? &normal->density : nullptr, eps_n);
    const RegularizedDensity bt(tangential ? &tangential->density : nullptr, eps_t);
    const double mn = normal ? normal->mod(t) : 0.0;
    const double mt = tangential ? tangential->mod(t) : 0.0;
    for (size_t i = 0; i < mesh->contact_vertices.size(); ++i) {
      const int vtx = mesh->contact_vertices[i];
      const double w = mesh->contact_weight[i];
      const Eigen::Vector2d nu = mesh->contact_normal[i];
      const Eigen::Vector2d tau(-nu.y(), nu.x());
      const Eigen::Vector2d vv(vel.values[2 * vtx], vel.values[2 * vtx + 1]);
      Eigen::Vector2d trac = Eigen::Vector2d::Zero();
      if (normal) trac += mn * bn.value(vv.dot(nu)) * nu;
      if (tangential) {
        const double rho = vv.dot(tau);
        const double s = std::sqrt(rho * rho + eps_t * eps_t);
        trac += mt * bt.value(std::abs(rho)) * rho / s * tau;
      }
      for (int a = 0; a < 2; ++a) {
        const int dof = mesh->vec_dof[2 * vtx + a];
        if (dof >= 0) r[dof] += w * trac[a];
      }
    }
  }

  void add_jacobian(double t, const Field& vel, std::vector<Triplet>& out) const {
    if (!normal && !tangential) return;
    const RegularizedDensity bn(normal ? &normal->density : nullptr, eps_n);
    const RegularizedDensity bt(tangential ? &tangential->density : nullptr, eps_t);
    const double mn = normal ? normal->mod(t) : 0.0;
    const double mt = tangential ? tangential->mod(t) : 0.0;
    for (size_t i = 0; i < mesh->contact_vertices.size(); ++i) {
      const int vtx = mesh->contact_vertices[i];
      const double w = mesh->contact_weight[i];
      const Eigen::Vector2d nu = mesh->contact_normal[i];
      const Eigen::Vector2d tau(-nu.y(), nu.x());
      const Eigen::Vector2d vv(vel.values[2 * vtx], vel.values[2 * vtx + 1]);
      Eigen::Matrix2d block = Eigen::Matrix2d::Zero();
      if (normal) block += mn * bn.slope(vv.dot(nu)) * nu * nu.transpose();
      if (tangential) {
        const double rho = vv.dot(tau);
        const double ar = std::abs(rho);
        const double s = std::sqrt(rho * rho + eps_t * eps_t);
        const double dq = mt * (bt.slope(ar) * ar / s + bt.value(ar) * eps_t * eps_t / (s * s * s));
        block += dq * tau * tau.transpose();
      }
      for (int a = 0; a < 2; ++a) {
        const int row = mesh->vec_dof[2 * vtx + a];
        if (row < 0) continue;
        for (int b = 0; b < 2; ++b) {
          const int col = mesh->vec_dof[2 * vtx + b];
          if (col >= 0) out.emplace_back(row, col, w * block(a, b));
        }
      }
    }
  }

  double power(double t, const Field& vel) const {
    if (!normal && !tangential) return 0.0;
    const RegularizedDensity bn(normal ? &normal->density : nullptr, eps_n);
    const RegularizedDensity bt(tangential ? &tangential->density : nullptr, eps_t);
    double p = 0.0;
    for (size_t i = 0; i < mesh->contact_vertices.size(); ++i) {
      const int vtx = mesh->contact_vertices[i];
      const double w = mesh->contact_weight[i];
      const Eigen::Vector2d nu = mesh->contact_normal[i];
      const Eigen::Vector2d tau(-nu.y(), nu.x());
      const Eigen::Vector2d vv(vel.values[2 * vtx], vel.values[2 * vtx + 1]);
      if (normal) {
        const double vn = vv.dot(nu);
        p += w * normal->mod(t) * bn.value(vn) * vn;
      }
      if (tangential) {
        const double rho = vv.dot(tau);
        const double s = std::sqrt(rho * rho + eps_t * eps_t);
        p += w * tangential->mod(t) * bt.value(std::abs(rho)) * rho / s * rho;
      }
    }
    return p;
  }
};

// Thermal boundary residual on the contact part, lumped like the mechanical
// tractions; the law acts pointwise on the temperature trace.
struct ThermalBoundaryAssembler {
  const Mesh* mesh = nullptr;
  const BoundaryLaw* law = nullptr;
  double eps = 1e-6;

  void add_residual(double t, const Field& th, Eigen::VectorXd& r) const {
    if (!law) return;
    const RegularizedDensity b(&law->density, eps);
    const double m = law->mod(t);
    for (size_t i = 0; i < mesh->contact_vertices.size(); ++i) {
      const int vtx = mesh->contact_vertices[i];
      const int dof = mesh->scal_dof[vtx];
      if (dof >= 0) r[dof] += mesh->contact_weight[i] * m * b.value(th.values[vtx]);
    }
  }

  void add_jacobian(double t, const Field& th, std::vector<Triplet>& out) const {
    if (!law) return;
    const RegularizedDensity b(&law->density, eps);
    const double m = law->mod(t);
    for (size_t i = 0; i < mesh->contact_vertices.size(); ++i) {
      const int vtx = mesh->contact_vertices[i];
      const int dof = mesh->scal_dof[vtx];
      if (dof >= 0) out.emplace_back(dof, dof, mesh->contact_weight[i] * m * b.slope(th.values[vtx]));
    }
  }
};

SparseMat with_extra_triplets(SparseMat base, const std::vector<Triplet>& extra) {
  if (extra.empty()) return base;
  SparseMat add(base.rows(), base.cols());
  add.setFromTriplets(extra.begin(), extra.end());
  return base + add;
}

// Runs Newton at the law floors (widening level 0); on failure restarts from
// a coarse common width and anneals down onto the floors. attempt(level)
// must solve in place and report convergence.
template <class AttemptFn>
bool continuation(const System& sys, double min_floor, AttemptFn&& attempt,
                  const std::function<void()>& reset) {
  if (attempt(0.0)) return true;
  reset();
  const double start = sys.epsilon_start_scale * std::max(sys.velocity_scale, 1e-12);
  for (double cur = start; cur > min_floor * 1.000001; cur *= 0.1) attempt(cur);
  return attempt(0.0);
}

}  // namespace

MechTrajectory solve_P1(const System& sys, const TimeGrid& grid, const DualTrajectory* eta) {
  grid.validate();
  sys.validate();
  const Mesh& mesh = *sys.mesh;
  const int nf = mesh.n_vec_dofs;
  if (eta) {
    if (static_cast<int>(eta->size()) != grid.n_nodes())
      throw ValidationError("coupling state does not match the time grid");
    for (const auto& e : *eta)
      if (e.size() != nf) throw ValidationError("coupling state does not match the displacement space");
  }

  const SparseMat M_free = restrict_form_vector(mesh, assemble_form(FormKind::Mass, mesh));
  ContactAssembler contact{&mesh, sys.law_normal, sys.law_tangential, sys.epsilon_normal,
                           sys.epsilon_tangential};
  const double dt = grid.dt();

  MechTrajectory traj;
  traj.grid = grid;
  traj.u.reserve(grid.n_nodes());
  traj.v.reserve(grid.n_nodes());
  traj.u.push_back(sys.u0);
  traj.v.push_back(sys.v0);
  traj.dissipation.assign(grid.n_nodes(), 0.0);

  Eigen::VectorXd x_u = free_coords_vector(mesh, sys.u0);
  Eigen::VectorXd x_v = free_coords_vector(mesh, sys.v0);
  Field v_work = Field::vector(mesh);

  for (int n = 0; n < grid.n_steps; ++n) {
    const double t = grid.time(n + 1);
    Eigen::VectorXd f = sys.load_mech ? sys.load_mech(t) : Eigen::VectorXd::Zero(nf);
    if (f.size() != nf) throw ValidationError("mechanical load vector has the wrong size");
    if (eta) f -= (*eta)[static_cast<size_t>(n + 1)];
    const Eigen::VectorXd x_v_prev = x_v;

    StepSolveStats step;
    auto attempt = [&](double level) {
      const ContactAssembler ca = contact.widened(level);
      auto residual = [&](const Eigen::VectorXd& x) {
        set_free_coords_vector(mesh, x, v_work);
        Eigen::VectorXd r = M_free * ((x - x_v_prev) / dt);
        r += assemble_A(mesh, sys.material->viscosity, t, v_work);
        ca.add_residual(t, v_work, r);
        r -= f;
        return r;
      };
      auto jacobian = [&](const Eigen::VectorXd& x) {
        set_free_coords_vector(mesh, x, v_work);
        SparseMat J = assemble_A_tangent(mesh, sys.material->viscosity, t, v_work);
        J = SparseMat(J + (1.0 / dt) * M_free);
        std::vector<Triplet> trips;
        ca.add_jacobian(t, v_work, trips);
        return with_extra_triplets(std::move(J), trips);
      };
      NewtonStats ns = newton_solve(residual, jacobian, x_v, sys.newton);
      step.newton_iterations += ns.iterations;
      step.residual_norm = ns.residual_norm;
      step.regularization_epsilon_used = ca.max_width();
      return ns.converged;
    };
    const double min_floor = std::min(sys.epsilon_normal, sys.epsilon_tangential);
    step.converged = continuation(sys, min_floor, attempt, [&] { x_v = x_v_prev; });
    if (!step.converged)
      throw SolverError("mechanical step " + std::to_string(n + 1) + " (t=" + std::to_string(t) +
                        "): Newton did not converge, residual " + std::to_string(step.residual_norm));

    x_u += dt * x_v;
    Field u_next = Field::vector(mesh);
    Field v_next = Field::vector(mesh);
    set_free_coords_vector(mesh, x_u, u_next);
    set_free_coords_vector(mesh, x_v, v_next);
    traj.dissipation[static_cast<size_t>(n + 1)] = dt * contact.power(t, v_next);
    traj.u.push_back(std::move(u_next));
    traj.v.push_back(std::move(v_next));
    traj.stats.push_back(step);
  }
  return traj;
}

ThermTrajectory solve_P2(const System& sys, const TimeGrid& grid, const MechTrajectory& mech) {
  grid.validate();
  sys.validate();
  if (!mech.grid.same_as(grid) || static_cast<int>(mech.v.size()) != grid.n_nodes())
    throw ValidationError("velocity trajectory does not match the time grid");
  const Mesh& mesh = *sys.mesh;
  const int nf = mesh.n_scal_dofs;

  const SparseMat M_free = restrict_form_scalar(mesh, assemble_form(FormKind::MassScalar, mesh));
  ThermalBoundaryAssembler boundary{&mesh, sys.law_thermal, sys.epsilon_thermal};
  const double dt = grid.dt();

  ThermTrajectory traj;
  traj.grid = grid;
  traj.theta.reserve(grid.n_nodes());
  traj.theta.push_back(sys.theta0);

  Eigen::VectorXd x = free_coords_scalar(mesh, sys.theta0);
  Field th_work = Field::scalar(mesh);

  for (int n = 0; n < grid.n_steps; ++n) {
    const double t = grid.time(n + 1);
    Eigen::VectorXd rhs = assemble_C3(mesh, *sys.material, t, mech.v[static_cast<size_t>(n + 1)]);
    if (sys.load_heat) {
      Eigen::VectorXd g = sys.load_heat(t);
      if (g.size() != nf) throw ValidationError("heat load vector has the wrong size");
      rhs += g;
    }
    const Eigen::VectorXd x_prev = x;

    StepSolveStats step;
    auto attempt = [&](double level) {
      ThermalBoundaryAssembler ba = boundary;
      ba.eps = std::max(boundary.eps, level);
      auto residual = [&](const Eigen::VectorXd& y) {
        set_free_coords_scalar(mesh, y, th_work);
        Eigen::VectorXd r = M_free * ((y - x_prev) / dt);
        r += assemble_C2(mesh, sys.material->conductivity, t, th_work);
        ba.add_residual(t, th_work, r);
        r -= rhs;
        return r;
      };
      auto jacobian = [&](const Eigen::VectorXd& y) {
        set_free_coords_scalar(mesh, y, th_work);
        SparseMat J = assemble_C2_tangent(mesh, sys.material->conductivity, t, th_work);
        J = SparseMat(J + (1.0 / dt) * M_free);
        std::vector<Triplet> trips;
        ba.add_jacobian(t, th_work, trips);
        return with_extra_triplets(std::move(J), trips);
      };
      NewtonStats ns = newton_solve(residual, jacobian, x, sys.newton);
      step.newton_iterations += ns.iterations;
      step.residual_norm = ns.residual_norm;
      step.regularization_epsilon_used = ba.eps;
      return ns.converged;
    };
    step.converged = continuation(sys, sys.epsilon_thermal, attempt, [&] { x = x_prev; });
    if (!step.converged)
      throw SolverError("thermal step " + std::to_string(n + 1) + " (t=" + std::to_string(t) +
                        "): Newton did not converge, residual " + std::to_string(step.residual_norm));

    Field th_next = Field::scalar(mesh);
    set_free_coords_scalar(mesh, x, th_next);
    traj.theta.push_back(std::move(th_next));
    traj.stats.push_back(step);
  }
  return traj;
}

double elastic_potential(const TensorLaw& law, double t, const Field& u) {
  const Mesh& mesh = *u.mesh;
  double phi = 0.0;
  for (int tri = 0; tri < mesh.n_triangles(); ++tri) {
    const SymTensor eps = element_strain(mesh, tri, u);
    const double tr = eps.trace();
    double dens = 0.5 * law.two_mu * ddot(eps, eps) + 0.5 * law.lambda * tr * tr;
    if (law.sat != 0.0) dens += law.sat * (std::sqrt(1.0 + ddot(eps, eps)) - 1.0);
    phi += mesh.tri_area[tri] * dens;
  }
  return law.mod(t) * phi;
}

double mechanical_energy(const System& sys, double t, const Field& u, const Field& v) {
  const double vn = l2_norm(v);
  return 0.5 * vn * vn + elastic_potential(sys.material->elasticity, t, u);
}

double contact_power(const System& sys, double t, const Field& v) {
  ContactAssembler contact{sys.mesh, sys.law_normal, sys.law_tangential,
                           sys.epsilon_normal, sys.epsilon_tangential};
  return contact.power(t, v);
}

}  // namespace hemicontact
