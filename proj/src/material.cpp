// SPDX-License-Identifier: MIT

#include "hemicontact/material.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "hemicontact/runtime.hpp"

namespace hemicontact {

namespace {

constexpr double kSlack = 1e-9;

double saturating(double s) { return 1.0 / std::sqrt(1.0 + s * s); }

}  // namespace

SymTensor TensorLaw::value(double t, const SymTensor& eps) const {
  const double m = mod(t);
  SymTensor out = two_mu * eps;
  const double tr = eps.trace();
  for (int i = 0; i < eps.d; ++i) out.at(i, i) += lambda * tr;
  if (sat != 0.0) out += (sat * saturating(eps.norm())) * eps;
  return m * out;
}

SymTensor TensorLaw::tangent(double t, const SymTensor& eps, const SymTensor& d_eps) const {
  const double m = mod(t);
  SymTensor out = two_mu * d_eps;
  const double tr = d_eps.trace();
  for (int i = 0; i < eps.d; ++i) out.at(i, i) += lambda * tr;
  if (sat != 0.0) {
    const double s = std::sqrt(1.0 + ddot(eps, eps));
    out += (sat / s) * d_eps;
    out += (-sat * ddot(eps, d_eps) / (s * s * s)) * eps;
  }
  return m * out;
}

double TensorLaw::linear_norm() const {
  return std::max(std::abs(two_mu), std::abs(two_mu + 2.0 * lambda));
}

Eigen::Vector2d ConductivityLaw::value(double t, const Eigen::Vector2d& xi) const {
  Eigen::Vector2d out = k * xi;
  if (sat != 0.0) out += sat * saturating(xi.norm()) * xi;
  return mod(t) * out;
}

Eigen::Matrix2d ConductivityLaw::tangent(double t, const Eigen::Vector2d& xi) const {
  Eigen::Matrix2d out = k * Eigen::Matrix2d::Identity();
  if (sat != 0.0) {
    const double s = std::sqrt(1.0 + xi.squaredNorm());
    out += sat * (Eigen::Matrix2d::Identity() / s - xi * xi.transpose() / (s * s * s));
  }
  return mod(t) * out;
}

double ThermalExpansionLaw::scalar_value(double t, double theta) const {
  double s = sat_scale > 0.0 ? sat_scale * std::tanh(theta / sat_scale) : theta;
  return -mod(t) * c_exp * s;
}

double ThermalExpansionLaw::scalar_slope(double t, double theta) const {
  double ds = 1.0;
  if (sat_scale > 0.0) {
    double th = std::tanh(theta / sat_scale);
    ds = 1.0 - th * th;
  }
  return -mod(t) * c_exp * ds;
}

SymTensor ThermalExpansionLaw::value(double t, double theta) const {
  return scalar_value(t, theta) * SymTensor::identity(2);
}

double HeatCouplingLaw::value(double t, const SymTensor& strain) const {
  return -mod(t) * ddot(c, strain);
}

namespace {

// Worst-case scale of a constant c under a nonnegative modulation.
double worst_scale(double c, double mmin, double mmax) { return c >= 0.0 ? mmin * c : mmax * c; }

}  // namespace

void MaterialModel::derive_declared(double t0, double t1) {
  auto window = [&](const Modulation& m) {
    return std::pair<double, double>{m.min_on(t0, t1), m.max_on(t0, t1)};
  };

  {
    auto [lo, hi] = window(viscosity.mod);
    const double m_lin = std::min(viscosity.two_mu, viscosity.two_mu + 2.0 * viscosity.lambda);
    declared.a0 = hi * viscosity.sat;
    declared.a1 = hi * viscosity.linear_norm();
    declared.m_A = worst_scale(m_lin, lo, hi);
    declared.alpha_A = declared.m_A;
  }
  {
    auto [lo, hi] = window(elasticity.mod);
    (void)lo;
    declared.b0 = hi * elasticity.sat;
    declared.b1 = hi * elasticity.linear_norm();
    declared.L_B = hi * (elasticity.linear_norm() + elasticity.sat);
  }
  {
    auto [lo, hi] = window(expansion.mod);
    (void)lo;
    declared.c0e = 0.0;
    declared.c1e = hi * std::abs(expansion.c_exp) * std::sqrt(2.0);
    declared.L_e = declared.c1e;
  }
  {
    auto [lo, hi] = window(conductivity.mod);
    declared.k0 = hi * conductivity.sat;
    declared.k1 = hi * std::abs(conductivity.k);
    declared.m_K = worst_scale(conductivity.k, lo, hi);
    declared.alpha_K = declared.m_K;
  }
  {
    auto [lo, hi] = window(heat_coupling.mod);
    (void)lo;
    declared.L_R = hi * heat_coupling.c.norm();
  }
  {
    auto [lo, hi] = window(heating.mod);
    (void)lo;
    declared.L_h = hi * std::abs(heating.lambda);
  }
}

void MaterialModel::validate() const {
  if (!(declared.m_A > 0.0) || !(declared.alpha_A > 0.0))
    throw HypothesisError("material: viscosity monotonicity/coercivity constants must be positive");
  if (!(declared.m_K > 0.0) || !(declared.alpha_K > 0.0))
    throw HypothesisError("material: conductivity monotonicity/coercivity constants must be positive");
  if (declared.a1 < 0.0 || declared.b1 < 0.0 || declared.k1 < 0.0 || declared.L_B < 0.0 ||
      declared.L_e < 0.0 || declared.L_R < 0.0 || declared.L_h < 0.0)
    throw HypothesisError("material: growth and Lipschitz constants must be nonnegative");
  for (const auto& term : memory)
    if (!(term.tau > 0.0)) throw HypothesisError("material: memory relaxation times must be positive");
}

std::pair<double, double> MaterialModel::eval_memory_kernel(double lag) const {
  double a = 0.0, b = 0.0;
  for (const auto& term : memory) {
    const double e = std::exp(-lag / term.tau);
    a += term.g * e;
    b += term.lambda_c * e;
  }
  return {a, b};
}

// --------------------------------------------------------------------------
// Hypothesis audit
// --------------------------------------------------------------------------

namespace {

struct Sampler {
  std::mt19937_64 rng;
  std::normal_distribution<double> gauss{0.0, 1.0};
  std::uniform_real_distribution<double> unif{0.0, 1.0};

  // spreads magnitudes over [1e-2, 1e2]
  double radius() { return std::pow(10.0, -2.0 + 4.0 * unif(rng)); }

  SymTensor tensor() {
    const double r = radius();
    SymTensor e(2);
    e.at(0, 0) = r * gauss(rng);
    e.at(1, 1) = r * gauss(rng);
    e.at(0, 1) = e.at(1, 0) = r * gauss(rng);
    return e;
  }
  Eigen::Vector2d vec() {
    const double r = radius();
    return {r * gauss(rng), r * gauss(rng)};
  }
  double time(double t0, double t1) { return t0 + (t1 - t0) * unif(rng); }
};

HypothesisRow growth_row(const std::string& name, double violation, long n) {
  HypothesisRow r{name, 0.0, violation, n, violation <= kSlack, "max growth-bound violation"};
  return r;
}

}  // namespace

HypothesisReport check_hypotheses(const MaterialModel& model, long sample_count, std::uint64_t seed,
                                  double t0, double t1) {
  HypothesisReport rep;
  Sampler smp{make_rng(seed)};
  const long n = std::max<long>(sample_count, 10);
  const auto& d = model.declared;

  // Viscosity: growth, relaxed/strong monotonicity, coercivity.
  {
    double grow = -1e300, mono = 1e300, coer = 1e300;
    for (long i = 0; i < n; ++i) {
      const double t = smp.time(t0, t1);
      SymTensor e1 = smp.tensor(), e2 = smp.tensor();
      SymTensor s1 = model.viscosity.value(t, e1), s2 = model.viscosity.value(t, e2);
      grow = std::max(grow, s1.norm() - (d.a0 + d.a1 * e1.norm()));
      SymTensor de = e1 - e2;
      const double dn2 = ddot(de, de);
      if (dn2 > 1e-28) mono = std::min(mono, ddot(s1 - s2, de) / dn2);
      const double en2 = ddot(e1, e1);
      if (en2 > 1e-28) coer = std::min(coer, ddot(s1, e1) / en2);
    }
    rep.rows.push_back(growth_row("H(A) growth", grow, n));
    rep.rows.push_back({"H(A) strong monotonicity", d.m_A, mono, n,
                        mono >= d.m_A - kSlack * std::max(1.0, std::abs(d.m_A)), "min pair quotient"});
    rep.rows.push_back({"H(A) coercivity", d.alpha_A, coer, n,
                        coer >= d.alpha_A - kSlack * std::max(1.0, std::abs(d.alpha_A)),
                        "min Rayleigh quotient"});
  }

  // Elasticity: growth and Lipschitz.
  {
    double grow = -1e300, lip = -1e300;
    for (long i = 0; i < n; ++i) {
      const double t = smp.time(t0, t1);
      SymTensor e1 = smp.tensor(), e2 = smp.tensor();
      SymTensor s1 = model.elasticity.value(t, e1), s2 = model.elasticity.value(t, e2);
      grow = std::max(grow, s1.norm() - (d.b0 + d.b1 * e1.norm()));
      SymTensor de = e1 - e2;
      const double dn = de.norm();
      if (dn > 1e-14) lip = std::max(lip, (s1 - s2).norm() / dn);
    }
    rep.rows.push_back(growth_row("H(B) growth", grow, n));
    rep.rows.push_back({"H(B) Lipschitz", d.L_B, lip, n,
                        lip <= d.L_B + kSlack * std::max(1.0, d.L_B), "max pair quotient"});
  }

  // Memory kernel: full symmetry of the isotropic fourth-order action.
  {
    double asym = 0.0;
    const long nt = std::min<long>(n, 100);
    for (long i = 0; i < nt; ++i) {
      const double lag = (t1 - t0) * smp.unif(smp.rng);
      auto [a, b] = model.eval_memory_kernel(lag);
      double c[2][2][2][2];
      for (int ii = 0; ii < 2; ++ii)
        for (int j = 0; j < 2; ++j)
          for (int k = 0; k < 2; ++k)
            for (int l = 0; l < 2; ++l)
              c[ii][j][k][l] = 0.5 * a * ((ii == k) * (j == l) + (ii == l) * (j == k)) +
                               b * (ii == j) * (k == l);
      for (int ii = 0; ii < 2; ++ii)
        for (int j = 0; j < 2; ++j)
          for (int k = 0; k < 2; ++k)
            for (int l = 0; l < 2; ++l) {
              asym = std::max(asym, std::abs(c[ii][j][k][l] - c[j][ii][k][l]));
              asym = std::max(asym, std::abs(c[ii][j][k][l] - c[l][k][ii][j]));
            }
    }
    rep.rows.push_back({"H(C) kernel symmetry", 0.0, asym, nt, asym <= 1e-14, "max |c_ijkl asymmetry|"});
  }

  // Thermal expansion: growth and Lipschitz in theta.
  {
    double grow = -1e300, lip = -1e300;
    for (long i = 0; i < n; ++i) {
      const double t = smp.time(t0, t1);
      const double th1 = smp.radius() * smp.gauss(smp.rng), th2 = smp.radius() * smp.gauss(smp.rng);
      SymTensor s1 = model.expansion.value(t, th1), s2 = model.expansion.value(t, th2);
      grow = std::max(grow, s1.norm() - (d.c0e + d.c1e * std::abs(th1)));
      if (std::abs(th1 - th2) > 1e-14)
        lip = std::max(lip, (s1 - s2).norm() / std::abs(th1 - th2));
    }
    rep.rows.push_back(growth_row("H(Ce) growth", grow, n));
    rep.rows.push_back({"H(Ce) Lipschitz", d.L_e, lip, n,
                        lip <= d.L_e + kSlack * std::max(1.0, d.L_e), "max pair quotient"});
  }

  // Conductivity: growth, strong monotonicity, coercivity.
  {
    double grow = -1e300, mono = 1e300, coer = 1e300;
    for (long i = 0; i < n; ++i) {
      const double t = smp.time(t0, t1);
      Eigen::Vector2d x1 = smp.vec(), x2 = smp.vec();
      Eigen::Vector2d q1 = model.conductivity.value(t, x1), q2 = model.conductivity.value(t, x2);
      grow = std::max(grow, q1.norm() - (d.k0 + d.k1 * x1.norm()));
      const double dn2 = (x1 - x2).squaredNorm();
      if (dn2 > 1e-28) mono = std::min(mono, (q1 - q2).dot(x1 - x2) / dn2);
      const double xn2 = x1.squaredNorm();
      if (xn2 > 1e-28) coer = std::min(coer, q1.dot(x1) / xn2);
    }
    rep.rows.push_back(growth_row("H(K) growth", grow, n));
    rep.rows.push_back({"H(K) strong monotonicity", d.m_K, mono, n,
                        mono >= d.m_K - kSlack * std::max(1.0, std::abs(d.m_K)), "min pair quotient"});
    rep.rows.push_back({"H(K) coercivity", d.alpha_K, coer, n,
                        coer >= d.alpha_K - kSlack * std::max(1.0, std::abs(d.alpha_K)),
                        "min Rayleigh quotient"});
  }

  // Heat coupling: pointwise Lipschitz bound in the strain.
  {
    double lip = -1e300;
    for (long i = 0; i < n; ++i) {
      const double t = smp.time(t0, t1);
      SymTensor e1 = smp.tensor(), e2 = smp.tensor();
      const double dn = (e1 - e2).norm();
      if (dn > 1e-14)
        lip = std::max(lip,
                       std::abs(model.heat_coupling.value(t, e1) - model.heat_coupling.value(t, e2)) / dn);
    }
    rep.rows.push_back({"H(R) Lipschitz", d.L_R, lip, n,
                        lip <= d.L_R + kSlack * std::max(1.0, d.L_R), "max pair quotient"});
  }

  // Tangential heating: Lipschitz on r >= 0.
  {
    double lip = -1e300;
    for (long i = 0; i < n; ++i) {
      const double t = smp.time(t0, t1);
      const double r1 = std::abs(smp.radius() * smp.gauss(smp.rng));
      const double r2 = std::abs(smp.radius() * smp.gauss(smp.rng));
      if (std::abs(r1 - r2) > 1e-14)
        lip = std::max(lip, std::abs(model.heating.value(t, r1) - model.heating.value(t, r2)) /
                                std::abs(r1 - r2));
    }
    rep.rows.push_back({"H(h) Lipschitz", d.L_h, lip, n,
                        lip <= d.L_h + kSlack * std::max(1.0, d.L_h), "max pair quotient"});
  }

  for (const auto& r : rep.rows) rep.pass = rep.pass && r.pass;
  return rep;
}

// --------------------------------------------------------------------------
// Residual assembly
// --------------------------------------------------------------------------

namespace {

using Triplet = Eigen::Triplet<double>;

template <class EmitFn>
SparseMat assemble_triplets_parallel(int n_items, int n, ExecMode mode, EmitFn&& emit) {
  const int nw = effective_workers(mode);
  std::vector<Triplet> triplets;
  if (nw <= 1 || n_items < 2) {
    for (int i = 0; i < n_items; ++i) emit(i, triplets);
  } else {
    std::vector<std::vector<Triplet>> bufs(static_cast<size_t>(nw));
#pragma omp parallel num_threads(nw)
    {
      int tid = 0;
#ifdef _OPENMP
      tid = omp_get_thread_num();
#endif
      auto& local = bufs[static_cast<size_t>(tid)];
#pragma omp for schedule(static)
      for (int i = 0; i < n_items; ++i) emit(i, local);
    }
    for (auto& b : bufs) triplets.insert(triplets.end(), b.begin(), b.end());
  }
  SparseMat M(n, n);
  M.setFromTriplets(triplets.begin(), triplets.end());
  M.makeCompressed();
  return M;
}

SymTensor basis_strain(const Eigen::Vector2d& g, int comp) {
  VectorValue e(2);
  e[comp] = 1.0;
  return SymTensor::sym_outer(e, VectorValue(g.x(), g.y()));
}

}  // namespace

Eigen::VectorXd assemble_A(const Mesh& mesh, const TensorLaw& law, double t, const Field& w,
                           ExecMode mode) {
  return accumulate_elementwise(mesh.n_triangles(), mesh.n_vec_dofs, mode,
                                [&](int tri, Eigen::VectorXd& buf) {
    const SymTensor sig = law.value(t, element_strain(mesh, tri, w));
    const auto& tv = mesh.triangles[tri];
    const auto& G = mesh.tri_grad[tri];
    const double area = mesh.tri_area[tri];
    for (int k = 0; k < 3; ++k) {
      const Eigen::Vector2d g = G.col(k);
      for (int a = 0; a < 2; ++a) {
        const int dof = mesh.vec_dof[2 * tv[k] + a];
        if (dof >= 0) buf[dof] += area * (sig.at(a, 0) * g.x() + sig.at(a, 1) * g.y());
      }
    }
  });
}

SparseMat assemble_A_tangent(const Mesh& mesh, const TensorLaw& law, double t, const Field& w,
                             ExecMode mode) {
  return assemble_triplets_parallel(mesh.n_triangles(), mesh.n_vec_dofs, mode,
                                    [&](int tri, std::vector<Triplet>& out) {
    const SymTensor eps = element_strain(mesh, tri, w);
    const auto& tv = mesh.triangles[tri];
    const auto& G = mesh.tri_grad[tri];
    const double area = mesh.tri_area[tri];
    for (int l = 0; l < 3; ++l)
      for (int b = 0; b < 2; ++b) {
        const int col = mesh.vec_dof[2 * tv[l] + b];
        if (col < 0) continue;
        const SymTensor ds = law.tangent(t, eps, basis_strain(G.col(l), b));
        for (int k = 0; k < 3; ++k) {
          const Eigen::Vector2d g = G.col(k);
          for (int a = 0; a < 2; ++a) {
            const int row = mesh.vec_dof[2 * tv[k] + a];
            if (row >= 0)
              out.emplace_back(row, col, area * (ds.at(a, 0) * g.x() + ds.at(a, 1) * g.y()));
          }
        }
      }
  });
}

Eigen::VectorXd assemble_C1(const Mesh& mesh, const ThermalExpansionLaw& law, double t,
                            const Field& theta, ExecMode mode) {
  return accumulate_elementwise(mesh.n_triangles(), mesh.n_vec_dofs, mode,
                                [&](int tri, Eigen::VectorXd& buf) {
    const auto& tv = mesh.triangles[tri];
    const auto& G = mesh.tri_grad[tri];
    const double area = mesh.tri_area[tri];
    const double th0 = theta.values[tv[0]], th1 = theta.values[tv[1]], th2 = theta.values[tv[2]];
    double coeff_int;  // int_T of the coefficient of I
    if (law.linear()) {
      coeff_int = area * law.scalar_value(t, (th0 + th1 + th2) / 3.0);
    } else {
      // edge-midpoint rule, exact to degree 2
      coeff_int = area / 3.0 *
                  (law.scalar_value(t, 0.5 * (th0 + th1)) + law.scalar_value(t, 0.5 * (th1 + th2)) +
                   law.scalar_value(t, 0.5 * (th2 + th0)));
    }
    for (int k = 0; k < 3; ++k)
      for (int a = 0; a < 2; ++a) {
        const int dof = mesh.vec_dof[2 * tv[k] + a];
        if (dof >= 0) buf[dof] += coeff_int * G(a, k);
      }
  });
}

Eigen::VectorXd assemble_C2(const Mesh& mesh, const ConductivityLaw& law, double t,
                            const Field& theta, ExecMode mode) {
  return accumulate_elementwise(mesh.n_triangles(), mesh.n_scal_dofs, mode,
                                [&](int tri, Eigen::VectorXd& buf) {
    const Eigen::Vector2d q = law.value(t, element_gradient(mesh, tri, theta));
    const auto& tv = mesh.triangles[tri];
    const auto& G = mesh.tri_grad[tri];
    const double area = mesh.tri_area[tri];
    for (int k = 0; k < 3; ++k) {
      const int dof = mesh.scal_dof[tv[k]];
      if (dof >= 0) buf[dof] += area * q.dot(G.col(k));
    }
  });
}

SparseMat assemble_C2_tangent(const Mesh& mesh, const ConductivityLaw& law, double t,
                              const Field& theta, ExecMode mode) {
  return assemble_triplets_parallel(mesh.n_triangles(), mesh.n_scal_dofs, mode,
                                    [&](int tri, std::vector<Triplet>& out) {
    const Eigen::Matrix2d J = law.tangent(t, element_gradient(mesh, tri, theta));
    const auto& tv = mesh.triangles[tri];
    const auto& G = mesh.tri_grad[tri];
    const double area = mesh.tri_area[tri];
    for (int k = 0; k < 3; ++k) {
      const int row = mesh.scal_dof[tv[k]];
      if (row < 0) continue;
      for (int l = 0; l < 3; ++l) {
        const int col = mesh.scal_dof[tv[l]];
        if (col >= 0) out.emplace_back(row, col, area * G.col(k).dot(J * G.col(l)));
      }
    }
  });
}

Eigen::VectorXd assemble_C3(const Mesh& mesh, const MaterialModel& model, double t,
                            const Field& velocity, ExecMode mode) {
  Eigen::VectorXd out = accumulate_elementwise(mesh.n_triangles(), mesh.n_scal_dofs, mode,
                                               [&](int tri, Eigen::VectorXd& buf) {
    const double r = model.heat_coupling.value(t, element_strain(mesh, tri, velocity));
    const auto& tv = mesh.triangles[tri];
    const double w = mesh.tri_area[tri] / 3.0;
    for (int k = 0; k < 3; ++k) {
      const int dof = mesh.scal_dof[tv[k]];
      if (dof >= 0) buf[dof] += w * r;
    }
  });
  // Frictional heating on the contact boundary, lumped edge quadrature.
  for (size_t i = 0; i < mesh.contact_vertices.size(); ++i) {
    const int v = mesh.contact_vertices[i];
    const int dof = mesh.scal_dof[v];
    if (dof < 0) continue;
    const Eigen::Vector2d nu = mesh.contact_normal[i];
    const Eigen::Vector2d vel(velocity.values[2 * v], velocity.values[2 * v + 1]);
    const Eigen::Vector2d vtau = vel - vel.dot(nu) * nu;
    out[dof] += mesh.contact_weight[i] * model.heating.value(t, vtau.norm());
  }
  return out;
}

}  // namespace hemicontact
