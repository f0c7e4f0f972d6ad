// SPDX-License-Identifier: MIT

#ifndef HEMICONTACT_MATERIAL_HPP
#define HEMICONTACT_MATERIAL_HPP

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <cstdint>
#include <string>
#include <vector>

#include "hemicontact/fem.hpp"
#include "hemicontact/mesh.hpp"
#include "hemicontact/nonsmooth.hpp"
#include "hemicontact/tensor.hpp"

namespace hemicontact {

// --------------------------------------------------------------------------
// Constitutive building blocks. Every law is an isotropic linear core with an
// optional monotone saturating augmentation, scaled by a scalar time
// modulation; that family keeps the hypothesis constants in closed form while
// still exercising the nonlinear code paths.
// --------------------------------------------------------------------------

// sigma(eps) = mod(t) * (two_mu * eps + lambda * tr(eps) I + sat * eps / sqrt(1 + |eps|^2))
struct TensorLaw {
  double two_mu = 0.0;
  double lambda = 0.0;
  double sat = 0.0;
  Modulation mod;

  SymTensor value(double t, const SymTensor& eps) const;
  SymTensor tangent(double t, const SymTensor& eps, const SymTensor& d_eps) const;
  bool linear() const { return sat == 0.0; }
  // Operator norm of the linear part (2D): max(|two_mu|, |two_mu + 2 lambda|).
  double linear_norm() const;
};

// K(xi) = mod(t) * (k * xi + sat * xi / sqrt(1 + |xi|^2))
struct ConductivityLaw {
  double k = 1.0;
  double sat = 0.0;
  Modulation mod;

  Eigen::Vector2d value(double t, const Eigen::Vector2d& xi) const;
  Eigen::Matrix2d tangent(double t, const Eigen::Vector2d& xi) const;
  bool linear() const { return sat == 0.0; }
};

// Ce(theta) = -mod(t) * c_exp * satur(theta) * I, satur = identity or
// sat_scale * tanh(theta / sat_scale).
struct ThermalExpansionLaw {
  double c_exp = 0.0;
  double sat_scale = 0.0;  // 0: linear
  Modulation mod;

  double scalar_value(double t, double theta) const;  // the coefficient of -I
  double scalar_slope(double t, double theta) const;
  SymTensor value(double t, double theta) const;
  bool linear() const { return sat_scale == 0.0; }
};

// R(v) = -mod(t) * c : eps(v), c symmetric. The symmetric c makes the
// pointwise bound |R| <= ||c||_F ||eps(v)||_F sharp, hence L_R = ||c||_F.
struct HeatCouplingLaw {
  SymTensor c = SymTensor::zero(2);
  Modulation mod;

  double value(double t, const SymTensor& strain) const;
};

// h(r) = mod(t) * lambda * r on r >= 0.
struct TangentialHeatingLaw {
  double lambda = 0.0;
  Modulation mod;

  double value(double t, double r) const { return mod(t) * lambda * r; }
};

struct MemoryTerm {
  double g = 0.0;        // coefficient on eps
  double tau = 1.0;      // relaxation time
  double lambda_c = 0.0;  // coefficient on tr(eps) I
};

// Declared hypothesis constants; derive_declared() fills them from the law
// parameters (worst case over the given time window) and callers may override
// before validation.
struct DeclaredConstants {
  double a0 = 0.0, a1 = 0.0, m_A = 0.0, alpha_A = 0.0;  // viscosity
  double b0 = 0.0, b1 = 0.0, L_B = 0.0;                 // elasticity
  double c0e = 0.0, c1e = 0.0, L_e = 0.0;               // thermal expansion
  double k0 = 0.0, k1 = 0.0, m_K = 0.0, alpha_K = 0.0;  // conductivity
  double L_R = 0.0;                                     // heat coupling
  double L_h = 0.0;                                     // tangential heating
};

struct MaterialModel {
  TensorLaw viscosity;    // rate part of the stress
  TensorLaw elasticity;   // displacement part
  std::vector<MemoryTerm> memory;
  ThermalExpansionLaw expansion;
  ConductivityLaw conductivity;
  HeatCouplingLaw heat_coupling;
  TangentialHeatingLaw heating;
  DeclaredConstants declared;

  // Closed-form constants, worst case over [t0, t1].
  void derive_declared(double t0, double t1);
  // Positivity of the constants the hypotheses require.
  void validate() const;

  // Kernel coefficient pair (on eps, on tr(eps) I) at the given lag.
  std::pair<double, double> eval_memory_kernel(double lag) const;
};

// --------------------------------------------------------------------------
// Empirical hypothesis audit. Samples are drawn across several magnitudes;
// every row compares the declared constant with the sampled extremum.
// --------------------------------------------------------------------------

struct HypothesisRow {
  std::string name;
  double claimed = 0.0;
  double empirical = 0.0;
  long samples = 0;
  bool pass = false;
  std::string note;
};

struct HypothesisReport {
  std::vector<HypothesisRow> rows;
  bool pass = true;
};

HypothesisReport check_hypotheses(const MaterialModel& model, long sample_count = 10000,
                                  std::uint64_t seed = 2024, double t0 = 0.0, double t1 = 1.0);

// --------------------------------------------------------------------------
// Variational residuals against the free-space basis, assembled element-wise.
// All kernels have serial and parallel paths (ExecMode).
// --------------------------------------------------------------------------

Eigen::VectorXd assemble_A(const Mesh& mesh, const TensorLaw& law, double t, const Field& w,
                           ExecMode mode = ExecMode::Auto);
SparseMat assemble_A_tangent(const Mesh& mesh, const TensorLaw& law, double t, const Field& w,
                             ExecMode mode = ExecMode::Auto);

// <C1(t, theta), v> = int Ce(t, theta) : eps(v)
Eigen::VectorXd assemble_C1(const Mesh& mesh, const ThermalExpansionLaw& law, double t,
                            const Field& theta, ExecMode mode = ExecMode::Auto);

// <C2(t, theta), z> = int K(t, grad theta) . grad z
Eigen::VectorXd assemble_C2(const Mesh& mesh, const ConductivityLaw& law, double t,
                            const Field& theta, ExecMode mode = ExecMode::Auto);
SparseMat assemble_C2_tangent(const Mesh& mesh, const ConductivityLaw& law, double t,
                              const Field& theta, ExecMode mode = ExecMode::Auto);

// <C3(t, v), z> = int R(t, v) z + int_{Gamma_C} h(t, |v_tau|) z
Eigen::VectorXd assemble_C3(const Mesh& mesh, const MaterialModel& model, double t,
                            const Field& velocity, ExecMode mode = ExecMode::Auto);

}  // namespace hemicontact

#endif
