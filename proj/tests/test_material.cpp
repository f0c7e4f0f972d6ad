// SPDX-License-Identifier: MIT

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "hemicontact/material.hpp"
#include "hemicontact/mesh.hpp"
#include "hemicontact/runtime.hpp"

using namespace hemicontact;

namespace {

MaterialModel reference_material() {
  MaterialModel m;
  m.viscosity.two_mu = 2.0;
  m.viscosity.lambda = 1.0;
  m.elasticity.two_mu = 0.8;
  m.elasticity.lambda = 0.4;
  m.memory.push_back({0.2, 1.0, 0.1});
  m.expansion.c_exp = 0.3;
  m.conductivity.k = 1.0;
  m.heat_coupling.c.at(0, 0) = 0.3;
  m.heat_coupling.c.at(1, 1) = 0.3;
  m.heating.lambda = 0.4;
  m.derive_declared(0.0, 1.0);
  return m;
}

Mesh small_square() {
  return make_unit_square_mesh(2);
}

SymTensor tensor2(double a, double b, double c) {
  SymTensor t(2);
  t.at(0, 0) = a;
  t.at(0, 1) = t.at(1, 0) = b;
  t.at(1, 1) = c;
  return t;
}

}  // namespace

TEST_CASE("linear tensor law reproduces the isotropic formula") {
  TensorLaw law;
  law.two_mu = 2.0;
  law.lambda = 0.5;
  SymTensor eps = tensor2(1.0, 0.3, -2.0);
  SymTensor sig = law.value(0.0, eps);
  // sigma = 2 mu eps + lambda tr(eps) I
  CHECK(sig(0, 0) == doctest::Approx(2.0 * 1.0 + 0.5 * (-1.0)).epsilon(1e-14));
  CHECK(sig(0, 1) == doctest::Approx(0.6).epsilon(1e-14));
  CHECK(sig(1, 1) == doctest::Approx(-4.0 - 0.5).epsilon(1e-14));
  CHECK(law.linear());
  CHECK(law.linear_norm() == doctest::Approx(3.0));  // max(2, 2 + 2*0.5)
}

TEST_CASE("saturating tangent matches finite differences") {
  TensorLaw law;
  law.two_mu = 1.5;
  law.lambda = 0.7;
  law.sat = 0.4;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int rep = 0; rep < 20; ++rep) {
    SymTensor eps = tensor2(U(rng), U(rng), U(rng));
    SymTensor d = tensor2(U(rng), U(rng), U(rng));
    const double h = 1e-6;
    SymTensor plus = law.value(0.0, eps + h * d);
    SymTensor minus = law.value(0.0, eps - h * d);
    SymTensor fd = (1.0 / (2.0 * h)) * (plus - minus);
    SymTensor tan = law.tangent(0.0, eps, d);
    CHECK((tan - fd).norm() <= 1e-7 * (1.0 + fd.norm()));
  }
}

TEST_CASE("conductivity tangent matches finite differences") {
  ConductivityLaw law;
  law.k = 1.2;
  law.sat = 0.5;
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> U(-2.0, 2.0);
  for (int rep = 0; rep < 20; ++rep) {
    Eigen::Vector2d xi(U(rng), U(rng));
    Eigen::Vector2d d(U(rng), U(rng));
    const double h = 1e-6;
    Eigen::Vector2d fd = (law.value(0.0, xi + h * d) - law.value(0.0, xi - h * d)) / (2.0 * h);
    Eigen::Vector2d tan = law.tangent(0.0, xi) * d;
    CHECK((tan - fd).norm() <= 1e-7 * (1.0 + fd.norm()));
  }
}

TEST_CASE("memory kernel sums exponential terms") {
  MaterialModel m;
  m.memory.push_back({0.2, 1.0, 0.1});
  m.memory.push_back({0.05, 0.5, 0.0});
  auto [a, b] = m.eval_memory_kernel(0.7);
  CHECK(a == doctest::Approx(0.2 * std::exp(-0.7) + 0.05 * std::exp(-1.4)).epsilon(1e-14));
  CHECK(b == doctest::Approx(0.1 * std::exp(-0.7)).epsilon(1e-14));
}

TEST_CASE("derived constants fold the modulation window") {
  MaterialModel m = reference_material();
  CHECK(m.declared.m_A == doctest::Approx(2.0));
  CHECK(m.declared.alpha_A == doctest::Approx(2.0));
  CHECK(m.declared.m_K == doctest::Approx(1.0));
  CHECK(m.declared.L_e == doctest::Approx(0.3 * std::sqrt(2.0)).epsilon(1e-14));
  CHECK(m.declared.L_R == doctest::Approx(m.heat_coupling.c.norm()).epsilon(1e-14));
  CHECK(m.declared.L_h == doctest::Approx(0.4));

  // A dipping modulation drags the monotonicity constant down with it.
  m.viscosity.mod = Modulation({{0.0, 1.0}, {1.0, 0.5}});
  m.derive_declared(0.0, 1.0);
  CHECK(m.declared.m_A == doctest::Approx(1.0));  // min 0.5 * m_lin 2
  m.derive_declared(0.0, 0.0);
  CHECK(m.declared.m_A == doctest::Approx(2.0));
}

TEST_CASE("hypothesis audit passes an honest material and fails an inflated claim") {
  MaterialModel honest = reference_material();
  HypothesisReport rep = check_hypotheses(honest, 2000, 42);
  CHECK(rep.pass);
  for (const auto& row : rep.rows) CHECK(row.pass);

  // Claiming stronger monotonicity than the law has must be caught.
  MaterialModel inflated = reference_material();
  inflated.declared.m_A = 5.0;
  HypothesisReport bad = check_hypotheses(inflated, 2000, 42);
  CHECK_FALSE(bad.pass);

  // Underdeclared Lipschitz bound on the elasticity is caught as well.
  MaterialModel lips = reference_material();
  lips.declared.L_B = 0.5 * lips.declared.L_B;
  CHECK_FALSE(check_hypotheses(lips, 2000, 42).pass);
}

TEST_CASE("unit viscosity attains the textbook monotonicity constant") {
  MaterialModel m;
  m.viscosity.two_mu = 2.0;  // mu = 1
  m.viscosity.lambda = 1.0;
  m.conductivity.k = 1.0;
  m.derive_declared(0.0, 1.0);
  HypothesisReport rep = check_hypotheses(m, 10000, 2024);
  CHECK(rep.pass);
  bool seen_mono = false, seen_coer = false;
  for (const auto& row : rep.rows) {
    if (row.name.find("strong monotonicity") != std::string::npos &&
        row.name.find("H(A)") != std::string::npos) {
      seen_mono = true;
      CHECK(row.claimed == doctest::Approx(2.0));
      CHECK(row.empirical >= 2.0 - 1e-9);
    }
    if (row.name.find("coercivity") != std::string::npos &&
        row.name.find("H(A)") != std::string::npos) {
      seen_coer = true;
      CHECK(row.empirical >= 2.0 - 1e-9);
    }
  }
  CHECK(seen_mono);
  CHECK(seen_coer);
}

TEST_CASE("viscous residual is linear in the field for the linear law") {
  Mesh m = small_square();
  TensorLaw law;
  law.two_mu = 2.0;
  law.lambda = 1.0;
  Field w = Field::vector(m);
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int i = 0; i < w.values.size(); ++i) w.values[i] = U(rng);
  w.apply_constraints();

  Eigen::VectorXd r1 = assemble_A(m, law, 0.0, w);
  Field w2 = w;
  w2.values *= 3.0;
  Eigen::VectorXd r3 = assemble_A(m, law, 0.0, w2);
  CHECK((r3 - 3.0 * r1).cwiseAbs().maxCoeff() <= 1e-12);

  // The tangent of a linear law reproduces the residual exactly.
  SparseMat J = assemble_A_tangent(m, law, 0.0, w);
  Eigen::VectorXd x = free_coords_vector(m, w);
  CHECK((Eigen::VectorXd(J * x) - r1).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("thermal residuals match the linear forms they extend") {
  Mesh m = small_square();
  ConductivityLaw law;
  law.k = 1.7;
  Field th = Field::scalar(m);
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int i = 0; i < th.values.size(); ++i) th.values[i] = U(rng);
  th.apply_constraints();

  Eigen::VectorXd r = assemble_C2(m, law, 0.0, th);
  SparseMat G = restrict_form_scalar(m, assemble_form(FormKind::EnergyScalar, m));
  Eigen::VectorXd x = free_coords_scalar(m, th);
  CHECK((r - 1.7 * Eigen::VectorXd(G * x)).cwiseAbs().maxCoeff() <= 1e-12);

  SparseMat J = assemble_C2_tangent(m, law, 0.0, th);
  CHECK((Eigen::MatrixXd(J) - 1.7 * Eigen::MatrixXd(G)).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("thermal expansion residual pairs the strain divergence") {
  Mesh m = small_square();
  ThermalExpansionLaw law;
  law.c_exp = 0.5;
  Field th = Field::scalar(m);
  for (int v = 0; v < m.n_vertices(); ++v) th.values[v] = 1.0;  // constant one
  // <C1(theta), v> = int -c_exp theta I : eps(v) = -c_exp int div v.
  Eigen::VectorXd r = assemble_C1(m, law, 0.0, th);

  Field v = Field::vector(m);
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int i = 0; i < v.values.size(); ++i) v.values[i] = U(rng);
  v.apply_constraints();
  Eigen::VectorXd vx = free_coords_vector(m, v);

  double divint = 0.0;
  for (int t = 0; t < m.n_triangles(); ++t) {
    SymTensor e = element_strain(m, t, v);
    divint += m.tri_area[static_cast<size_t>(t)] * e.trace();
  }
  CHECK(r.dot(vx) == doctest::Approx(-0.5 * divint).epsilon(1e-12));
}

TEST_CASE("heat production pairs strain rate and boundary sliding") {
  Mesh m = small_square();
  MaterialModel mat = reference_material();

  // Pure volumetric part first: heating off.
  MaterialModel vol = mat;
  vol.heating.lambda = 0.0;
  Field v = Field::vector(m);
  std::mt19937_64 rng(37);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int i = 0; i < v.values.size(); ++i) v.values[i] = U(rng);
  v.apply_constraints();

  Eigen::VectorXd r = assemble_C3(m, vol, 0.0, v);
  // Pair with the constant-one test function over the free scalar dofs:
  // sum_z int R(v) phi_z = int R(v) * (sum of free hat functions).
  Field ones = Field::scalar(m);
  for (int i = 0; i < ones.values.size(); ++i) ones.values[i] = 1.0;
  ones.apply_constraints();  // hat sum over the free dofs only
  Eigen::VectorXd zx = free_coords_scalar(m, ones);

  double expected = 0.0;
  for (int t = 0; t < m.n_triangles(); ++t) {
    SymTensor e = element_strain(m, t, v);
    const double rdens = -ddot(mat.heat_coupling.c, e);  // R(v) per element
    // int over the triangle of rdens * hat_sum: area/3 per vertex present.
    const auto& tri = m.triangles[static_cast<size_t>(t)];
    for (int loc = 0; loc < 3; ++loc)
      if (ones.values[tri[static_cast<size_t>(loc)]] != 0.0)
        expected += rdens * m.tri_area[static_cast<size_t>(t)] / 3.0;
  }
  CHECK(r.dot(zx) == doctest::Approx(expected).epsilon(1e-11));

  // Switching the heating on adds the lumped boundary term.
  Eigen::VectorXd rh = assemble_C3(m, mat, 0.0, v);
  double boundary = 0.0;
  for (size_t i = 0; i < m.contact_vertices.size(); ++i) {
    const int vert = m.contact_vertices[i];
    if (ones.values[vert] == 0.0) continue;
    const Eigen::Vector2d n = m.contact_normal[i];
    const Eigen::Vector2d vel(v.values[2 * vert], v.values[2 * vert + 1]);
    const Eigen::Vector2d vt = vel - vel.dot(n) * n;
    boundary += m.contact_weight[i] * mat.heating.lambda * vt.norm();
  }
  CHECK(rh.dot(zx) == doctest::Approx(expected + boundary).epsilon(1e-11));
}

TEST_CASE("material validation rejects nonpositive required constants") {
  MaterialModel m = reference_material();
  CHECK_NOTHROW(m.validate());
  m.declared.m_A = 0.0;
  CHECK_THROWS_AS(m.validate(), HypothesisError);
  m = reference_material();
  m.declared.alpha_K = -1.0;
  CHECK_THROWS_AS(m.validate(), HypothesisError);
}
