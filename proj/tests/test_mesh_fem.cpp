// SPDX-License-Identifier: MIT

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "hemicontact/fem.hpp"
#include "hemicontact/mesh.hpp"
#include "hemicontact/runtime.hpp"

using namespace hemicontact;

namespace {

// One right triangle with all three boundary tags present.
Mesh single_triangle() {
  Mesh m;
  m.vertices = {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}};
  m.triangles = {{0, 1, 2}};
  m.boundary_edges = {{0, 1, BoundaryTag::Contact},
                      {1, 2, BoundaryTag::Neumann},
                      {2, 0, BoundaryTag::Dirichlet}};
  m.finalize();
  return m;
}

std::vector<std::string> shipped_meshes() {
  std::vector<std::string> out;
  const std::string dir = std::string(HEMICONTACT_SOURCE_DIR) + "/meshes";
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.path().extension() == ".txt") out.push_back(e.path().string());
  std::sort(out.begin(), out.end());
  return out;
}

Field nodal_vector(const Mesh& m, const std::function<Eigen::Vector2d(double, double)>& fn) {
  Field f = Field::vector(m);
  for (int v = 0; v < m.n_vertices(); ++v) {
    const auto val = fn(m.vertices[static_cast<size_t>(v)].x(), m.vertices[static_cast<size_t>(v)].y());
    f.values[2 * v] = val.x();
    f.values[2 * v + 1] = val.y();
  }
  return f;
}

Field nodal_scalar(const Mesh& m, const std::function<double(double, double)>& fn) {
  Field f = Field::scalar(m);
  for (int v = 0; v < m.n_vertices(); ++v)
    f.values[v] = fn(m.vertices[static_cast<size_t>(v)].x(), m.vertices[static_cast<size_t>(v)].y());
  return f;
}

}  // namespace

TEST_CASE("scalar mass matrix matches the closed-form element matrix") {
  Mesh m = single_triangle();
  SparseMat M = assemble_form(FormKind::MassScalar, m);
  // (area/12) * [2 1 1; 1 2 1; 1 1 2] with area = 1/2
  const double a = 0.5 / 12.0;
  Eigen::MatrixXd D(M);
  Eigen::Matrix3d ref;
  ref << 2 * a, a, a, a, 2 * a, a, a, a, 2 * a;
  CHECK((D - ref).cwiseAbs().maxCoeff() == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("vector mass interleaves the scalar blocks") {
  Mesh m = single_triangle();
  Eigen::MatrixXd Ms(assemble_form(FormKind::MassScalar, m));
  Eigen::MatrixXd Mv(assemble_form(FormKind::Mass, m));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      CHECK(Mv(2 * i, 2 * j) == doctest::Approx(Ms(i, j)));
      CHECK(Mv(2 * i + 1, 2 * j + 1) == doctest::Approx(Ms(i, j)));
      CHECK(Mv(2 * i, 2 * j + 1) == 0.0);
    }
}

TEST_CASE("mass encodes the partition of unity on every shipped mesh") {
  for (const auto& path : shipped_meshes()) {
    Mesh m = load_mesh(path);
    Eigen::VectorXd ones = Eigen::VectorXd::Ones(m.n_vertices());
    SparseMat M = assemble_form(FormKind::MassScalar, m);
    CHECK(ones.dot(M * ones) == doctest::Approx(m.total_area()).epsilon(1e-13));
    // trace form against the constant gives the contact length
    SparseMat Tc = assemble_form(FormKind::ContactTraceScalar, m);
    CHECK(ones.dot(Tc * ones) ==
          doctest::Approx(m.boundary_length(BoundaryTag::Contact)).epsilon(1e-13));
  }
}

TEST_CASE("energy forms reproduce hand values for affine fields") {
  for (const auto& path : shipped_meshes()) {
    Mesh m = load_mesh(path);
    const double area = m.total_area();

    // u = (x, 0): eps = diag(1, 0), |eps|^2 = 1
    Field u = nodal_vector(m, [](double x, double) { return Eigen::Vector2d(x, 0.0); });
    SparseMat K = assemble_form(FormKind::Energy, m);
    CHECK(u.values.dot(K * u.values) == doctest::Approx(area).epsilon(1e-12));
    CHECK(energy_norm(u) == doctest::Approx(std::sqrt(area)).epsilon(1e-12));

    // u = (y, x): eps = [[0 1],[1 0]], |eps|^2 = 2
    Field s = nodal_vector(m, [](double x, double y) { return Eigen::Vector2d(y, x); });
    CHECK(s.values.dot(K * s.values) == doctest::Approx(2.0 * area).epsilon(1e-12));

    // u = (x, y): div u = 2
    Field d = nodal_vector(m, [](double x, double y) { return Eigen::Vector2d(x, y); });
    SparseMat D = assemble_form(FormKind::DivDiv, m);
    CHECK(d.values.dot(D * d.values) == doctest::Approx(4.0 * area).epsilon(1e-12));

    // theta = x - 2y: |grad|^2 = 5
    Field th = nodal_scalar(m, [](double x, double y) { return x - 2.0 * y; });
    SparseMat G = assemble_form(FormKind::EnergyScalar, m);
    CHECK(th.values.dot(G * th.values) == doctest::Approx(5.0 * area).epsilon(1e-12));
    CHECK(gradient_norm(th) == doctest::Approx(std::sqrt(5.0 * area)).epsilon(1e-12));
  }
}

TEST_CASE("l2 norm is exact for nodal fields") {
  Mesh m = single_triangle();
  // theta = x on the reference triangle: int x^2 = 1/12
  Field th = nodal_scalar(m, [](double x, double) { return x; });
  CHECK(l2_norm(th) == doctest::Approx(std::sqrt(1.0 / 12.0)).epsilon(1e-13));
}

TEST_CASE("scalar Green identity vanishes for nodal data on every shipped mesh") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (const auto& path : shipped_meshes()) {
    Mesh m = load_mesh(path);
    for (int rep = 0; rep < 5; ++rep) {
      Field th = Field::scalar(m);
      Field v = Field::vector(m);
      for (int i = 0; i < th.values.size(); ++i) th.values[i] = U(rng);
      for (int i = 0; i < v.values.size(); ++i) v.values[i] = U(rng);
      CHECK(green_residual_scalar(th, v) <= 1e-12);
    }
  }
}

TEST_CASE("tensor Green identity vanishes for constant stress") {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (const auto& path : shipped_meshes()) {
    Mesh m = load_mesh(path);
    SymTensor sigma(2);
    sigma.at(0, 0) = U(rng);
    sigma.at(1, 1) = U(rng);
    sigma.at(0, 1) = sigma.at(1, 0) = U(rng);
    std::vector<SymTensor> field(static_cast<size_t>(m.n_triangles()), sigma);
    for (int rep = 0; rep < 5; ++rep) {
      Field v = Field::vector(m);
      for (int i = 0; i < v.values.size(); ++i) v.values[i] = U(rng);
      CHECK(green_residual_tensor(m, field, v) <= 1e-12);
    }
  }
}

TEST_CASE("tensor Green residual decays linearly for interpolated smooth stress") {
  // sigma from u = (x^2 - y^2, -2xy) via eps; elementwise strains of the
  // interpolant jump O(h) across edges, so the residual is O(h).
  auto residual_at = [](int n) {
    Mesh m = make_unit_square_mesh(n);
    Field u = nodal_vector(
        m, [](double x, double y) { return Eigen::Vector2d(x * x - y * y, -2.0 * x * y); });
    std::vector<SymTensor> sigma(static_cast<size_t>(m.n_triangles()));
    for (int t = 0; t < m.n_triangles(); ++t) sigma[static_cast<size_t>(t)] = element_strain(m, t, u);
    Field v = nodal_vector(m, [](double x, double y) {
      return Eigen::Vector2d(std::sin(x + y), x * y);
    });
    return green_residual_tensor(m, sigma, v);
  };
  const double r8 = residual_at(8);
  const double r16 = residual_at(16);
  const double r32 = residual_at(32);
  CHECK(r8 / r16 > 1.5);
  CHECK(r16 / r32 > 1.5);
}

TEST_CASE("power iteration reproduces the dense trace eigenvalue") {
  for (const auto& path : shipped_meshes()) {
    Mesh m = load_mesh(path);
    TraceConstants tc = estimate_trace_constants(m);
    SparseMat T = restrict_form_vector(m, assemble_form(FormKind::ContactTrace, m));
    SparseMat E = restrict_form_vector(m, assemble_form(FormKind::Energy, m));
    const double dense = dense_generalized_eig_max(T, E);
    CHECK(tc.gamma_norm2() == doctest::Approx(dense).epsilon(1e-9));

    SparseMat Ts = restrict_form_scalar(m, assemble_form(FormKind::ContactTraceScalar, m));
    SparseMat Es = restrict_form_scalar(m, assemble_form(FormKind::EnergyScalar, m));
    const double dense_s = dense_generalized_eig_max(Ts, Es);
    CHECK(tc.gamma_s_norm2() == doctest::Approx(dense_s).epsilon(1e-9));

    CHECK(tc.c_e_bar == 1.0);
    CHECK(tc.c_e == 1.0);
  }
}

TEST_CASE("Riesz map realizes the dual norm") {
  // Small SPD Gram matrix with a known inverse action.
  std::vector<Eigen::Triplet<double>> trips = {{0, 0, 4.0}, {1, 1, 2.0}, {2, 2, 1.0},
                                               {0, 1, 1.0}, {1, 0, 1.0}};
  SparseMat S(3, 3);
  S.setFromTriplets(trips.begin(), trips.end());
  RieszMap riesz(S, false);
  Eigen::Vector3d eta(1.0, -2.0, 0.5);
  Eigen::MatrixXd Sd(S);
  const double expected = std::sqrt(eta.dot(Sd.ldlt().solve(eta)));
  CHECK(riesz.dual_norm(eta) == doctest::Approx(expected).epsilon(1e-12));
  CHECK((S * riesz.apply_inverse(eta) - eta).norm() <= 1e-10);

  RieszMap lumped(S, true);
  const double lumped_expected = std::sqrt(1.0 / 4.0 + 4.0 / 2.0 + 0.25 / 1.0);
  CHECK(lumped.dual_norm(eta) == doctest::Approx(lumped_expected).epsilon(1e-12));
}

TEST_CASE("free coordinate maps round trip and respect constraints") {
  Mesh m = make_unit_square_mesh(3);
  Field u = nodal_vector(m, [](double x, double y) { return Eigen::Vector2d(x * y, x - y); });
  u.apply_constraints();
  CHECK(u.max_constraint_violation() == 0.0);
  Eigen::VectorXd x = free_coords_vector(m, u);
  CHECK(x.size() == m.n_vec_dofs);
  Field back = Field::vector(m);
  set_free_coords_vector(m, x, back);
  CHECK((back.values - u.values).cwiseAbs().maxCoeff() == 0.0);

  Field th = nodal_scalar(m, [](double x, double y) { return x + y; });
  th.apply_constraints();
  Eigen::VectorXd xs = free_coords_scalar(m, th);
  CHECK(xs.size() == m.n_scal_dofs);
  Field backs = Field::scalar(m);
  set_free_coords_scalar(m, xs, backs);
  CHECK((backs.values - th.values).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("mesh text parser reports file and line") {
  CHECK_THROWS_WITH_AS(parse_mesh("v 0 0\nv 1 0\nq 1\n", "bad.txt"),
                       doctest::Contains("bad.txt:3"), ParseError);
  CHECK_THROWS_WITH_AS(parse_mesh("v 0 0\nv oops 0\n", "bad.txt"), doctest::Contains("bad.txt:2"),
                       ParseError);
  CHECK_THROWS_WITH_AS(parse_mesh("v 0 0\nv 1 0\nv 0 1\nt 0 1 2 9\n", "bad.txt"),
                       doctest::Contains("trailing"), ParseError);
}

TEST_CASE("meshes without clamping are rejected") {
  Mesh m;
  m.vertices = {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}};
  m.triangles = {{0, 1, 2}};
  m.boundary_edges = {{0, 1, BoundaryTag::Contact},
                      {1, 2, BoundaryTag::Neumann},
                      {2, 0, BoundaryTag::Neumann}};
  CHECK_THROWS_WITH_AS(m.finalize(), doctest::Contains("meas(Gamma_D) = 0 violates clamping"),
                       ValidationError);
}

TEST_CASE("clockwise triangles are fixed or rejected per flag") {
  Mesh m;
  m.vertices = {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}};
  m.triangles = {{0, 2, 1}};  // clockwise
  m.boundary_edges = {{0, 1, BoundaryTag::Contact},
                      {1, 2, BoundaryTag::Neumann},
                      {2, 0, BoundaryTag::Dirichlet}};
  Mesh fixed = m;
  fixed.finalize(true);
  CHECK(fixed.tri_area[0] == doctest::Approx(0.5));
  CHECK_THROWS_WITH_AS(m.finalize(false), doctest::Contains("clockwise"), ValidationError);
}

TEST_CASE("save and load round trip") {
  Mesh m = make_unit_square_mesh(3);
  const std::string path = (std::filesystem::temp_directory_path() / "roundtrip_mesh.txt").string();
  save_mesh(m, path);
  Mesh back = load_mesh(path);
  CHECK(back.n_vertices() == m.n_vertices());
  CHECK(back.n_triangles() == m.n_triangles());
  CHECK(back.total_area() == doctest::Approx(m.total_area()).epsilon(1e-15));
  CHECK(back.contact_vertices == m.contact_vertices);
  std::filesystem::remove(path);
}

TEST_CASE("boundary normals point outward") {
  for (const auto& path : shipped_meshes()) {
    Mesh m = load_mesh(path);
    for (int e = 0; e < m.n_boundary_edges(); ++e) {
      const auto& be = m.boundary_edges[static_cast<size_t>(e)];
      const Eigen::Vector2d mid =
          0.5 * (m.vertices[static_cast<size_t>(be.a)] + m.vertices[static_cast<size_t>(be.b)]);
      CHECK(m.edge_normal[static_cast<size_t>(e)].norm() == doctest::Approx(1.0).epsilon(1e-13));
      // The edge's owning triangle lies inside: its centroid is behind the normal.
      const auto& tri = m.triangles[static_cast<size_t>(m.edge_triangle[static_cast<size_t>(e)])];
      Eigen::Vector2d tric = (m.vertices[static_cast<size_t>(tri[0])] +
                              m.vertices[static_cast<size_t>(tri[1])] +
                              m.vertices[static_cast<size_t>(tri[2])]) /
                             3.0;
      CHECK(m.edge_normal[static_cast<size_t>(e)].dot(tric - mid) < 0.0);
    }
  }
}

TEST_CASE("contact weights sum to the contact length") {
  for (const auto& path : shipped_meshes()) {
    Mesh m = load_mesh(path);
    double sum = 0.0;
    for (double w : m.contact_weight) sum += w;
    CHECK(sum == doctest::Approx(m.boundary_length(BoundaryTag::Contact)).epsilon(1e-13));
  }
}
