// SPDX-License-Identifier: MIT

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "hemicontact/tensor.hpp"

using hemicontact::SymTensor;
using hemicontact::VectorValue;

TEST_CASE("vector algebra") {
  VectorValue a(1.0, 2.0);
  VectorValue b(-3.0, 0.5);
  CHECK(dot(a, b) == doctest::Approx(-2.0).epsilon(1e-15));
  CHECK((a + b)[0] == doctest::Approx(-2.0));
  CHECK((2.0 * a).norm() == doctest::Approx(2.0 * std::sqrt(5.0)).epsilon(1e-15));

  VectorValue c(1.0, 2.0, 2.0);
  CHECK(c.norm() == doctest::Approx(3.0).epsilon(1e-15));
  CHECK_THROWS_AS(VectorValue(4), std::invalid_argument);
}

TEST_CASE("tensor construction and symmetry") {
  const double good[4] = {1.0, 2.0, 2.0, -1.0};
  SymTensor t = SymTensor::from_matrix(2, good);
  CHECK(t(0, 1) == 2.0);
  CHECK(t(1, 0) == 2.0);
  CHECK(t.trace() == doctest::Approx(0.0));

  const double bad[4] = {1.0, 2.0, 2.1, -1.0};
  CHECK_THROWS_AS(SymTensor::from_matrix(2, bad), std::invalid_argument);

  SymTensor id = SymTensor::identity(3);
  CHECK(id.trace() == 3.0);
  CHECK(ddot(id, id) == 3.0);
}

TEST_CASE("sym_outer matches hand expansion") {
  VectorValue a(2.0, -1.0);
  VectorValue b(3.0, 5.0);
  SymTensor t = SymTensor::sym_outer(a, b);
  // sym(a (x) b) = [[a0 b0, (a0 b1 + a1 b0)/2], [., a1 b1]]
  CHECK(t(0, 0) == doctest::Approx(6.0));
  CHECK(t(0, 1) == doctest::Approx(0.5 * (10.0 - 3.0)));
  CHECK(t(1, 0) == t(0, 1));
  CHECK(t(1, 1) == doctest::Approx(-5.0));
}

TEST_CASE("apply is matrix-vector product") {
  const double mat[4] = {2.0, 1.0, 1.0, 3.0};
  SymTensor t = SymTensor::from_matrix(2, mat);
  VectorValue v(1.0, -1.0);
  VectorValue r = t.apply(v);
  CHECK(r[0] == doctest::Approx(1.0));
  CHECK(r[1] == doctest::Approx(-2.0));
}

TEST_CASE("deviatoric split reconstructs and is orthogonal") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(-2.0, 2.0);
  for (int dim : {2, 3}) {
    for (int rep = 0; rep < 50; ++rep) {
      SymTensor t(dim);
      for (int i = 0; i < dim; ++i)
        for (int j = i; j < dim; ++j) t.at(i, j) = t.at(j, i) = U(rng);
      auto s = t.deviatoric_split();
      CHECK(s.dev.trace() == doctest::Approx(0.0).epsilon(1e-13));
      SymTensor back = s.dev + s.spherical * SymTensor::identity(dim);
      CHECK((back - t).norm() == doctest::Approx(0.0).epsilon(1e-13));
      // dev part is Frobenius-orthogonal to the identity
      CHECK(ddot(s.dev, SymTensor::identity(dim)) == doctest::Approx(0.0).epsilon(1e-13));
      // Pythagoras: |t|^2 = |dev|^2 + d * spherical^2
      CHECK(ddot(t, t) ==
            doctest::Approx(ddot(s.dev, s.dev) + dim * s.spherical * s.spherical).epsilon(1e-12));
    }
  }
}
