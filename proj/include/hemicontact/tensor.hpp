// SPDX-License-Identifier: MIT

#ifndef HEMICONTACT_TENSOR_HPP
#define HEMICONTACT_TENSOR_HPP

#include <array>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace hemicontact {

// Small dense vector with runtime dimension d in {2,3}.
struct VectorValue {
  int d = 2;
  std::array<double, 3> x{0.0, 0.0, 0.0};

  VectorValue() = default;
  explicit VectorValue(int dim) : d(dim) { check_dim(dim); }
  VectorValue(double a, double b) : d(2), x{a, b, 0.0} {}
  VectorValue(double a, double b, double c) : d(3), x{a, b, c} {}

  static void check_dim(int dim) {
    if (dim != 2 && dim != 3) throw std::invalid_argument("VectorValue: dimension must be 2 or 3");
  }

  double& operator[](int i) { return x[static_cast<size_t>(i)]; }
  double operator[](int i) const { return x[static_cast<size_t>(i)]; }

  VectorValue& operator+=(const VectorValue& o) {
    for (int i = 0; i < d; ++i) x[i] += o.x[i];
    return *this;
  }
  VectorValue& operator-=(const VectorValue& o) {
    for (int i = 0; i < d; ++i) x[i] -= o.x[i];
    return *this;
  }
  VectorValue& operator*=(double s) {
    for (int i = 0; i < d; ++i) x[i] *= s;
    return *this;
  }

  friend VectorValue operator+(VectorValue a, const VectorValue& b) { return a += b; }
  friend VectorValue operator-(VectorValue a, const VectorValue& b) { return a -= b; }
  friend VectorValue operator*(double s, VectorValue a) { return a *= s; }

  friend double dot(const VectorValue& a, const VectorValue& b) {
    double s = 0.0;
    for (int i = 0; i < a.d; ++i) s += a.x[i] * b.x[i];
    return s;
  }
  double norm() const { return std::sqrt(dot(*this, *this)); }
};

// Symmetric d x d tensor, d in {2,3} at runtime. The full matrix is stored;
// symmetry is a construction invariant, not a storage trick.
struct SymTensor {
  int d = 2;
  std::array<double, 9> m{};  // row-major d x d, entries beyond d x d stay zero

  SymTensor() = default;
  explicit SymTensor(int dim) : d(dim) { VectorValue::check_dim(dim); }

  double& at(int i, int j) { return m[static_cast<size_t>(3 * i + j)]; }
  double at(int i, int j) const { return m[static_cast<size_t>(3 * i + j)]; }
  double operator()(int i, int j) const { return at(i, j); }

  static SymTensor zero(int dim) { return SymTensor(dim); }

  static SymTensor identity(int dim) {
    SymTensor t(dim);
    for (int i = 0; i < dim; ++i) t.at(i, i) = 1.0;
    return t;
  }

  // Builds from a full matrix, rejecting asymmetric input.
  static SymTensor from_matrix(int dim, const double* rowmajor, double tol = 1e-12) {
    SymTensor t(dim);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) t.at(i, j) = rowmajor[i * dim + j];
    for (int i = 0; i < dim; ++i)
      for (int j = i + 1; j < dim; ++j)
        if (std::abs(t.at(i, j) - t.at(j, i)) > tol)
          throw std::invalid_argument("SymTensor: input matrix is not symmetric");
    for (int i = 0; i < dim; ++i)
      for (int j = i + 1; j < dim; ++j) {
        double v = 0.5 * (t.at(i, j) + t.at(j, i));
        t.at(i, j) = t.at(j, i) = v;
      }
    return t;
  }

  // Symmetrized outer product sym(a (x) b).
  static SymTensor sym_outer(const VectorValue& a, const VectorValue& b) {
    SymTensor t(a.d);
    for (int i = 0; i < a.d; ++i)
      for (int j = 0; j < a.d; ++j) t.at(i, j) = 0.5 * (a[i] * b[j] + a[j] * b[i]);
    return t;
  }

  SymTensor& operator+=(const SymTensor& o) {
    for (int i = 0; i < 9; ++i) m[i] += o.m[i];
    return *this;
  }
  SymTensor& operator-=(const SymTensor& o) {
    for (int i = 0; i < 9; ++i) m[i] -= o.m[i];
    return *this;
  }
  SymTensor& operator*=(double s) {
    for (int i = 0; i < 9; ++i) m[i] *= s;
    return *this;
  }

  friend SymTensor operator+(SymTensor a, const SymTensor& b) { return a += b; }
  friend SymTensor operator-(SymTensor a, const SymTensor& b) { return a -= b; }
  friend SymTensor operator*(double s, SymTensor a) { return a *= s; }

  double trace() const {
    double s = 0.0;
    for (int i = 0; i < d; ++i) s += at(i, i);
    return s;
  }

  // Frobenius inner product a : b.
  friend double ddot(const SymTensor& a, const SymTensor& b) {
    double s = 0.0;
    for (int i = 0; i < a.d; ++i)
      for (int j = 0; j < a.d; ++j) s += a.at(i, j) * b.at(i, j);
    return s;
  }
  double norm() const { return std::sqrt(ddot(*this, *this)); }

  VectorValue apply(const VectorValue& v) const {
    VectorValue r(d);
    for (int i = 0; i < d; ++i) {
      double s = 0.0;
      for (int j = 0; j < d; ++j) s += at(i, j) * v[j];
      r[i] = s;
    }
    return r;
  }

  // a = dev(a) + (tr(a)/d) I, with tr(dev(a)) = 0.
  struct Split;
  Split deviatoric_split() const;
};

struct SymTensor::Split {
  SymTensor dev;
  double spherical;  // tr(a)/d, the coefficient of I
};

inline SymTensor::Split SymTensor::deviatoric_split() const {
  Split s{*this, trace() / d};
  for (int i = 0; i < d; ++i) s.dev.at(i, i) -= s.spherical;
  return s;
}

}  // namespace hemicontact

#endif
