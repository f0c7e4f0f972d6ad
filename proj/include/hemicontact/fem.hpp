// SPDX-License-Identifier: MIT

#ifndef HEMICONTACT_FEM_HPP
#define HEMICONTACT_FEM_HPP

#include <Eigen/Core>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#ifdef _OPENMP
#include <omp.h>
#endif
#include <cstdint>
#include <memory>
#include <vector>

#include "hemicontact/mesh.hpp"
#include "hemicontact/runtime.hpp"
#include "hemicontact/tensor.hpp"

namespace hemicontact {

using SparseMat = Eigen::SparseMatrix<double>;

// --------------------------------------------------------------------------
// Execution mode of assembly kernels. Parallel runs element loops over
// per-worker accumulation buffers that merge in worker order, so results are
// reproducible for a fixed worker count. Serial is the reference path.
// --------------------------------------------------------------------------

enum class ExecMode { Auto, Serial, Parallel };

int effective_workers(ExecMode mode);

// Element-parallel accumulation into a dense vector. emit(item, buf) adds the
// item's contribution; buffers merge in worker order.
template <class EmitFn>
Eigen::VectorXd accumulate_elementwise(int n_items, int out_size, ExecMode mode, EmitFn&& emit) {
  const int nw = effective_workers(mode);
  if (nw <= 1 || n_items < 2) {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(out_size);
    for (int i = 0; i < n_items; ++i) emit(i, out);
    return out;
  }
  std::vector<Eigen::VectorXd> bufs(nw, Eigen::VectorXd::Zero(out_size));
#pragma omp parallel num_threads(nw)
  {
    const int tid = []() {
      int t = 0;
#ifdef _OPENMP
      t = omp_get_thread_num();
#endif
      return t;
    }();
    Eigen::VectorXd& local = bufs[static_cast<size_t>(tid)];
#pragma omp for schedule(static)
    for (int i = 0; i < n_items; ++i) emit(i, local);
  }
  Eigen::VectorXd out = std::move(bufs[0]);
  for (int w = 1; w < nw; ++w) out += bufs[static_cast<size_t>(w)];
  return out;
}

// --------------------------------------------------------------------------
// Bilinear forms on the full nodal spaces (2*nv x 2*nv for vector kinds,
// nv x nv for scalar kinds). Constraints are applied by restriction.
// --------------------------------------------------------------------------

enum class FormKind {
  Mass,                //  (u, v)_L2, vector
  MassScalar,          //  (th, ze)_L2
  ContactTrace,        //  (u, v)_L2(Gamma_C), vector
  ContactTraceScalar,  //  (th, ze)_L2(Gamma_C)
  Energy,              //  (eps(u), eps(v))_L2
  EnergyScalar,        //  (grad th, grad ze)_L2
  DivDiv               //  (div u, div v)_L2
};

SparseMat assemble_form(FormKind kind, const Mesh& mesh, ExecMode mode = ExecMode::Auto);

// Restriction of a full form to the free degrees of freedom.
SparseMat restrict_form_vector(const Mesh& mesh, const SparseMat& full);
SparseMat restrict_form_scalar(const Mesh& mesh, const SparseMat& full);

// Gather/scatter between full nodal values and free-DOF coordinates.
Eigen::VectorXd free_coords_vector(const Mesh& mesh, const Field& f);
Eigen::VectorXd free_coords_scalar(const Mesh& mesh, const Field& f);
void set_free_coords_vector(const Mesh& mesh, const Eigen::VectorXd& x, Field& f);
void set_free_coords_scalar(const Mesh& mesh, const Eigen::VectorXd& x, Field& f);

// --------------------------------------------------------------------------
// Pointwise P1 derivatives and norms.
// --------------------------------------------------------------------------

SymTensor element_strain(const Mesh& mesh, int tri, const Field& u);
Eigen::Vector2d element_gradient(const Mesh& mesh, int tri, const Field& theta);

double energy_norm(const Field& u);        // ||eps(u)||_L2, vector fields
double gradient_norm(const Field& theta);  // ||grad theta||_L2, scalar fields
double l2_norm(const Field& f);            // exact P1 quadrature, both kinds

// --------------------------------------------------------------------------
// Discrete Green identity residuals. Both sides use quadrature exact for the
// polynomial degrees P1 data produces. A piecewise-constant stress has zero
// elementwise divergence, so the tensor variant's volume term is the strain
// pairing alone and the residual collects the interelement jumps.
// --------------------------------------------------------------------------

double green_residual_scalar(const Field& u_scalar, const Field& v_vector);
double green_residual_tensor(const Mesh& mesh, const std::vector<SymTensor>& sigma,
                             const Field& v_vector);

// --------------------------------------------------------------------------
// Composite trace constants. gamma_norm^2 is the largest generalized
// eigenvalue of the contact trace form against the energy form on the free
// displacement space; gamma_s_norm^2 is the scalar analogue on the free
// temperature space. The embedding factors are folded in, so the stored
// c_e_bar and c_e are exactly 1.
// --------------------------------------------------------------------------

struct TraceConstants {
  double gamma_norm = 0.0;
  double gamma_s_norm = 0.0;
  double c_e_bar = 1.0;
  double c_e = 1.0;
  int iterations_vector = 0;
  int iterations_scalar = 0;

  double gamma_norm2() const { return gamma_norm * gamma_norm; }
  double gamma_s_norm2() const { return gamma_s_norm * gamma_s_norm; }
};

TraceConstants estimate_trace_constants(const Mesh& mesh, double tol = 1e-12, int max_iter = 50000,
                                        std::uint64_t seed = 1234);

// Dense generalized eigensolver oracle (testing aid; T and S symmetric, S > 0).
double dense_generalized_eig_max(const SparseMat& T, const SparseMat& S);

// --------------------------------------------------------------------------
// Riesz map of a symmetric positive definite Gram matrix; yields the dual
// norm ||eta||_* = sqrt(eta' S^-1 eta). The lumped variant replaces S by its
// diagonal.
// --------------------------------------------------------------------------

class RieszMap {
 public:
  RieszMap() = default;
  RieszMap(const SparseMat& gram, bool lumped);

  double dual_norm(const Eigen::VectorXd& eta) const;
  Eigen::VectorXd apply_inverse(const Eigen::VectorXd& eta) const;
  int size() const { return n_; }
  bool valid() const { return n_ > 0; }

 private:
  int n_ = 0;
  bool lumped_ = false;
  Eigen::VectorXd inv_diag_;
  std::shared_ptr<Eigen::SimplicialLDLT<SparseMat>> solver_;
};

}  // namespace hemicontact

#endif
