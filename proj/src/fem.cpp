// SPDX-License-Identifier: MIT

#include "hemicontact/fem.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>

namespace hemicontact {

int effective_workers(ExecMode mode) {
  switch (mode) {
    case ExecMode::Serial: return 1;
    case ExecMode::Parallel: return std::max(2, worker_count());
    default: return worker_count();
  }
}

namespace {

using Triplet = Eigen::Triplet<double>;

// strain(phi_i e_a) : strain(phi_j e_b) = ((a.b)(g.h) + (a.h)(b.g)) / 2
// specialized to unit axis vectors.
inline double strain_pairing(int a, const Eigen::Vector2d& g, int b, const Eigen::Vector2d& h) {
  double s = (a == b) ? 0.5 * g.dot(h) : 0.0;
  return s + 0.5 * g[b] * h[a];
}

void emit_element(FormKind kind, const Mesh& mesh, int t, std::vector<Triplet>& out) {
  const auto& tri = mesh.triangles[t];
  const double area = mesh.tri_area[t];
  const auto& G = mesh.tri_grad[t];
  switch (kind) {
    case FormKind::MassScalar: {
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          out.emplace_back(tri[i], tri[j], area / 12.0 * (i == j ? 2.0 : 1.0));
      break;
    }
    case FormKind::Mass: {
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          double m = area / 12.0 * (i == j ? 2.0 : 1.0);
          out.emplace_back(2 * tri[i], 2 * tri[j], m);
          out.emplace_back(2 * tri[i] + 1, 2 * tri[j] + 1, m);
        }
      break;
    }
    case FormKind::EnergyScalar: {
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          out.emplace_back(tri[i], tri[j], area * G.col(i).dot(G.col(j)));
      break;
    }
    case FormKind::Energy: {
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
              out.emplace_back(2 * tri[i] + a, 2 * tri[j] + b,
                               area * strain_pairing(a, G.col(i), b, G.col(j)));
      break;
    }
    case FormKind::DivDiv: {
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
              out.emplace_back(2 * tri[i] + a, 2 * tri[j] + b, area * G(a, i) * G(b, j));
      break;
    }
    default: break;  // trace kinds run over edges, not elements
  }
}

void emit_trace_edge(FormKind kind, const Mesh& mesh, int e, std::vector<Triplet>& out) {
  const auto& be = mesh.boundary_edges[e];
  if (be.tag != BoundaryTag::Contact) return;
  const double L = mesh.edge_length[e];
  const int v[2] = {be.a, be.b};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      double m = L / 6.0 * (i == j ? 2.0 : 1.0);
      if (kind == FormKind::ContactTraceScalar) {
        out.emplace_back(v[i], v[j], m);
      } else {
        out.emplace_back(2 * v[i], 2 * v[j], m);
        out.emplace_back(2 * v[i] + 1, 2 * v[j] + 1, m);
      }
    }
}

}  // namespace

SparseMat assemble_form(FormKind kind, const Mesh& mesh, ExecMode mode) {
  const bool scalar = kind == FormKind::MassScalar || kind == FormKind::EnergyScalar ||
                      kind == FormKind::ContactTraceScalar;
  const bool trace = kind == FormKind::ContactTrace || kind == FormKind::ContactTraceScalar;
  const int n = scalar ? mesh.n_vertices() : 2 * mesh.n_vertices();
  const int items = trace ? mesh.n_boundary_edges() : mesh.n_triangles();

  const int nw = effective_workers(mode);
  std::vector<Triplet> triplets;
  if (nw <= 1 || items < 2) {
    for (int i = 0; i < items; ++i)
      trace ? emit_trace_edge(kind, mesh, i, triplets) : emit_element(kind, mesh, i, triplets);
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
      for (int i = 0; i < items; ++i)
        trace ? emit_trace_edge(kind, mesh, i, local) : emit_element(kind, mesh, i, local);
    }
    for (auto& b : bufs) triplets.insert(triplets.end(), b.begin(), b.end());
  }

  SparseMat M(n, n);
  M.setFromTriplets(triplets.begin(), triplets.end());
  M.makeCompressed();
  return M;
}

namespace {

SparseMat restrict_form(const SparseMat& full, const std::vector<int>& dof, int n_free) {
  std::vector<Triplet> t;
  t.reserve(static_cast<size_t>(full.nonZeros()));
  for (int k = 0; k < full.outerSize(); ++k)
    for (SparseMat::InnerIterator it(full, k); it; ++it) {
      int r = dof[static_cast<size_t>(it.row())];
      int c = dof[static_cast<size_t>(it.col())];
      if (r >= 0 && c >= 0) t.emplace_back(r, c, it.value());
    }
  SparseMat M(n_free, n_free);
  M.setFromTriplets(t.begin(), t.end());
  M.makeCompressed();
  return M;
}

}  // namespace

SparseMat restrict_form_vector(const Mesh& mesh, const SparseMat& full) {
  return restrict_form(full, mesh.vec_dof, mesh.n_vec_dofs);
}

SparseMat restrict_form_scalar(const Mesh& mesh, const SparseMat& full) {
  return restrict_form(full, mesh.scal_dof, mesh.n_scal_dofs);
}

Eigen::VectorXd free_coords_vector(const Mesh& mesh, const Field& f) {
  Eigen::VectorXd x(mesh.n_vec_dofs);
  for (size_t i = 0; i < mesh.vec_dof.size(); ++i)
    if (mesh.vec_dof[i] >= 0) x[mesh.vec_dof[i]] = f.values[static_cast<Eigen::Index>(i)];
  return x;
}

Eigen::VectorXd free_coords_scalar(const Mesh& mesh, const Field& f) {
  Eigen::VectorXd x(mesh.n_scal_dofs);
  for (size_t i = 0; i < mesh.scal_dof.size(); ++i)
    if (mesh.scal_dof[i] >= 0) x[mesh.scal_dof[i]] = f.values[static_cast<Eigen::Index>(i)];
  return x;
}

void set_free_coords_vector(const Mesh& mesh, const Eigen::VectorXd& x, Field& f) {
  f.values.setZero();
  for (size_t i = 0; i < mesh.vec_dof.size(); ++i)
    if (mesh.vec_dof[i] >= 0) f.values[static_cast<Eigen::Index>(i)] = x[mesh.vec_dof[i]];
}

void set_free_coords_scalar(const Mesh& mesh, const Eigen::VectorXd& x, Field& f) {
  f.values.setZero();
  for (size_t i = 0; i < mesh.scal_dof.size(); ++i)
    if (mesh.scal_dof[i] >= 0) f.values[static_cast<Eigen::Index>(i)] = x[mesh.scal_dof[i]];
}

SymTensor element_strain(const Mesh& mesh, int tri, const Field& u) {
  const auto& t = mesh.triangles[tri];
  const auto& G = mesh.tri_grad[tri];
  SymTensor eps(2);
  for (int k = 0; k < 3; ++k) {
    const double ux = u.values[2 * t[k]], uy = u.values[2 * t[k] + 1];
    const Eigen::Vector2d g = G.col(k);
    eps.at(0, 0) += ux * g.x();
    eps.at(1, 1) += uy * g.y();
    eps.at(0, 1) += 0.5 * (ux * g.y() + uy * g.x());
  }
  eps.at(1, 0) = eps.at(0, 1);
  return eps;
}

Eigen::Vector2d element_gradient(const Mesh& mesh, int tri, const Field& theta) {
  const auto& t = mesh.triangles[tri];
  const auto& G = mesh.tri_grad[tri];
  Eigen::Vector2d g = Eigen::Vector2d::Zero();
  for (int k = 0; k < 3; ++k) g += theta.values[t[k]] * G.col(k);
  return g;
}

double energy_norm(const Field& u) {
  const Mesh& m = *u.mesh;
  double s = 0.0;
  for (int t = 0; t < m.n_triangles(); ++t) {
    SymTensor e = element_strain(m, t, u);
    s += m.tri_area[t] * ddot(e, e);
  }
  return std::sqrt(s);
}

double gradient_norm(const Field& theta) {
  const Mesh& m = *theta.mesh;
  double s = 0.0;
  for (int t = 0; t < m.n_triangles(); ++t) s += m.tri_area[t] * element_gradient(m, t, theta).squaredNorm();
  return std::sqrt(s);
}

double l2_norm(const Field& f) {
  const Mesh& m = *f.mesh;
  const int nc = f.components();
  double s = 0.0;
  for (int t = 0; t < m.n_triangles(); ++t) {
    const auto& tri = m.triangles[t];
    for (int c = 0; c < nc; ++c) {
      double a = f.values[nc * tri[0] + c], b = f.values[nc * tri[1] + c], d = f.values[nc * tri[2] + c];
      s += m.tri_area[t] / 6.0 * (a * a + b * b + d * d + a * b + a * d + b * d);
    }
  }
  return std::sqrt(s);
}

double green_residual_scalar(const Field& u, const Field& v) {
  const Mesh& m = *u.mesh;
  double vol = 0.0;
  for (int t = 0; t < m.n_triangles(); ++t) {
    const auto& tri = m.triangles[t];
    const auto& G = m.tri_grad[t];
    double ubar = (u.values[tri[0]] + u.values[tri[1]] + u.values[tri[2]]) / 3.0;
    Eigen::Vector2d vbar = Eigen::Vector2d::Zero(), gu = Eigen::Vector2d::Zero();
    double divv = 0.0;
    for (int k = 0; k < 3; ++k) {
      Eigen::Vector2d vk(v.values[2 * tri[k]], v.values[2 * tri[k] + 1]);
      vbar += vk / 3.0;
      divv += vk.dot(G.col(k));
      gu += u.values[tri[k]] * G.col(k);
    }
    vol += m.tri_area[t] * (ubar * divv + gu.dot(vbar));
  }
  double bnd = 0.0;
  for (int e = 0; e < m.n_boundary_edges(); ++e) {
    const auto& be = m.boundary_edges[e];
    const Eigen::Vector2d n = m.edge_normal[e];
    double ua = u.values[be.a], ub = u.values[be.b];
    double va = Eigen::Vector2d(v.values[2 * be.a], v.values[2 * be.a + 1]).dot(n);
    double vb = Eigen::Vector2d(v.values[2 * be.b], v.values[2 * be.b + 1]).dot(n);
    bnd += m.edge_length[e] / 6.0 * (ua * (2.0 * va + vb) + ub * (va + 2.0 * vb));
  }
  return std::abs(vol - bnd);
}

double green_residual_tensor(const Mesh& m, const std::vector<SymTensor>& sigma, const Field& v) {
  if (static_cast<int>(sigma.size()) != m.n_triangles())
    throw ValidationError("green_residual_tensor: one stress tensor per triangle required");
  double vol = 0.0;
  for (int t = 0; t < m.n_triangles(); ++t) vol += m.tri_area[t] * ddot(sigma[static_cast<size_t>(t)], element_strain(m, t, v));
  double bnd = 0.0;
  for (int e = 0; e < m.n_boundary_edges(); ++e) {
    const auto& be = m.boundary_edges[e];
    const SymTensor& s = sigma[static_cast<size_t>(m.edge_triangle[e])];
    const Eigen::Vector2d n = m.edge_normal[e];
    VectorValue tn = s.apply(VectorValue(n.x(), n.y()));
    Eigen::Vector2d vm(0.5 * (v.values[2 * be.a] + v.values[2 * be.b]),
                       0.5 * (v.values[2 * be.a + 1] + v.values[2 * be.b + 1]));
    bnd += m.edge_length[e] * (tn[0] * vm.x() + tn[1] * vm.y());
  }
  return std::abs(vol - bnd);
}

namespace {

struct PowerResult {
  double lambda = 0.0;
  int iterations = 0;
};

// Largest eigenvalue of T v = lambda S v (T >= 0, S > 0) by power iteration on
// S^-1 T with Rayleigh-quotient convergence control.
PowerResult power_iteration_max(const SparseMat& T, const SparseMat& S, double tol, int max_iter,
                                std::mt19937_64& rng) {
  PowerResult res;
  const int n = static_cast<int>(S.rows());
  if (n == 0 || T.nonZeros() == 0) return res;

  Eigen::SimplicialLDLT<SparseMat> ldlt(S);
  if (ldlt.info() != Eigen::Success)
    throw SolverError("trace constant estimate: energy form factorization failed");

  std::normal_distribution<double> dist(0.0, 1.0);
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) x[i] = dist(rng);
  double xs = std::sqrt(x.dot(S * x));
  x /= xs;

  double lambda_prev = -1.0;
  for (int k = 1; k <= max_iter; ++k) {
    Eigen::VectorXd tx = T * x;
    double lambda = x.dot(tx);
    res.iterations = k;
    if (lambda < 1e-306) {  // started orthogonal to the range; reseed once
      for (int i = 0; i < n; ++i) x[i] = dist(rng);
      x /= std::sqrt(x.dot(S * x));
      continue;
    }
    if (std::abs(lambda - lambda_prev) <= tol * std::max(std::abs(lambda), 1e-306)) {
      res.lambda = lambda;
      return res;
    }
    lambda_prev = lambda;
    Eigen::VectorXd y = ldlt.solve(tx);
    double ys = std::sqrt(y.dot(S * y));
    if (ys < 1e-306) {
      res.lambda = 0.0;
      return res;
    }
    x = y / ys;
  }
  throw SolverError("trace constant estimate: power iteration did not converge after " +
                    std::to_string(max_iter) + " iterations");
}

}  // namespace

TraceConstants estimate_trace_constants(const Mesh& mesh, double tol, int max_iter, std::uint64_t seed) {
  TraceConstants tc;
  auto rng = make_rng(seed);

  SparseMat Tv = restrict_form_vector(mesh, assemble_form(FormKind::ContactTrace, mesh));
  SparseMat Sv = restrict_form_vector(mesh, assemble_form(FormKind::Energy, mesh));
  PowerResult rv = power_iteration_max(Tv, Sv, tol, max_iter, rng);
  tc.gamma_norm = std::sqrt(std::max(0.0, rv.lambda));
  tc.iterations_vector = rv.iterations;

  SparseMat Ts = restrict_form_scalar(mesh, assemble_form(FormKind::ContactTraceScalar, mesh));
  SparseMat Ss = restrict_form_scalar(mesh, assemble_form(FormKind::EnergyScalar, mesh));
  PowerResult rs = power_iteration_max(Ts, Ss, tol, max_iter, rng);
  tc.gamma_s_norm = std::sqrt(std::max(0.0, rs.lambda));
  tc.iterations_scalar = rs.iterations;

  return tc;
}

double dense_generalized_eig_max(const SparseMat& T, const SparseMat& S) {
  Eigen::MatrixXd Td = Eigen::MatrixXd(T);
  Eigen::MatrixXd Sd = Eigen::MatrixXd(S);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(Td, Sd);
  if (es.info() != Eigen::Success) throw SolverError("dense generalized eigensolver failed");
  return es.eigenvalues().maxCoeff();
}

RieszMap::RieszMap(const SparseMat& gram, bool lumped) : n_(static_cast<int>(gram.rows())), lumped_(lumped) {
  if (lumped_) {
    inv_diag_ = gram.diagonal();
    for (int i = 0; i < n_; ++i) {
      if (inv_diag_[i] <= 0.0) throw SolverError("RieszMap: nonpositive diagonal in lumped Gram matrix");
      inv_diag_[i] = 1.0 / inv_diag_[i];
    }
  } else {
    solver_ = std::make_shared<Eigen::SimplicialLDLT<SparseMat>>(gram);
    if (solver_->info() != Eigen::Success) throw SolverError("RieszMap: Gram matrix factorization failed");
  }
}

Eigen::VectorXd RieszMap::apply_inverse(const Eigen::VectorXd& eta) const {
  if (lumped_) return inv_diag_.cwiseProduct(eta);
  return solver_->solve(eta);
}

double RieszMap::dual_norm(const Eigen::VectorXd& eta) const {
  if (n_ == 0 || eta.size() == 0) return 0.0;
  return std::sqrt(std::max(0.0, eta.dot(apply_inverse(eta))));
}

}  // namespace hemicontact
