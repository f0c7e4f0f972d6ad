// SPDX-License-Identifier: MIT

#ifndef HEMICONTACT_MESH_HPP
#define HEMICONTACT_MESH_HPP

#include <Eigen/Core>
#include <array>
#include <string>
#include <vector>

namespace hemicontact {

// Boundary decomposition: clamped part (D), traction part (N), contact part (C).
enum class BoundaryTag { Dirichlet, Neumann, Contact };

struct BoundaryEdge {
  int a = -1, b = -1;
  BoundaryTag tag = BoundaryTag::Neumann;
};

// Conforming triangle mesh of a plane domain with a tagged boundary.
// finalize() orients triangles counterclockwise, validates the boundary cover,
// and precomputes the geometry every assembly kernel uses.
struct Mesh {
  std::string name = "mesh";

  std::vector<Eigen::Vector2d> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<BoundaryEdge> boundary_edges;

  // Derived, filled by finalize().
  std::vector<double> tri_area;
  std::vector<Eigen::Matrix<double, 2, 3>> tri_grad;  // column i: gradient of basis i
  std::vector<double> edge_length;                    // per boundary edge
  std::vector<Eigen::Vector2d> edge_normal;           // outward unit normal per boundary edge
  std::vector<int> edge_triangle;                     // owning triangle per boundary edge

  std::vector<char> vertex_clamped;      // displacement constraint (closure of Gamma_D)
  std::vector<char> vertex_thermal_bc;   // temperature constraint (closure of Gamma_D u Gamma_N)
  std::vector<int> contact_vertices;     // sorted vertex ids on Gamma_C
  std::vector<double> contact_weight;    // lumped boundary mass per contact vertex
  std::vector<Eigen::Vector2d> contact_normal;  // unit outward normal per contact vertex

  // Free degree-of-freedom maps: >= 0 free index, -1 constrained.
  std::vector<int> vec_dof;   // size 2*nv, components interleaved (2v, 2v+1)
  std::vector<int> scal_dof;  // size nv
  int n_vec_dofs = 0;
  int n_scal_dofs = 0;

  bool finalized = false;

  int n_vertices() const { return static_cast<int>(vertices.size()); }
  int n_triangles() const { return static_cast<int>(triangles.size()); }
  int n_boundary_edges() const { return static_cast<int>(boundary_edges.size()); }

  double total_area() const;
  double boundary_length(BoundaryTag tag) const;
  int contact_index(int vertex) const;  // position in contact_vertices or -1

  // Validates and builds derived data. With fix_orientation, clockwise
  // triangles are reordered; otherwise they are rejected.
  void finalize(bool fix_orientation = true);
};

// Plain text mesh format, one record per line:
//   v <x> <y>          vertex
//   t <i> <j> <k>      triangle, 0-based vertex ids
//   b <i> <j> <TAG>    boundary edge, TAG in {D, N, C}
// '#' starts a comment. Errors carry file and line numbers.
Mesh load_mesh(const std::string& path, bool fix_orientation = true);
Mesh parse_mesh(const std::string& text, const std::string& name, bool fix_orientation = true);
void save_mesh(const Mesh& mesh, const std::string& path);

// Structured unit square, n x n cells split into 2n^2 triangles. Tags apply to
// the four sides (x=0, x=1, y=0, y=1).
struct SquareTags {
  BoundaryTag left = BoundaryTag::Dirichlet;
  BoundaryTag right = BoundaryTag::Neumann;
  BoundaryTag bottom = BoundaryTag::Contact;
  BoundaryTag top = BoundaryTag::Neumann;
};
Mesh make_unit_square_mesh(int n, const SquareTags& tags = {});

// --------------------------------------------------------------------------
// Nodal fields. Vector fields vanish on the clamped boundary, scalar fields on
// the full thermally constrained part; both are construction invariants that
// apply_constraints() enforces.
// --------------------------------------------------------------------------

enum class FieldKind { VectorNodal, ScalarNodal };

struct Field {
  const Mesh* mesh = nullptr;
  FieldKind kind = FieldKind::ScalarNodal;
  Eigen::VectorXd values;

  static Field vector(const Mesh& m) {
    Field f;
    f.mesh = &m;
    f.kind = FieldKind::VectorNodal;
    f.values = Eigen::VectorXd::Zero(2 * m.n_vertices());
    return f;
  }
  static Field scalar(const Mesh& m) {
    Field f;
    f.mesh = &m;
    f.kind = FieldKind::ScalarNodal;
    f.values = Eigen::VectorXd::Zero(m.n_vertices());
    return f;
  }

  int components() const { return kind == FieldKind::VectorNodal ? 2 : 1; }

  void apply_constraints();
  double max_constraint_violation() const;
};

}  // namespace hemicontact

#endif
