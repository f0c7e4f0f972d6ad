// SPDX-License-Identifier: MIT

#include "hemicontact/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "hemicontact/runtime.hpp"

namespace hemicontact {

namespace {

std::pair<int, int> sorted_edge(int a, int b) { return a < b ? std::pair{a, b} : std::pair{b, a}; }

const char* tag_name(BoundaryTag t) {
  switch (t) {
    case BoundaryTag::Dirichlet: return "D";
    case BoundaryTag::Neumann: return "N";
    default: return "C";
  }
}

}  // namespace

double Mesh::total_area() const {
  double a = 0.0;
  for (double t : tri_area) a += t;
  return a;
}

double Mesh::boundary_length(BoundaryTag tag) const {
  double l = 0.0;
  for (int e = 0; e < n_boundary_edges(); ++e)
    if (boundary_edges[e].tag == tag) l += edge_length[e];
  return l;
}

int Mesh::contact_index(int vertex) const {
  auto it = std::lower_bound(contact_vertices.begin(), contact_vertices.end(), vertex);
  if (it == contact_vertices.end() || *it != vertex) return -1;
  return static_cast<int>(it - contact_vertices.begin());
}

void Mesh::finalize(bool fix_orientation) {
  const int nv = n_vertices();
  const int nt = n_triangles();
  if (nv < 3 || nt < 1) throw ValidationError(name + ": mesh needs at least 3 vertices and 1 triangle");

  for (int t = 0; t < nt; ++t)
    for (int k = 0; k < 3; ++k) {
      int v = triangles[t][k];
      if (v < 0 || v >= nv)
        throw ValidationError(name + ": triangle " + std::to_string(t) + " references vertex " + std::to_string(v));
    }

  // Orientation and areas. Signed area > 0 means counterclockwise.
  tri_area.assign(nt, 0.0);
  tri_grad.assign(nt, Eigen::Matrix<double, 2, 3>::Zero());
  for (int t = 0; t < nt; ++t) {
    auto& tri = triangles[t];
    Eigen::Vector2d p0 = vertices[tri[0]], p1 = vertices[tri[1]], p2 = vertices[tri[2]];
    double twice = (p1.x() - p0.x()) * (p2.y() - p0.y()) - (p2.x() - p0.x()) * (p1.y() - p0.y());
    if (std::abs(twice) < 1e-300)
      throw ValidationError(name + ": triangle " + std::to_string(t) + " is degenerate (zero area)");
    if (twice < 0.0) {
      if (!fix_orientation)
        throw ValidationError(name + ": triangle " + std::to_string(t) + " has clockwise orientation");
      std::swap(tri[1], tri[2]);
      std::swap(p1, p2);
      twice = -twice;
    }
    tri_area[t] = 0.5 * twice;
    // Gradients of the nodal basis: grad lambda_i = rot(opposite edge)/(2A).
    Eigen::Matrix<double, 2, 3> g;
    g.col(0) = Eigen::Vector2d(p1.y() - p2.y(), p2.x() - p1.x());
    g.col(1) = Eigen::Vector2d(p2.y() - p0.y(), p0.x() - p2.x());
    g.col(2) = Eigen::Vector2d(p0.y() - p1.y(), p1.x() - p0.x());
    tri_grad[t] = g / twice;
  }

  // Topological boundary: edges adjacent to exactly one triangle.
  std::map<std::pair<int, int>, int> edge_tri;  // boundary candidate -> owner triangle
  for (int t = 0; t < nt; ++t)
    for (int k = 0; k < 3; ++k) {
      auto key = sorted_edge(triangles[t][k], triangles[t][(k + 1) % 3]);
      auto [it, inserted] = edge_tri.try_emplace(key, t);
      if (!inserted) it->second = -2;  // interior
    }
  std::map<std::pair<int, int>, int> boundary_owner;
  for (auto& [key, owner] : edge_tri)
    if (owner >= 0) boundary_owner.emplace(key, owner);

  // Tagged edges must cover the topological boundary exactly once.
  std::map<std::pair<int, int>, int> seen;
  for (int e = 0; e < n_boundary_edges(); ++e) {
    auto& be = boundary_edges[e];
    if (be.a < 0 || be.a >= nv || be.b < 0 || be.b >= nv || be.a == be.b)
      throw ValidationError(name + ": boundary edge " + std::to_string(e) + " has invalid vertices");
    auto key = sorted_edge(be.a, be.b);
    if (!boundary_owner.count(key))
      throw ValidationError(name + ": tagged edge (" + std::to_string(be.a) + "," + std::to_string(be.b) +
                            ") is not on the mesh boundary");
    if (!seen.emplace(key, e).second)
      throw ValidationError(name + ": boundary edge (" + std::to_string(be.a) + "," + std::to_string(be.b) +
                            ") tagged twice");
  }
  for (auto& [key, owner] : boundary_owner)
    if (!seen.count(key))
      throw ValidationError(name + ": boundary edge (" + std::to_string(key.first) + "," +
                            std::to_string(key.second) + ") carries no tag; boundary not covered");

  // Edge geometry: outward normals point away from the owning triangle.
  edge_length.assign(boundary_edges.size(), 0.0);
  edge_normal.assign(boundary_edges.size(), Eigen::Vector2d::Zero());
  edge_triangle.assign(boundary_edges.size(), -1);
  for (int e = 0; e < n_boundary_edges(); ++e) {
    auto& be = boundary_edges[e];
    int t = boundary_owner.at(sorted_edge(be.a, be.b));
    edge_triangle[e] = t;
    Eigen::Vector2d pa = vertices[be.a], pb = vertices[be.b];
    Eigen::Vector2d tangent = pb - pa;
    edge_length[e] = tangent.norm();
    Eigen::Vector2d n(tangent.y(), -tangent.x());
    Eigen::Vector2d centroid =
        (vertices[triangles[t][0]] + vertices[triangles[t][1]] + vertices[triangles[t][2]]) / 3.0;
    if (n.dot(centroid - 0.5 * (pa + pb)) > 0.0) n = -n;
    edge_normal[e] = n.normalized();
  }

  // Constraint closures.
  vertex_clamped.assign(nv, 0);
  vertex_thermal_bc.assign(nv, 0);
  double dirichlet_len = 0.0;
  for (int e = 0; e < n_boundary_edges(); ++e) {
    auto& be = boundary_edges[e];
    if (be.tag == BoundaryTag::Dirichlet) {
      vertex_clamped[be.a] = vertex_clamped[be.b] = 1;
      vertex_thermal_bc[be.a] = vertex_thermal_bc[be.b] = 1;
      dirichlet_len += edge_length[e];
    } else if (be.tag == BoundaryTag::Neumann) {
      vertex_thermal_bc[be.a] = vertex_thermal_bc[be.b] = 1;
    }
  }
  if (dirichlet_len <= 0.0) throw ValidationError(name + ": meas(Gamma_D) = 0 violates clamping");

  // Contact vertex data: lumped boundary masses and averaged outward normals.
  contact_vertices.clear();
  std::map<int, double> lumped;
  std::map<int, Eigen::Vector2d> nsum;
  for (int e = 0; e < n_boundary_edges(); ++e) {
    auto& be = boundary_edges[e];
    if (be.tag != BoundaryTag::Contact) continue;
    for (int v : {be.a, be.b}) {
      lumped[v] += 0.5 * edge_length[e];
      auto [it, ins] = nsum.try_emplace(v, Eigen::Vector2d::Zero());
      it->second += edge_normal[e] * edge_length[e];
    }
  }
  contact_weight.clear();
  contact_normal.clear();
  for (auto& [v, w] : lumped) {
    contact_vertices.push_back(v);
    contact_weight.push_back(w);
    Eigen::Vector2d n = nsum[v];
    double len = n.norm();
    if (len < 1e-14)
      throw ValidationError(name + ": contact vertex " + std::to_string(v) + " has no well-defined normal");
    contact_normal.push_back(n / len);
  }

  // Free DOF maps.
  vec_dof.assign(2 * nv, -1);
  scal_dof.assign(nv, -1);
  n_vec_dofs = 0;
  n_scal_dofs = 0;
  for (int v = 0; v < nv; ++v) {
    if (!vertex_clamped[v]) {
      vec_dof[2 * v] = n_vec_dofs++;
      vec_dof[2 * v + 1] = n_vec_dofs++;
    }
    if (!vertex_thermal_bc[v]) scal_dof[v] = n_scal_dofs++;
  }

  finalized = true;
}

Mesh parse_mesh(const std::string& text, const std::string& name, bool fix_orientation) {
  Mesh mesh;
  mesh.name = name;
  std::istringstream in(text);
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string kind;
    if (!(ls >> kind)) continue;
    if (kind == "v") {
      double x, y;
      if (!(ls >> x >> y)) throw ParseError(name, lineno, "expected 'v <x> <y>'");
      mesh.vertices.emplace_back(x, y);
    } else if (kind == "t") {
      int i, j, k;
      if (!(ls >> i >> j >> k)) throw ParseError(name, lineno, "expected 't <i> <j> <k>'");
      mesh.triangles.push_back({i, j, k});
    } else if (kind == "b") {
      int i, j;
      std::string tag;
      if (!(ls >> i >> j >> tag)) throw ParseError(name, lineno, "expected 'b <i> <j> <D|N|C>'");
      BoundaryEdge be;
      be.a = i;
      be.b = j;
      if (tag == "D")
        be.tag = BoundaryTag::Dirichlet;
      else if (tag == "N")
        be.tag = BoundaryTag::Neumann;
      else if (tag == "C")
        be.tag = BoundaryTag::Contact;
      else
        throw ParseError(name, lineno, "unknown boundary tag '" + tag + "' (want D, N or C)");
      mesh.boundary_edges.push_back(be);
    } else {
      throw ParseError(name, lineno, "unknown record '" + kind + "'");
    }
    std::string trailing;
    if (ls >> trailing) throw ParseError(name, lineno, "trailing tokens after record");
  }
  try {
    mesh.finalize(fix_orientation);
  } catch (const ValidationError& err) {
    throw ValidationError(std::string(err.what()));
  }
  return mesh;
}

Mesh load_mesh(const std::string& path, bool fix_orientation) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open mesh file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_mesh(ss.str(), path, fix_orientation);
}

void save_mesh(const Mesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write mesh file '" + path + "'");
  char buf[128];
  for (const auto& v : mesh.vertices) {
    std::snprintf(buf, sizeof buf, "v %.17g %.17g\n", v.x(), v.y());
    out << buf;
  }
  for (const auto& t : mesh.triangles) out << "t " << t[0] << " " << t[1] << " " << t[2] << "\n";
  for (const auto& e : mesh.boundary_edges)
    out << "b " << e.a << " " << e.b << " " << tag_name(e.tag) << "\n";
}

Mesh make_unit_square_mesh(int n, const SquareTags& tags) {
  if (n < 1) throw ValidationError("make_unit_square_mesh: n must be >= 1");
  Mesh mesh;
  mesh.name = "unit-square-" + std::to_string(n);
  const int m = n + 1;
  auto vid = [m](int i, int j) { return j * m + i; };
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < m; ++i) mesh.vertices.emplace_back(double(i) / n, double(j) / n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      mesh.triangles.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1)});
      mesh.triangles.push_back({vid(i, j), vid(i + 1, j + 1), vid(i, j + 1)});
    }
  for (int i = 0; i < n; ++i) {
    mesh.boundary_edges.push_back({vid(i, 0), vid(i + 1, 0), tags.bottom});
    mesh.boundary_edges.push_back({vid(i, n), vid(i + 1, n), tags.top});
  }
  for (int j = 0; j < n; ++j) {
    mesh.boundary_edges.push_back({vid(0, j), vid(0, j + 1), tags.left});
    mesh.boundary_edges.push_back({vid(n, j), vid(n, j + 1), tags.right});
  }
  mesh.finalize(true);
  return mesh;
}

void Field::apply_constraints() {
  const Mesh& m = *mesh;
  if (kind == FieldKind::VectorNodal) {
    for (int v = 0; v < m.n_vertices(); ++v)
      if (m.vertex_clamped[v]) values[2 * v] = values[2 * v + 1] = 0.0;
  } else {
    for (int v = 0; v < m.n_vertices(); ++v)
      if (m.vertex_thermal_bc[v]) values[v] = 0.0;
  }
}

double Field::max_constraint_violation() const {
  const Mesh& m = *mesh;
  double worst = 0.0;
  if (kind == FieldKind::VectorNodal) {
    for (int v = 0; v < m.n_vertices(); ++v)
      if (m.vertex_clamped[v])
        worst = std::max({worst, std::abs(values[2 * v]), std::abs(values[2 * v + 1])});
  } else {
    for (int v = 0; v < m.n_vertices(); ++v)
      if (m.vertex_thermal_bc[v]) worst = std::max(worst, std::abs(values[v]));
  }
  return worst;
}

}  // namespace hemicontact
