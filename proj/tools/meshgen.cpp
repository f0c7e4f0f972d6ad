// SPDX-License-Identifier: MIT

#include <CLI11.hpp>
#include <iostream>
#include <string>

#include "hemicontact/mesh.hpp"
#include "hemicontact/runtime.hpp"

namespace hc = hemicontact;

namespace {

hc::BoundaryTag tag_from(const std::string& s) {
  if (s == "D") return hc::BoundaryTag::Dirichlet;
  if (s == "N") return hc::BoundaryTag::Neumann;
  if (s == "C") return hc::BoundaryTag::Contact;
  throw hc::ValidationError("boundary tag must be D, N or C, got '" + s + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"structured unit-square mesh generator"};
  int n = 8;
  std::string out = "mesh.txt";
  std::string left = "D", right = "N", bottom = "C", top = "N";
  app.add_option("-n,--cells", n, "cells per side")->check(CLI::Range(1, 4096));
  app.add_option("-o,--out", out, "output mesh file");
  app.add_option("--left", left, "tag for x = 0");
  app.add_option("--right", right, "tag for x = 1");
  app.add_option("--bottom", bottom, "tag for y = 0");
  app.add_option("--top", top, "tag for y = 1");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    hc::SquareTags tags;
    tags.left = tag_from(left);
    tags.right = tag_from(right);
    tags.bottom = tag_from(bottom);
    tags.top = tag_from(top);
    const hc::Mesh mesh = hc::make_unit_square_mesh(n, tags);
    hc::save_mesh(mesh, out);
    std::cout << out << ": " << mesh.n_vertices() << " vertices, " << mesh.n_triangles()
              << " triangles, " << mesh.contact_vertices.size() << " contact vertices\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
