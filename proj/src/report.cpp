// SPDX-License-Identifier: MIT

#include "hemicontact/report.hpp"

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hemicontact/runtime.hpp"

namespace hemicontact {

namespace {

// Labels: physical trajectory quantities carry the declared units; model
// constants and dual norms are reported with "[-]" plus a reduced-units note
// in the header (unit mass density, unit heat capacity).
std::string underscored(std::string s) {
  for (char& c : s)
    if (c == ' ') c = '_';
  return s;
}

}  // namespace

std::string fmt_g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::uint64_t fnv1a_hash(const std::string& s) {
  std::uint64_t h = 14695981039346656037ull;
  for (const unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError(path + ": cannot open for writing");
  out << content;
  if (!out) throw ValidationError(path + ": write failed");
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path + ": cannot open");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string format_snapshot(const Mesh& mesh, const Field& u, const Field& v, const Field& theta,
                            int step, double t, const UnitSet& units) {
  const std::string L = "[" + units.length + "]";
  const std::string V = "[" + units.length + "/" + units.time + "]";
  const std::string K = "[" + units.temperature + "]";
  std::ostringstream out;
  out << "# hemicontact snapshot\n";
  out << "# step " << step << " t " << fmt_g(t) << " [" << units.time << "]\n";
  out << "# columns node x " << L << " y " << L << " ux " << L << " uy " << L << " vx " << V
      << " vy " << V << " theta " << K << "\n";
  for (int i = 0; i < mesh.n_vertices(); ++i) {
    out << "node " << i << " " << fmt_g(mesh.vertices[static_cast<size_t>(i)].x()) << " "
        << fmt_g(mesh.vertices[static_cast<size_t>(i)].y()) << " " << fmt_g(u.values[2 * i]) << " "
        << fmt_g(u.values[2 * i + 1]) << " " << fmt_g(v.values[2 * i]) << " "
        << fmt_g(v.values[2 * i + 1]) << " " << fmt_g(theta.values[i]) << "\n";
  }
  return out.str();
}

Snapshot parse_snapshot(const std::string& text, const std::string& file_name) {
  Snapshot snap;
  std::vector<std::array<double, 7>> rows;
  std::istringstream in(text);
  std::string line;
  long line_no = 0;
  bool have_step = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream h(line);
      std::string hash, key;
      h >> hash >> key;
      if (key == "step") {
        std::string tkey;
        if (!(h >> snap.step >> tkey >> snap.t) || tkey != "t")
          throw ParseError(file_name, line_no, "malformed step header");
        have_step = true;
      }
      continue;
    }
    std::istringstream r(line);
    std::string tag;
    int node = -1;
    std::array<double, 7> vals{};
    r >> tag >> node;
    for (double& v : vals) r >> v;
    if (!r || tag != "node")
      throw ParseError(file_name, line_no, "expected 'node <i> <x> <y> <values...>'");
    if (node != static_cast<int>(rows.size()))
      throw ParseError(file_name, line_no, "node rows must be consecutive from 0");
    rows.push_back(vals);
  }
  if (!have_step) throw ParseError(file_name + ": missing '# step' header");
  snap.columns.resize(static_cast<long>(rows.size()), 7);
  for (size_t i = 0; i < rows.size(); ++i)
    for (int c = 0; c < 7; ++c) snap.columns(static_cast<long>(i), c) = rows[i][static_cast<size_t>(c)];
  return snap;
}

Snapshot read_snapshot(const std::string& path) {
  return parse_snapshot(read_text_file(path), path);
}

std::string format_series(const Scenario& sc, const System& sys, const CoupledSolution& sol) {
  const UnitSet& u = sc.units;
  std::ostringstream out;
  out << "t [" << u.time << "],energy [" << u.energy << "],contact_dissipation [" << u.energy
      << "],thermal_energy [" << u.temperature << "^2 " << u.length << "^2],fp_iterations [-]\n";
  const TimeGrid& grid = sol.mech.grid;
  double dissipated = 0.0;
  for (int n = 0; n < grid.n_nodes(); ++n) {
    const double t = grid.time(n);
    dissipated += sol.mech.dissipation[static_cast<size_t>(n)];
    const double energy = mechanical_energy(sys, t, sol.mech.u[static_cast<size_t>(n)],
                                            sol.mech.v[static_cast<size_t>(n)]);
    const double th = l2_norm(sol.therm.theta[static_cast<size_t>(n)]);
    out << fmt_g(t) << "," << fmt_g(energy) << "," << fmt_g(dissipated) << ","
        << fmt_g(0.5 * th * th) << "," << sol.report.total_iterations << "\n";
  }
  return out.str();
}

std::string format_iterations(const IterationReport& report, const UnitSet& units) {
  (void)units;
  std::ostringstream out;
  out << "# hemicontact coupling iterations\n";
  out << "# model constants in reduced units: unit mass density, unit heat capacity\n";
  out << "# rho " << fmt_g(report.rho) << " [-]\n";
  out << "# fitted_contraction " << fmt_g(report.fitted_contraction) << " [-]\n";
  out << "# converged " << (report.converged ? 1 : 0) << "\n";
  out << "# final_distance " << fmt_g(report.final_distance) << " [-]\n";
  out << "# largest_ratio_node " << report.largest_ratio_node << "\n";
  out << "iteration [-],weighted_distance [-],ratio [-],p1_newton [-],p2_newton [-]\n";
  for (const IterationRow& row : report.rows)
    out << row.iteration << "," << fmt_g(row.distance) << "," << fmt_g(row.ratio) << ","
        << row.p1_newton << "," << row.p2_newton << "\n";
  return out.str();
}

std::string format_smallness(const SmallnessReport& report, const std::string& scenario_name,
                             const UnitSet& units) {
  std::ostringstream out;
  const std::string tr = "[" + units.length + "^1/2]";
  out << "# hemicontact smallness report\n";
  out << "# scenario " << scenario_name << "\n";
  out << "# model constants in reduced units: unit mass density, unit heat capacity\n";
  out << "constant m_A " << fmt_g(report.m_A) << " [-]\n";
  out << "constant alpha_A " << fmt_g(report.alpha_A) << " [-]\n";
  out << "constant m_nu " << fmt_g(report.m_nu) << " [-]\n";
  out << "constant m_tau " << fmt_g(report.m_tau) << " [-]\n";
  out << "constant c1_nu " << fmt_g(report.c1_nu) << " [-]\n";
  out << "constant c1_tau " << fmt_g(report.c1_tau) << " [-]\n";
  out << "constant m_K " << fmt_g(report.m_K) << " [-]\n";
  out << "constant alpha_K " << fmt_g(report.alpha_K) << " [-]\n";
  out << "constant m_0 " << fmt_g(report.m_0) << " [-]\n";
  out << "constant c1_th " << fmt_g(report.c1_th) << " [-]\n";
  out << "trace gamma " << fmt_g(report.trace.gamma_norm) << " " << tr << "\n";
  out << "trace gamma_s " << fmt_g(report.trace.gamma_s_norm) << " " << tr << "\n";
  out << "trace c_e_bar " << fmt_g(report.trace.c_e_bar) << " [-]\n";
  out << "trace c_e " << fmt_g(report.trace.c_e) << " [-]\n";
  out << "regular normal " << (report.regular_normal ? 1 : 0) << "\n";
  out << "regular tangential " << (report.regular_tangential ? 1 : 0) << "\n";
  out << "regular thermal " << (report.regular_thermal ? 1 : 0) << "\n";
  for (const SmallnessCondition& c : report.conditions)
    out << "condition " << underscored(c.name) << " left " << fmt_g(c.left) << " right "
        << fmt_g(c.right) << " margin " << fmt_g(c.margin) << " strict " << (c.strict ? 1 : 0)
        << " pass " << (c.pass ? 1 : 0) << "\n";
  out << "pass " << (report.pass ? 1 : 0) << "\n";
  return out.str();
}

std::string format_hypotheses(const HypothesisReport& report, const std::string& scenario_name,
                              const UnitSet& units) {
  (void)units;
  std::ostringstream out;
  out << "# hemicontact hypothesis audit\n";
  out << "# scenario " << scenario_name << "\n";
  out << "# model constants in reduced units: unit mass density, unit heat capacity\n";
  for (const HypothesisRow& row : report.rows) {
    out << "hypothesis " << underscored(row.name) << " claimed " << fmt_g(row.claimed)
        << " empirical " << fmt_g(row.empirical) << " samples " << row.samples << " pass "
        << (row.pass ? 1 : 0);
    if (!row.note.empty()) out << " note " << row.note;
    out << "\n";
  }
  out << "pass " << (report.pass ? 1 : 0) << "\n";
  return out.str();
}

std::string format_run_info(const Scenario& sc, const std::string& subcommand, std::uint64_t seed,
                            const std::string& flags) {
  std::ostringstream out;
  char hash[24];
  std::snprintf(hash, sizeof hash, "%016llx",
                static_cast<unsigned long long>(fnv1a_hash(sc.source_text + "\n" + flags)));
  out << "# hemicontact run info\n";
  out << "version " << version_string << "\n";
  out << "scenario " << sc.name << "\n";
  if (!sc.description.empty()) out << "description " << sc.description << "\n";
  out << "subcommand " << subcommand << "\n";
  out << "config_hash " << hash << "\n";
  out << "seed " << seed << "\n";
  out << "time_T " << fmt_g(sc.grid.T) << " [" << sc.units.time << "]\n";
  out << "time_steps " << sc.grid.n_steps << "\n";
  out << "mesh_vertices " << sc.mesh.n_vertices() << "\n";
  out << "mesh_triangles " << sc.mesh.n_triangles() << "\n";
  out << "mesh_boundary_edges " << sc.mesh.n_boundary_edges() << "\n";
  out << "mesh_contact_vertices " << sc.mesh.contact_vertices.size() << "\n";
  out << "workers " << worker_count() << "\n";
  out << "flags " << flags << "\n";
  return out.str();
}

void write_run_artifacts(const std::string& out_dir, const Scenario& sc, const System& sys,
                         const CoupledSolution& sol, const SmallnessReport& smallness,
                         const HypothesisReport& hypotheses, std::uint64_t seed,
                         const std::string& flags) {
  namespace fs = std::filesystem;
  const fs::path base(out_dir);
  fs::create_directories(base / "snapshots");
  const TimeGrid& grid = sol.mech.grid;
  for (int n = 0; n < grid.n_nodes(); ++n) {
    char name[32];
    std::snprintf(name, sizeof name, "step_%05d.txt", n);
    write_text_file((base / "snapshots" / name).string(),
                    format_snapshot(*sys.mesh, sol.mech.u[static_cast<size_t>(n)],
                                    sol.mech.v[static_cast<size_t>(n)],
                                    sol.therm.theta[static_cast<size_t>(n)], n, grid.time(n),
                                    sc.units));
  }
  write_text_file((base / "series.csv").string(), format_series(sc, sys, sol));
  write_text_file((base / "iterations.csv").string(), format_iterations(sol.report, sc.units));
  write_text_file((base / "smallness.txt").string(),
                  format_smallness(smallness, sc.name, sc.units));
  write_text_file((base / "hypotheses.txt").string(),
                  format_hypotheses(hypotheses, sc.name, sc.units));
  write_text_file((base / "run_info.txt").string(), format_run_info(sc, "run", seed, flags));
}

}  // namespace hemicontact
