// SPDX-License-Identifier: MIT

#include "hemicontact/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "hemicontact/runtime.hpp"

namespace hemicontact {

namespace {

std::string trim(const std::string& s) {
  const size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(item);
  return out;
}

double parse_number_at(const std::string& file, long line, const std::string& s) {
  const std::string t = trim(s);
  if (t.empty()) throw ParseError(file, line, "expected a number");
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size() || std::isnan(v))
    throw ParseError(file, line, "not a number: '" + t + "'");
  return v;
}

long parse_integer_at(const std::string& file, long line, const std::string& s) {
  const std::string t = trim(s);
  if (t.empty()) throw ParseError(file, line, "expected an integer");
  char* end = nullptr;
  const long v = std::strtol(t.c_str(), &end, 10);
  if (end != t.c_str() + t.size())
    throw ParseError(file, line, "not an integer: '" + t + "'");
  return v;
}

bool parse_flag_at(const std::string& file, long line, const std::string& s) {
  const std::string t = trim(s);
  if (t == "true" || t == "yes" || t == "1") return true;
  if (t == "false" || t == "no" || t == "0") return false;
  throw ParseError(file, line, "expected true or false, got '" + t + "'");
}

// Whitespace-separated number row.
std::vector<double> parse_numbers_at(const std::string& file, long line, const std::string& s) {
  std::vector<double> out;
  std::istringstream in(s);
  std::string tok;
  while (in >> tok) out.push_back(parse_number_at(file, line, tok));
  return out;
}

// Comma-separated number list.
std::vector<double> parse_list_at(const std::string& file, long line, const std::string& s) {
  std::vector<double> out;
  for (const std::string& part : split(s, ',')) {
    const std::string p = trim(part);
    if (!p.empty()) out.push_back(parse_number_at(file, line, p));
  }
  return out;
}

Modulation parse_modulation_at(const std::string& file, long line, const std::string& s) {
  std::vector<std::pair<double, double>> knots;
  for (const std::string& part : split(s, ',')) {
    const std::string p = trim(part);
    if (p.empty()) continue;
    const size_t colon = p.find(':');
    if (colon == std::string::npos)
      throw ParseError(file, line, "modulation knots are 'time:value' pairs, got '" + p + "'");
    knots.emplace_back(parse_number_at(file, line, p.substr(0, colon)),
                       parse_number_at(file, line, p.substr(colon + 1)));
  }
  if (knots.empty()) throw ParseError(file, line, "empty modulation");
  try {
    return Modulation(std::move(knots));
  } catch (const ValidationError& err) {
    throw ParseError(file, line, err.what());
  }
}

BoundaryTag parse_tag_at(const std::string& file, long line, const std::string& s) {
  const std::string t = trim(s);
  if (t == "D") return BoundaryTag::Dirichlet;
  if (t == "N") return BoundaryTag::Neumann;
  if (t == "C") return BoundaryTag::Contact;
  throw ParseError(file, line, "boundary tag must be D, N or C, got '" + t + "'");
}

struct RawEntry {
  std::string key, value;
  long line = 0;
  bool used = false;
};

struct RawSection {
  std::string name;
  long line = 0;
  std::vector<RawEntry> entries;
  bool used = false;
};

std::vector<RawSection> tokenize(const std::string& text, const std::string& file) {
  std::vector<RawSection> sections;
  std::istringstream in(text);
  std::string raw;
  long line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = raw;
    const size_t hash = s.find('#');
    if (hash != std::string::npos) s.erase(hash);
    s = trim(s);
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']')
        throw ParseError(file, line, "malformed section header '" + s + "'");
      const std::string name = trim(s.substr(1, s.size() - 2));
      if (name.empty()) throw ParseError(file, line, "empty section name");
      for (const auto& sec : sections)
        if (sec.name == name) throw ParseError(file, line, "duplicate section [" + name + "]");
      sections.push_back({name, line, {}, false});
      continue;
    }
    const size_t eq = s.find('=');
    if (eq == std::string::npos)
      throw ParseError(file, line, "expected 'key = value', got '" + s + "'");
    if (sections.empty()) throw ParseError(file, line, "key before the first [section]");
    RawEntry e;
    e.key = trim(s.substr(0, eq));
    e.value = trim(s.substr(eq + 1));
    e.line = line;
    if (e.key.empty()) throw ParseError(file, line, "empty key");
    sections.back().entries.push_back(std::move(e));
  }
  return sections;
}

// Typed access to one section; tracks key consumption so finish() can reject
// unknown keys with their line numbers. A null section reads as all-defaults.
class SectionReader {
 public:
  SectionReader(const std::string& file, RawSection* sec) : file_(file), sec_(sec) {
    if (sec_) sec_->used = true;
  }

  bool present() const { return sec_ != nullptr; }
  long line() const { return sec_ ? sec_->line : 0; }
  const std::string& file() const { return file_; }

  RawEntry* find(const std::string& key) {
    if (!sec_) return nullptr;
    RawEntry* hit = nullptr;
    for (auto& e : sec_->entries) {
      if (e.key != key) continue;
      if (hit) throw ParseError(file_, e.line, "duplicate key '" + key + "'");
      e.used = true;
      hit = &e;
    }
    return hit;
  }

  std::vector<RawEntry*> find_all(const std::string& key) {
    std::vector<RawEntry*> out;
    if (!sec_) return out;
    for (auto& e : sec_->entries)
      if (e.key == key) {
        e.used = true;
        out.push_back(&e);
      }
    return out;
  }

  std::string text(const std::string& key, const std::string& fallback) {
    const RawEntry* e = find(key);
    return e ? e->value : fallback;
  }

  double number(const std::string& key, double fallback) {
    const RawEntry* e = find(key);
    return e ? parse_number_at(file_, e->line, e->value) : fallback;
  }

  int integer(const std::string& key, int fallback) {
    const RawEntry* e = find(key);
    if (!e) return fallback;
    const long v = parse_integer_at(file_, e->line, e->value);
    if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
      throw ParseError(file_, e->line, "integer out of range");
    return static_cast<int>(v);
  }

  bool flag(const std::string& key, bool fallback) {
    const RawEntry* e = find(key);
    return e ? parse_flag_at(file_, e->line, e->value) : fallback;
  }

  Modulation modulation(const std::string& key) {
    const RawEntry* e = find(key);
    return e ? parse_modulation_at(file_, e->line, e->value) : Modulation();
  }

  std::vector<double> list(const std::string& key) {
    const RawEntry* e = find(key);
    return e ? parse_list_at(file_, e->line, e->value) : std::vector<double>();
  }

  Eigen::Vector2d vec2(const std::string& key, const Eigen::Vector2d& fallback) {
    const RawEntry* e = find(key);
    if (!e) return fallback;
    const auto v = parse_numbers_at(file_, e->line, e->value);
    if (v.size() != 2)
      throw ParseError(file_, e->line, "'" + key + "' needs two components");
    return {v[0], v[1]};
  }

  void finish() {
    if (!sec_) return;
    for (const auto& e : sec_->entries)
      if (!e.used)
        throw ParseError(file_, e.line, "unknown key '" + e.key + "' in [" + sec_->name + "]");
  }

 private:
  const std::string& file_;
  RawSection* sec_;
};

Mesh parse_mesh_section(SectionReader& r, const std::string& base_dir) {
  RawEntry* file_entry = r.find("file");
  RawEntry* square = r.find("square");
  if ((file_entry != nullptr) == (square != nullptr))
    throw ParseError(r.file(), r.line(), "[mesh] needs exactly one of 'file' or 'square'");
  if (square) {
    const long n = parse_integer_at(r.file(), square->line, square->value);
    if (n < 1 || n > 4096)
      throw ParseError(r.file(), square->line, "square cell count out of range");
    SquareTags tags;
    if (RawEntry* e = r.find("left")) tags.left = parse_tag_at(r.file(), e->line, e->value);
    if (RawEntry* e = r.find("right")) tags.right = parse_tag_at(r.file(), e->line, e->value);
    if (RawEntry* e = r.find("bottom")) tags.bottom = parse_tag_at(r.file(), e->line, e->value);
    if (RawEntry* e = r.find("top")) tags.top = parse_tag_at(r.file(), e->line, e->value);
    return make_unit_square_mesh(static_cast<int>(n), tags);
  }
  std::filesystem::path p(file_entry->value);
  if (p.is_relative() && !base_dir.empty()) p = std::filesystem::path(base_dir) / p;
  return load_mesh(p.string());
}

void parse_material_section(SectionReader& r, MaterialModel& m) {
  m.viscosity.two_mu = 2.0 * r.number("viscosity_mu", 0.0);
  m.viscosity.lambda = r.number("viscosity_lambda", 0.0);
  m.viscosity.sat = r.number("viscosity_sat", 0.0);
  m.viscosity.mod = r.modulation("viscosity_mod");

  m.elasticity.two_mu = 2.0 * r.number("elasticity_mu", 0.0);
  m.elasticity.lambda = r.number("elasticity_lambda", 0.0);
  m.elasticity.sat = r.number("elasticity_sat", 0.0);
  m.elasticity.mod = r.modulation("elasticity_mod");

  const auto gs = r.list("memory_g");
  const auto taus = r.list("memory_tau");
  const auto lams = r.list("memory_lambda");
  if (taus.size() != gs.size())
    throw ParseError(r.file(), r.line(), "memory_g and memory_tau must have equal length");
  if (!lams.empty() && lams.size() != gs.size())
    throw ParseError(r.file(), r.line(), "memory_lambda length must match memory_g");
  for (size_t i = 0; i < gs.size(); ++i)
    m.memory.push_back({gs[i], taus[i], lams.empty() ? 0.0 : lams[i]});

  m.expansion.c_exp = r.number("expansion_coeff", 0.0);
  m.expansion.sat_scale = r.number("expansion_sat_scale", 0.0);
  m.expansion.mod = r.modulation("expansion_mod");

  m.conductivity.k = r.number("conductivity_k", 1.0);
  m.conductivity.sat = r.number("conductivity_sat", 0.0);
  m.conductivity.mod = r.modulation("conductivity_mod");

  if (RawEntry* e = r.find("coupling_c")) {
    const auto v = parse_numbers_at(r.file(), e->line, e->value);
    if (v.size() != 3)
      throw ParseError(r.file(), e->line, "coupling_c needs 'c11 c12 c22'");
    m.heat_coupling.c = SymTensor::zero(2);
    m.heat_coupling.c.at(0, 0) = v[0];
    m.heat_coupling.c.at(0, 1) = v[1];
    m.heat_coupling.c.at(1, 0) = v[1];
    m.heat_coupling.c.at(1, 1) = v[2];
  }
  m.heat_coupling.mod = r.modulation("coupling_mod");

  m.heating.lambda = r.number("heating_lambda", 0.0);
  m.heating.mod = r.modulation("heating_mod");
}

void parse_law_section(SectionReader& r, const std::string& section, LawRole role,
                       std::optional<BoundaryLaw>& law, double& eps_floor) {
  if (!r.present()) return;
  RawEntry* type_entry = r.find("type");
  if (!type_entry)
    throw ParseError(r.file(), r.line(), "[" + section + "] needs 'type = none|builtin|custom'");
  const std::string type = trim(type_entry->value);

  eps_floor = r.number("epsilon", eps_floor);
  if (type == "none") {
    r.finish();
    return;
  }

  if (type == "builtin") {
    RawEntry* which = r.find("builtin");
    if (!which)
      throw ParseError(r.file(), r.line(), "builtin law needs 'builtin = <name>'");
    try {
      law = make_builtin_law(trim(which->value), role);
    } catch (const ValidationError& err) {
      throw ParseError(r.file(), which->line, err.what());
    }
  } else if (type == "custom") {
    std::vector<double> breaks;
    if (RawEntry* e = r.find("breakpoints")) breaks = parse_numbers_at(r.file(), e->line, e->value);
    const auto piece_entries = r.find_all("piece");
    if (piece_entries.empty())
      throw ParseError(r.file(), r.line(), "custom law needs one 'piece' row per interval");
    std::vector<std::vector<double>> pieces;
    for (const RawEntry* e : piece_entries)
      pieces.push_back(parse_numbers_at(r.file(), e->line, e->value));
    PiecewiseDensity density;
    try {
      density = PiecewiseDensity(std::move(breaks), std::move(pieces));
    } catch (const ValidationError& err) {
      throw ParseError(r.file(), r.line(), err.what());
    }
    for (const RawEntry* e : r.find_all("point_value")) {
      const size_t colon = e->value.find(':');
      if (colon == std::string::npos)
        throw ParseError(r.file(), e->line, "point_value rows are 'x : value'");
      try {
        density.set_point_value(parse_number_at(r.file(), e->line, e->value.substr(0, colon)),
                                parse_number_at(r.file(), e->line, e->value.substr(colon + 1)));
      } catch (const ValidationError& err) {
        throw ParseError(r.file(), e->line, err.what());
      }
    }
    law = BoundaryLaw{};
    law->role = role;
    law->density = std::move(density);
    switch (role) {
      case LawRole::Normal: law->name = "normal"; break;
      case LawRole::Tangential: law->name = "tangential"; break;
      case LawRole::Thermal: law->name = "thermal"; break;
    }
  } else {
    throw ParseError(r.file(), type_entry->line, "law type must be none, builtin or custom");
  }

  law->name = r.text("name", law->name);
  law->c0 = r.number("c0", law->c0);
  law->c1 = r.number("c1", law->c1);
  law->m_relaxed = r.number("m", law->m_relaxed);
  if (RawEntry* e = r.find("regular")) {
    const std::string v = trim(e->value);
    if (v == "yes" || v == "true")
      law->declared_regularity = Regularity::Regular;
    else if (v == "minus")
      law->declared_regularity = Regularity::MinusRegular;
    else if (v == "no" || v == "false" || v == "unknown")
      law->declared_regularity = Regularity::Unknown;
    else
      throw ParseError(r.file(), e->line, "regular must be yes, no, minus or unknown");
  }
  if (RawEntry* e = r.find("mod"))
    law->mod = parse_modulation_at(r.file(), e->line, e->value);
  r.finish();
}

}  // namespace

Eigen::VectorXd assemble_volume_load(const Mesh& mesh, const Eigen::Vector2d& f0) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(mesh.n_vec_dofs);
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const double w = mesh.tri_area[static_cast<size_t>(t)] / 3.0;
    for (int a = 0; a < 3; ++a) {
      const int v = mesh.triangles[static_cast<size_t>(t)][static_cast<size_t>(a)];
      for (int k = 0; k < 2; ++k) {
        const int dof = mesh.vec_dof[static_cast<size_t>(2 * v + k)];
        if (dof >= 0) out[dof] += w * f0[k];
      }
    }
  }
  return out;
}

Eigen::VectorXd assemble_traction_load(const Mesh& mesh, const Eigen::Vector2d& f1) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(mesh.n_vec_dofs);
  for (int e = 0; e < mesh.n_boundary_edges(); ++e) {
    const BoundaryEdge& edge = mesh.boundary_edges[static_cast<size_t>(e)];
    if (edge.tag != BoundaryTag::Neumann) continue;
    const double w = 0.5 * mesh.edge_length[static_cast<size_t>(e)];
    for (const int v : {edge.a, edge.b})
      for (int k = 0; k < 2; ++k) {
        const int dof = mesh.vec_dof[static_cast<size_t>(2 * v + k)];
        if (dof >= 0) out[dof] += w * f1[k];
      }
  }
  return out;
}

Eigen::VectorXd assemble_scalar_load(const Mesh& mesh, double g) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(mesh.n_scal_dofs);
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const double w = mesh.tri_area[static_cast<size_t>(t)] / 3.0;
    for (int a = 0; a < 3; ++a) {
      const int v = mesh.triangles[static_cast<size_t>(t)][static_cast<size_t>(a)];
      const int dof = mesh.scal_dof[static_cast<size_t>(v)];
      if (dof >= 0) out[dof] += w * g;
    }
  }
  return out;
}

System Scenario::make_system() const {
  System sys;
  sys.mesh = &mesh;
  sys.material = &material;
  sys.law_normal = law_normal ? &*law_normal : nullptr;
  sys.law_tangential = law_tangential ? &*law_tangential : nullptr;
  sys.law_thermal = law_thermal ? &*law_thermal : nullptr;

  sys.load_mech = [F0 = assemble_volume_load(mesh, f0), F1 = assemble_traction_load(mesh, f1),
                   m0 = f0_mod, m1 = f1_mod](double t) {
    return Eigen::VectorXd(m0(t) * F0 + m1(t) * F1);
  };
  sys.load_heat = [G = assemble_scalar_load(mesh, heat_source), mg = heat_mod](double t) {
    return Eigen::VectorXd(mg(t) * G);
  };

  sys.u0 = Field::vector(mesh);
  sys.v0 = Field::vector(mesh);
  sys.theta0 = Field::scalar(mesh);
  for (int v = 0; v < mesh.n_vertices(); ++v) {
    for (int k = 0; k < 2; ++k) {
      sys.u0.values[2 * v + k] = u0[k];
      sys.v0.values[2 * v + k] = v0[k];
    }
    sys.theta0.values[v] = theta0;
  }
  sys.u0.apply_constraints();
  sys.v0.apply_constraints();
  sys.theta0.apply_constraints();

  sys.epsilon_normal = epsilon_normal;
  sys.epsilon_tangential = epsilon_tangential;
  sys.epsilon_thermal = epsilon_thermal;
  sys.epsilon_start_scale = epsilon_start_scale;
  sys.velocity_scale = velocity_scale;
  sys.newton = newton;
  sys.validate();
  return sys;
}

Scenario parse_scenario_text(const std::string& text, const std::string& file_name,
                             const std::string& base_dir) {
  Scenario sc;
  sc.source_text = text;
  sc.source_path = file_name;
  sc.name = std::filesystem::path(file_name).stem().string();
  if (sc.name.empty()) sc.name = "scenario";

  auto sections = tokenize(text, file_name);
  auto section = [&sections](const std::string& name) -> RawSection* {
    for (auto& s : sections)
      if (s.name == name) return &s;
    return nullptr;
  };

  {
    SectionReader r(file_name, section("scenario"));
    sc.name = r.text("name", sc.name);
    sc.description = r.text("description", "");
    r.finish();
  }
  {
    SectionReader r(file_name, section("units"));
    sc.units.length = r.text("length", sc.units.length);
    sc.units.time = r.text("time", sc.units.time);
    sc.units.temperature = r.text("temperature", sc.units.temperature);
    sc.units.force = r.text("force", sc.units.force);
    sc.units.energy = r.text("energy", sc.units.energy);
    r.finish();
  }
  {
    RawSection* ms = section("mesh");
    if (!ms) throw ParseError(file_name + ": missing required section [mesh]");
    SectionReader r(file_name, ms);
    sc.mesh = parse_mesh_section(r, base_dir);
    r.finish();
  }
  {
    SectionReader r(file_name, section("time"));
    sc.grid.T = r.number("T", sc.grid.T);
    sc.grid.n_steps = r.integer("steps", sc.grid.n_steps);
    r.finish();
    sc.grid.validate();
  }
  {
    SectionReader r(file_name, section("material"));
    parse_material_section(r, sc.material);
    r.finish();
  }
  {
    SectionReader r(file_name, section("laws.normal"));
    parse_law_section(r, "laws.normal", LawRole::Normal, sc.law_normal, sc.epsilon_normal);
  }
  {
    SectionReader r(file_name, section("laws.tangential"));
    parse_law_section(r, "laws.tangential", LawRole::Tangential, sc.law_tangential,
                      sc.epsilon_tangential);
  }
  {
    SectionReader r(file_name, section("laws.thermal"));
    parse_law_section(r, "laws.thermal", LawRole::Thermal, sc.law_thermal, sc.epsilon_thermal);
  }
  {
    SectionReader r(file_name, section("loads"));
    sc.f0 = r.vec2("f0", sc.f0);
    sc.f0_mod = r.modulation("f0_mod");
    sc.f1 = r.vec2("f1", sc.f1);
    sc.f1_mod = r.modulation("f1_mod");
    sc.heat_source = r.number("g", sc.heat_source);
    sc.heat_mod = r.modulation("g_mod");
    r.finish();
  }
  {
    SectionReader r(file_name, section("initial"));
    sc.u0 = r.vec2("u0", sc.u0);
    sc.v0 = r.vec2("v0", sc.v0);
    sc.theta0 = r.number("theta0", sc.theta0);
    r.finish();
  }
  {
    SectionReader r(file_name, section("solver"));
    sc.newton.abs_tol = r.number("newton_abs_tol", sc.newton.abs_tol);
    sc.newton.rel_tol = r.number("newton_rel_tol", sc.newton.rel_tol);
    sc.newton.max_iterations = r.integer("newton_max_iterations", sc.newton.max_iterations);
    sc.newton.max_backtracks = r.integer("newton_max_backtracks", sc.newton.max_backtracks);
    sc.newton.cg_tol = r.number("cg_tol", sc.newton.cg_tol);
    sc.newton.dense_threshold = r.integer("dense_threshold", sc.newton.dense_threshold);
    sc.epsilon_start_scale = r.number("epsilon_start_scale", sc.epsilon_start_scale);
    sc.velocity_scale = r.number("velocity_scale", sc.velocity_scale);
    sc.coupling.tolerance = r.number("fp_tolerance", sc.coupling.tolerance);
    sc.coupling.max_iterations = r.integer("fp_max_iterations", sc.coupling.max_iterations);
    if (RawEntry* e = r.find("rho"))
      sc.coupling.rho = trim(e->value) == "auto" ? -1.0
                                                 : parse_number_at(file_name, e->line, e->value);
    sc.coupling.lumped_riesz = r.flag("lumped_riesz", sc.coupling.lumped_riesz);
    sc.coupling.force = r.flag("force", sc.coupling.force);
    r.finish();
  }

  for (const auto& s : sections)
    if (!s.used) throw ParseError(file_name, s.line, "unknown section [" + s.name + "]");

  sc.material.derive_declared(0.0, sc.grid.T);
  sc.material.validate();
  if (sc.law_normal) sc.law_normal->validate();
  if (sc.law_tangential) sc.law_tangential->validate();
  if (sc.law_thermal) sc.law_thermal->validate();
  if (sc.epsilon_normal <= 0.0 || sc.epsilon_tangential <= 0.0 || sc.epsilon_thermal <= 0.0)
    throw ValidationError(sc.name + ": smoothing widths must be positive");
  if (sc.epsilon_start_scale <= 0.0 || sc.velocity_scale <= 0.0)
    throw ValidationError(sc.name + ": continuation scales must be positive");
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path + ": cannot open scenario file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario_text(buf.str(), path, std::filesystem::path(path).parent_path().string());
}

}  // namespace hemicontact
