// SPDX-License-Identifier: MIT

#ifndef HEMICONTACT_SCENARIO_HPP
#define HEMICONTACT_SCENARIO_HPP

#include <Eigen/Core>
#include <optional>
#include <string>

#include "hemicontact/coupling.hpp"
#include "hemicontact/hvi.hpp"
#include "hemicontact/material.hpp"
#include "hemicontact/mesh.hpp"
#include "hemicontact/nonsmooth.hpp"

namespace hemicontact {

// Unit labels copied verbatim into every report numeric.
struct UnitSet {
  std::string length = "m";
  std::string time = "s";
  std::string temperature = "K";
  std::string force = "N";
  std::string energy = "J";
};

// --------------------------------------------------------------------------
// A fully parsed and validated problem description. The Scenario owns the
// mesh, material and laws a System points into, so it must outlive any
// System built from it. Loads are constant spatial densities scaled by
// piecewise-linear time modulations; initial data are nodal constants with
// the essential conditions enforced on top.
// --------------------------------------------------------------------------

struct Scenario {
  std::string name = "scenario";
  std::string description;
  std::string source_path;
  std::string source_text;  // verbatim file content, hashed into run_info

  Mesh mesh;
  MaterialModel material;
  std::optional<BoundaryLaw> law_normal;
  std::optional<BoundaryLaw> law_tangential;
  std::optional<BoundaryLaw> law_thermal;

  double epsilon_normal = 1e-6;
  double epsilon_tangential = 1e-6;
  double epsilon_thermal = 1e-6;

  Eigen::Vector2d f0 = Eigen::Vector2d::Zero();  // volume force density
  Modulation f0_mod;
  Eigen::Vector2d f1 = Eigen::Vector2d::Zero();  // traction on Gamma_N
  Modulation f1_mod;
  double heat_source = 0.0;  // volumetric heat source
  Modulation heat_mod;

  Eigen::Vector2d u0 = Eigen::Vector2d::Zero();
  Eigen::Vector2d v0 = Eigen::Vector2d::Zero();
  double theta0 = 0.0;

  TimeGrid grid;
  NewtonConfig newton;
  CouplingConfig coupling;
  double epsilon_start_scale = 1e-2;
  double velocity_scale = 1.0;
  UnitSet units;

  // Wires a System onto this scenario's storage and bakes the load vectors.
  // The returned System holds pointers into *this.
  System make_system() const;
};

// Dual vector of a constant volume force on the free displacement
// coordinates: integral of f0 . v over the domain.
Eigen::VectorXd assemble_volume_load(const Mesh& mesh, const Eigen::Vector2d& f0);

// Dual vector of a constant traction on the Neumann boundary: integral of
// f1 . v over Gamma_N with exact edgewise quadrature.
Eigen::VectorXd assemble_traction_load(const Mesh& mesh, const Eigen::Vector2d& f1);

// Scalar source on the free temperature coordinates.
Eigen::VectorXd assemble_scalar_load(const Mesh& mesh, double g);

// --------------------------------------------------------------------------
// Scenario text format: '#' comments, [section] headers, key = value lines.
// Sections: scenario, units, mesh, time, material, laws.normal,
// laws.tangential, laws.thermal, loads, initial, solver. Unknown sections or
// keys and duplicate non-repeatable keys are errors carrying file:line.
// --------------------------------------------------------------------------

Scenario parse_scenario_text(const std::string& text, const std::string& file_name,
                             const std::string& base_dir = std::string());
Scenario load_scenario(const std::string& path);

}  // namespace hemicontact

#endif
