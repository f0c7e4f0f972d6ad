// SPDX-License-Identifier: MIT

#ifndef HEMICONTACT_REPORT_HPP
#define HEMICONTACT_REPORT_HPP

#include <Eigen/Core>
#include <cstdint>
#include <string>

#include "hemicontact/coupling.hpp"
#include "hemicontact/material.hpp"
#include "hemicontact/scenario.hpp"

namespace hemicontact {

// All writers print doubles with %.17g so artifacts round-trip bit-exactly
// and are byte-stable across runs; none of them emit timestamps.

// Shortest representation that parses back to the same double.
std::string fmt_g(double v);

// 64-bit FNV-1a, used for the provenance hash over scenario text plus flags.
std::uint64_t fnv1a_hash(const std::string& s);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

// --------------------------------------------------------------------------
// Nodal snapshot: header lines, then one 'node <i> <x> <y> <ux uy vx vy th>'
// row per vertex.
// --------------------------------------------------------------------------

struct Snapshot {
  int step = 0;
  double t = 0.0;
  Eigen::MatrixXd columns;  // n_vertices rows: x y ux uy vx vy theta
};

std::string format_snapshot(const Mesh& mesh, const Field& u, const Field& v, const Field& theta,
                            int step, double t, const UnitSet& units);
Snapshot parse_snapshot(const std::string& text, const std::string& file_name);
Snapshot read_snapshot(const std::string& path);

// --------------------------------------------------------------------------
// Text reports. Each returns the full file content; the CLI both prints and
// writes them.
// --------------------------------------------------------------------------

// CSV per time node: t, mechanical energy, cumulative contact dissipation,
// thermal energy, coupling iteration count.
std::string format_series(const Scenario& sc, const System& sys, const CoupledSolution& sol);

// CSV per coupling iteration: weighted distance, ratio, Newton totals.
std::string format_iterations(const IterationReport& report, const UnitSet& units);

// Parseable 'constant', 'trace' and 'condition' rows; spaces in names are
// replaced by underscores so every row splits on whitespace.
std::string format_smallness(const SmallnessReport& report, const std::string& scenario_name,
                             const UnitSet& units);

std::string format_hypotheses(const HypothesisReport& report, const std::string& scenario_name,
                              const UnitSet& units);

std::string format_run_info(const Scenario& sc, const std::string& subcommand, std::uint64_t seed,
                            const std::string& flags);

// Writes the five artifact classes of one run under out_dir: snapshots/,
// series.csv, iterations.csv, smallness.txt, hypotheses.txt, run_info.txt.
void write_run_artifacts(const std::string& out_dir, const Scenario& sc, const System& sys,
                         const CoupledSolution& sol, const SmallnessReport& smallness,
                         const HypothesisReport& hypotheses, std::uint64_t seed,
                         const std::string& flags);

}  // namespace hemicontact

#endif
