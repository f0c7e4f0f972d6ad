// SPDX-License-Identifier: MIT

#include <CLI11.hpp>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "hemicontact/coupling.hpp"
#include "hemicontact/manufactured.hpp"
#include "hemicontact/report.hpp"
#include "hemicontact/runtime.hpp"
#include "hemicontact/scenario.hpp"

namespace hc = hemicontact;

namespace {

// Exit codes: 0 ok, 2 parse/input, 3 hypothesis or smallness failure,
// 4 solver failure.
constexpr int kExitParse = 2;
constexpr int kExitHypothesis = 3;
constexpr int kExitSolver = 4;

struct CommonOpts {
  std::string scenario;
  std::string out;
  std::uint64_t seed = 2024;
  double dt_override = 0.0;
  double epsilon_floor = 0.0;
  bool force = false;
  int threads = 0;
};

void add_common(CLI::App* sub, CommonOpts& o, bool with_scenario = true) {
  if (with_scenario)
    sub->add_option("scenario", o.scenario, "scenario file")->required();
  sub->add_option("--out", o.out, "artifacts directory");
  sub->add_option("--seed", o.seed, "seed for sampling-based checks");
  sub->add_option("--dt-override", o.dt_override, "replace the step size, keeping the horizon");
  sub->add_option("--epsilon-floor", o.epsilon_floor, "override all three smoothing floors");
  sub->add_flag("--force", o.force, "proceed past smallness failures");
  sub->add_option("--threads", o.threads, "cap the worker count");
}

// Applies overrides to the scenario and returns the canonical flag summary
// hashed into run_info. The artifacts directory is excluded so runs into
// different directories stay byte-identical.
std::string apply_overrides(hc::Scenario& sc, const CommonOpts& o) {
  std::ostringstream flags;
  flags << "--seed " << o.seed;
  if (o.dt_override != 0.0) {
    if (!(o.dt_override > 0.0)) throw hc::ValidationError("dt override must be positive");
    const long steps = std::lround(sc.grid.T / o.dt_override);
    if (steps < 1) throw hc::ValidationError("dt override larger than the time horizon");
    sc.grid.n_steps = static_cast<int>(steps);
    sc.grid.validate();
    flags << " --dt-override " << hc::fmt_g(o.dt_override);
  }
  if (o.epsilon_floor != 0.0) {
    if (!(o.epsilon_floor > 0.0)) throw hc::ValidationError("epsilon floor must be positive");
    sc.epsilon_normal = o.epsilon_floor;
    sc.epsilon_tangential = o.epsilon_floor;
    sc.epsilon_thermal = o.epsilon_floor;
    flags << " --epsilon-floor " << hc::fmt_g(o.epsilon_floor);
  }
  if (o.force) {
    sc.coupling.force = true;
    flags << " --force";
  }
  if (o.threads != 0) {
    if (o.threads < 1) throw hc::ValidationError("thread cap must be at least 1");
    hc::set_worker_count(o.threads);
  }
  return flags.str();
}

int do_run(const CommonOpts& o) {
  hc::Scenario sc = hc::load_scenario(o.scenario);
  const std::string flags = apply_overrides(sc, o);
  const hc::System sys = sc.make_system();

  const hc::TraceConstants trace = hc::estimate_trace_constants(sc.mesh);
  const hc::SmallnessReport small = hc::check_smallness(sys, sc.grid, trace);
  const hc::HypothesisReport hyp =
      hc::check_hypotheses(sc.material, 10000, o.seed, 0.0, sc.grid.T);
  std::cout << "scenario " << sc.name << ": hypotheses " << (hyp.pass ? "pass" : "FAIL")
            << ", smallness " << (small.pass ? "pass" : "FAIL") << "\n";
  if (!hyp.pass) {
    std::cout << hc::format_hypotheses(hyp, sc.name, sc.units);
    return kExitHypothesis;
  }
  if (!small.pass) {
    std::cout << hc::format_smallness(small, sc.name, sc.units);
    if (!sc.coupling.force) {
      std::cout << "smallness conditions failed; pass --force to run anyway\n";
      return kExitHypothesis;
    }
    std::cout << "smallness conditions failed; continuing under --force\n";
  }

  const hc::CoupledSolution sol = hc::fixed_point_solve(sys, sc.grid, sc.coupling);
  const std::string out = o.out.empty() ? "out" : o.out;
  hc::write_run_artifacts(out, sc, sys, sol, small, hyp, o.seed, flags);
  std::cout << "coupling " << (sol.report.converged ? "converged" : "STALLED") << " after "
            << sol.report.total_iterations << " iterations, final weighted distance "
            << hc::fmt_g(sol.report.final_distance) << " [-]\n";
  std::cout << "artifacts written to " << out << "\n";
  return sol.report.converged ? 0 : kExitSolver;
}

int do_check_hypotheses(const CommonOpts& o) {
  hc::Scenario sc = hc::load_scenario(o.scenario);
  const std::string flags = apply_overrides(sc, o);
  const hc::HypothesisReport rep =
      hc::check_hypotheses(sc.material, 10000, o.seed, 0.0, sc.grid.T);
  std::cout << hc::format_hypotheses(rep, sc.name, sc.units);
  if (!o.out.empty()) {
    std::filesystem::create_directories(o.out);
    hc::write_text_file(o.out + "/hypotheses.txt", hc::format_hypotheses(rep, sc.name, sc.units));
    hc::write_text_file(o.out + "/run_info.txt",
                        hc::format_run_info(sc, "check-hypotheses", o.seed, flags));
  }
  return rep.pass ? 0 : kExitHypothesis;
}

int do_check_smallness(const CommonOpts& o) {
  hc::Scenario sc = hc::load_scenario(o.scenario);
  const std::string flags = apply_overrides(sc, o);
  const hc::System sys = sc.make_system();
  const hc::TraceConstants trace = hc::estimate_trace_constants(sc.mesh);
  const hc::SmallnessReport rep = hc::check_smallness(sys, sc.grid, trace);
  std::cout << hc::format_smallness(rep, sc.name, sc.units);
  if (!o.out.empty()) {
    std::filesystem::create_directories(o.out);
    hc::write_text_file(o.out + "/smallness.txt", hc::format_smallness(rep, sc.name, sc.units));
    hc::write_text_file(o.out + "/run_info.txt",
                        hc::format_run_info(sc, "check-smallness", o.seed, flags));
  }
  return rep.pass ? 0 : kExitHypothesis;
}

int do_contraction_study(const CommonOpts& o, const std::string& constant,
                         const std::string& scales_csv) {
  hc::Scenario base = hc::load_scenario(o.scenario);
  const std::string flags = apply_overrides(base, o);

  std::vector<double> scales;
  {
    std::istringstream in(scales_csv);
    std::string tok;
    while (std::getline(in, tok, ',')) scales.push_back(std::stod(tok));
  }
  if (scales.empty()) throw hc::ValidationError("contraction study needs at least one scale");

  std::ostringstream csv;
  csv << "scale [-],smallness_pass [-],converged [-],iterations [-],fitted_contraction "
         "[-],max_ratio [-],final_distance [-]\n";
  for (const double f : scales) {
    hc::Scenario sc = base;
    if (constant == "normal" && sc.law_normal)
      sc.law_normal = sc.law_normal->scaled(f);
    else if (constant == "tangential" && sc.law_tangential)
      sc.law_tangential = sc.law_tangential->scaled(f);
    else if (constant == "thermal" && sc.law_thermal)
      sc.law_thermal = sc.law_thermal->scaled(f);
    else if (constant == "expansion")
      sc.material.expansion.c_exp *= f;
    else
      throw hc::ValidationError("contraction study: constant must name a present law "
                                "(normal, tangential, thermal) or expansion");
    sc.material.derive_declared(0.0, sc.grid.T);

    const hc::System sys = sc.make_system();
    const hc::TraceConstants trace = hc::estimate_trace_constants(sc.mesh);
    const hc::SmallnessReport small = hc::check_smallness(sys, sc.grid, trace);
    const hc::CoupledSolution sol = hc::fixed_point_solve(sys, sc.grid, sc.coupling);
    double max_ratio = 0.0;
    for (const hc::IterationRow& row : sol.report.rows)
      if (row.iteration >= 2) max_ratio = std::max(max_ratio, row.ratio);
    csv << hc::fmt_g(f) << "," << (small.pass ? 1 : 0) << "," << (sol.report.converged ? 1 : 0)
        << "," << sol.report.total_iterations << "," << hc::fmt_g(sol.report.fitted_contraction)
        << "," << hc::fmt_g(max_ratio) << "," << hc::fmt_g(sol.report.final_distance) << "\n";
  }
  std::cout << csv.str();
  if (!o.out.empty()) {
    std::filesystem::create_directories(o.out);
    hc::write_text_file(o.out + "/contraction.csv", csv.str());
    hc::write_text_file(o.out + "/run_info.txt",
                        hc::format_run_info(base, "contraction-study", o.seed,
                                            flags + " --constant " + constant));
  }
  return 0;
}

int do_convergence_study(const CommonOpts& o, const std::string& levels_csv, double T,
                         double fp_tol, int fp_max) {
  if (o.threads > 0) hc::set_worker_count(o.threads);
  std::vector<std::pair<int, int>> levels;
  {
    std::istringstream in(levels_csv);
    std::string tok;
    while (std::getline(in, tok, ',')) {
      const size_t colon = tok.find(':');
      if (colon == std::string::npos)
        throw hc::ValidationError("levels are 'cells:steps' pairs, got '" + tok + "'");
      levels.emplace_back(std::stoi(tok.substr(0, colon)), std::stoi(tok.substr(colon + 1)));
    }
  }
  hc::CouplingConfig cfg;
  cfg.tolerance = fp_tol;
  cfg.max_iterations = fp_max;
  const auto rows = hc::run_manufactured_convergence(levels, T, cfg);
  std::cout << hc::format_convergence(rows);
  if (rows.size() >= 2) {
    const auto& a = rows[rows.size() - 2];
    const auto& b = rows.back();
    std::cout << "observed_order_u " << hc::fmt_g(std::log2(a.err_u / b.err_u)) << " [-]\n";
    std::cout << "observed_order_theta " << hc::fmt_g(std::log2(a.err_theta / b.err_theta))
              << " [-]\n";
  }
  if (!o.out.empty()) {
    std::filesystem::create_directories(o.out);
    hc::write_text_file(o.out + "/convergence.csv", hc::format_convergence(rows));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"coupled thermoviscoelastic contact solver"};
  app.set_version_flag("--version", hc::version_string);
  app.require_subcommand(1);

  CommonOpts opts;
  CLI::App* cmd_run = app.add_subcommand("run", "solve a scenario and write run artifacts");
  add_common(cmd_run, opts);
  CLI::App* cmd_hyp =
      app.add_subcommand("check-hypotheses", "audit the material laws against their constants");
  add_common(cmd_hyp, opts);
  CLI::App* cmd_small =
      app.add_subcommand("check-smallness", "audit the uniqueness conditions, no time stepping");
  add_common(cmd_small, opts);

  std::string constant = "tangential";
  std::string scales_csv = "0.5,1,2";
  CLI::App* cmd_contr =
      app.add_subcommand("contraction-study", "sweep one constant and tabulate coupling ratios");
  add_common(cmd_contr, opts);
  cmd_contr->add_option("--constant", constant,
                        "which constant to sweep: normal, tangential, thermal, expansion");
  cmd_contr->add_option("--scales", scales_csv, "comma-separated scale factors");

  std::string levels_csv = "7:10,14:20,28:40";
  double T = 0.5, fp_tol = 1e-9;
  int fp_max = 60;
  CLI::App* cmd_conv = app.add_subcommand(
      "convergence-study", "closed-form coupled case at several refinement levels");
  add_common(cmd_conv, opts, /*with_scenario=*/false);
  cmd_conv->add_option("--levels", levels_csv, "comma-separated cells:steps pairs");
  cmd_conv->add_option("--T", T, "time horizon");
  cmd_conv->add_option("--fp-tolerance", fp_tol, "coupling loop tolerance");
  cmd_conv->add_option("--fp-max-iterations", fp_max, "coupling loop iteration cap");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitParse;
  }

  try {
    if (*cmd_run) return do_run(opts);
    if (*cmd_hyp) return do_check_hypotheses(opts);
    if (*cmd_small) return do_check_smallness(opts);
    if (*cmd_contr) return do_contraction_study(opts, constant, scales_csv);
    if (*cmd_conv) return do_convergence_study(opts, levels_csv, T, fp_tol, fp_max);
  } catch (const hc::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  } catch (const hc::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  } catch (const hc::HypothesisError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitHypothesis;
  } catch (const hc::SolverError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSolver;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  }
  return 0;
}
