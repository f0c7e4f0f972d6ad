// SPDX-License-Identifier: MIT

// Times the serial reference assembly against the worker-parallel path on a
// structured mesh and reports the largest entry difference. No assertions;
// the paired unit tests check exact agreement, this tool shows the numbers.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "hemicontact/fem.hpp"
#include "hemicontact/mesh.hpp"
#include "hemicontact/runtime.hpp"

namespace hc = hemicontact;

namespace {

double max_entry_diff(const hc::SparseMat& a, const hc::SparseMat& b) {
  hc::SparseMat d = a - b;
  double worst = 0.0;
  for (int k = 0; k < d.outerSize(); ++k)
    for (hc::SparseMat::InnerIterator it(d, k); it; ++it)
      worst = std::max(worst, std::abs(it.value()));
  return worst;
}

template <class Fn>
double best_ms(int repeats, Fn&& fn) {
  double best = 1e300;
  for (int r = 0; r < repeats; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const auto t1 = std::chrono::steady_clock::now();
    best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  return best;
}

}  // namespace

int main(int argc, char** argv) {
  int n = 128, workers = 4, repeats = 5;
  if (argc > 1) n = std::atoi(argv[1]);
  if (argc > 2) workers = std::atoi(argv[2]);
  if (argc > 3) repeats = std::atoi(argv[3]);
  if (n < 1 || workers < 1 || repeats < 1) {
    std::fprintf(stderr, "usage: bench_assembly [cells] [workers] [repeats]\n");
    return 2;
  }

  hc::set_worker_count(workers);
  const hc::Mesh mesh = hc::make_unit_square_mesh(n);
  std::printf("mesh: %d vertices, %d triangles, %d workers\n", mesh.n_vertices(),
              mesh.n_triangles(), hc::worker_count());
  std::printf("%-14s %12s %12s %9s %12s\n", "form", "serial [ms]", "parallel [ms]", "speedup",
              "max_diff");

  const std::pair<hc::FormKind, const char*> forms[] = {
      {hc::FormKind::Mass, "mass"},
      {hc::FormKind::MassScalar, "mass_scalar"},
      {hc::FormKind::Energy, "energy"},
      {hc::FormKind::EnergyScalar, "energy_sc"},
      {hc::FormKind::DivDiv, "divdiv"},
  };
  for (const auto& [kind, label] : forms) {
    hc::SparseMat serial, parallel;
    const double ts =
        best_ms(repeats, [&] { serial = hc::assemble_form(kind, mesh, hc::ExecMode::Serial); });
    const double tp =
        best_ms(repeats, [&] { parallel = hc::assemble_form(kind, mesh, hc::ExecMode::Parallel); });
    std::printf("%-14s %12.3f %12.3f %9.2f %12.3e\n", label, ts, tp, ts / tp,
                max_entry_diff(serial, parallel));
  }

  // Vector accumulation: nodal dual of a position-dependent body force.
  const int nv = mesh.n_vertices();
  auto emit = [&](int t, Eigen::VectorXd& buf) {
    const double area = mesh.tri_area[static_cast<size_t>(t)] / 3.0;
    for (int loc = 0; loc < 3; ++loc) {
      const int v = mesh.triangles[static_cast<size_t>(t)][static_cast<size_t>(loc)];
      const auto& p = mesh.vertices[static_cast<size_t>(v)];
      buf[2 * v] += area * p.x() * p.y();
      buf[2 * v + 1] += area * (p.x() - p.y());
    }
  };
  Eigen::VectorXd vs, vp;
  const double ts = best_ms(repeats, [&] {
    vs = hc::accumulate_elementwise(mesh.n_triangles(), 2 * nv, hc::ExecMode::Serial, emit);
  });
  const double tp = best_ms(repeats, [&] {
    vp = hc::accumulate_elementwise(mesh.n_triangles(), 2 * nv, hc::ExecMode::Parallel, emit);
  });
  std::printf("%-14s %12.3f %12.3f %9.2f %12.3e\n", "load_vector", ts, tp, ts / tp,
              (vs - vp).cwiseAbs().maxCoeff());
  return 0;
}
