// SPDX-License-Identifier: MIT

#include "hemicontact/runtime.hpp"

#include <omp.h>

#include <algorithm>
#include <cstdlib>

namespace hemicontact {

namespace {

int env_worker_cap() {
  const char* s = std::getenv("HEMICONTACT_THREADS");
  if (!s || !*s) return omp_get_max_threads();
  char* end = nullptr;
  long v = std::strtol(s, &end, 10);
  if (end == s || v < 1) return 1;
  return static_cast<int>(std::min(v, 256L));
}

int g_override = 0;

}  // namespace

int worker_count() {
  if (g_override > 0) return g_override;
  static const int cap = std::max(1, std::min(env_worker_cap(), omp_get_max_threads()));
  return cap;
}

void set_worker_count(int n) { g_override = n > 0 ? std::min(n, 256) : 0; }

}  // namespace hemicontact
