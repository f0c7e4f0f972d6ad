// SPDX-License-Identifier: MIT

#ifndef HEMICONTACT_RUNTIME_HPP
#define HEMICONTACT_RUNTIME_HPP

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace hemicontact {

inline constexpr const char* version_string = "hemicontact 0.1.0";

// --------------------------------------------------------------------------
// Error taxonomy. The CLI maps these onto its exit-code contract:
// input/parse problems -> 2, hypothesis or smallness failures -> 3,
// solver breakdowns -> 4.
// --------------------------------------------------------------------------

struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
  ParseError(const std::string& file, long line, const std::string& what)
      : std::runtime_error(file + ":" + std::to_string(line) + ": " + what) {}
};

struct ValidationError : std::runtime_error {
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

struct HypothesisError : std::runtime_error {
  explicit HypothesisError(const std::string& what) : std::runtime_error(what) {}
};

struct SolverError : std::runtime_error {
  explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

// --------------------------------------------------------------------------
// Worker control. HEMICONTACT_THREADS caps the worker count of every parallel
// region; a cap of 1 forces the serial path. The cap is read once.
// --------------------------------------------------------------------------

// Number of workers parallel kernels may use (>= 1).
int worker_count();

// Override the cap programmatically (tests use this to exercise the parallel
// path on a single-core host). n <= 0 restores the environment-derived value.
void set_worker_count(int n);

// Deterministic RNG used by every sampling routine.
inline std::mt19937_64 make_rng(std::uint64_t seed) { return std::mt19937_64(seed); }

}  // namespace hemicontact

#endif
