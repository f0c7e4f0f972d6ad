// SPDX-License-Identifier: MIT

#ifndef HEMICONTACT_NONSMOOTH_HPP
#define HEMICONTACT_NONSMOOTH_HPP

#include <Eigen/Core>
#include <optional>
#include <string>
#include <vector>

#include "hemicontact/mesh.hpp"

namespace hemicontact {

struct Interval {
  double lo = 0.0, hi = 0.0;
  double width() const { return hi - lo; }
  double midpoint() const { return 0.5 * (lo + hi); }
  bool contains(double v, double tol = 0.0) const { return v >= lo - tol && v <= hi + tol; }
};

// --------------------------------------------------------------------------
// Piecewise polynomial density beta on R. Breakpoints x_1 < ... < x_m split
// the line into m+1 pieces; piece k is a polynomial in the global variable on
// (x_{k-1}, x_k). The density may jump at breakpoints; the convexification
// closes those gaps with the interval hull of the one-sided limits (plus an
// explicit point value when one is declared). The superpotential is the exact
// piecewise antiderivative normalized to vanish at 0.
// --------------------------------------------------------------------------

class PiecewiseDensity {
 public:
  PiecewiseDensity() : PiecewiseDensity({}, {{0.0}}) {}
  PiecewiseDensity(std::vector<double> breakpoints, std::vector<std::vector<double>> piece_coeffs);

  static PiecewiseDensity linear(double slope, double offset = 0.0) {
    return PiecewiseDensity({}, {{offset, slope}});
  }

  // Declares beta(x) at a breakpoint (otherwise values there are
  // right-continuous).
  void set_point_value(double x, double v);

  int n_pieces() const { return static_cast<int>(pieces_.size()); }
  const std::vector<double>& breakpoints() const { return breaks_; }
  const std::vector<double>& piece(int k) const { return pieces_[static_cast<size_t>(k)]; }
  int piece_index(double s) const;

  double value(double s) const;
  double left_limit(double x) const;
  double right_limit(double x) const;

  // Interval hull of the one-sided limits (and the declared point value).
  Interval filled(double x) const;

  // j(s) = int_0^s beta, exact per piece, j(0) = 0.
  double superpotential(double s) const;

  // Generalized directional derivative of the superpotential:
  // j0(x; v) = hi(x)*v for v >= 0, lo(x)*v otherwise.
  double clarke_dd(double x, double v) const;

  // Derivative of the active piece (right piece at breakpoints).
  double piece_derivative(double s) const;

  bool piecewise_linear() const;

 private:
  std::vector<double> breaks_;
  std::vector<std::vector<double>> pieces_;        // coefficients, low degree first
  std::vector<std::vector<double>> antiderivative_;  // per piece, with continuity constants
  std::vector<std::optional<double>> point_values_;  // per breakpoint

  void build_antiderivative();
};

// Box-kernel mollification of a density with width eps > 0:
//   beta_eps(x) = (j(x+eps) - j(x-eps)) / (2 eps),
// evaluated exactly through the piecewise antiderivative, hence piecewise
// exact for piecewise polynomial densities. Converges pointwise to beta at
// continuity points and stays inside the filled graph inflated by the local
// slope times eps.
class RegularizedDensity {
 public:
  RegularizedDensity() = default;
  RegularizedDensity(const PiecewiseDensity* base, double eps);

  double eps() const { return eps_; }
  double value(double x) const;
  double slope(double x) const;  // exact a.e.: (beta(x+eps) - beta(x-eps)) / (2 eps)
  // Exact antiderivative of beta_eps (used by energy accounting):
  // (J(x+eps) - J(x-eps)) / (2 eps) with J the second antiderivative is not
  // needed; superpotential of the base is exposed instead.
  const PiecewiseDensity& base() const { return *base_; }

 private:
  const PiecewiseDensity* base_ = nullptr;
  double eps_ = 0.0;
};

// --------------------------------------------------------------------------
// A boundary law couples a density with its declared hypothesis constants.
// The graph is fixed; only the scalar modulation may depend on time.
// --------------------------------------------------------------------------

// Piecewise linear scalar modulation, constant 1 when empty.
class Modulation {
 public:
  Modulation() = default;
  explicit Modulation(std::vector<std::pair<double, double>> knots);
  double operator()(double t) const;
  double max_abs_on(double t0, double t1) const;
  double min_on(double t0, double t1) const;
  double max_on(double t0, double t1) const;
  bool trivial() const { return knots_.empty(); }
  Modulation scaled(double f) const;

 private:
  std::vector<std::pair<double, double>> knots_;
};

enum class LawRole { Normal, Tangential, Thermal };
enum class Regularity { Unknown, Regular, MinusRegular };

struct BoundaryLaw {
  std::string name = "law";
  LawRole role = LawRole::Normal;
  PiecewiseDensity density;
  Modulation mod;

  // Declared constants: |beta(s)| <= c0 + c1|s| and relaxed monotonicity of
  // the filled graph with constant m_relaxed >= 0 (before modulation).
  double c0 = 0.0;
  double c1 = 0.0;
  double m_relaxed = 0.0;
  std::optional<Regularity> declared_regularity;

  // Validates declarations against the graph on [-range, range].
  void validate(double range = 100.0, int samples = 4096) const;

  // Regular / minus-regular when decidable from the pieces (monotone
  // piecewise-linear graphs), otherwise the declared claim or Unknown.
  Regularity regularity() const;

  double eval(double t, double s) const { return mod(t) * density.value(s); }

  // Same law scaled by f > 0 through the modulation. The declared constants
  // stay put; effective constants pick up the factor from the modulation.
  BoundaryLaw scaled(double f) const;
};

// Grid estimate of the relaxed monotonicity constant:
// max(0, -min difference quotient) over all sampled pairs.
double relaxed_monotonicity_estimate(const PiecewiseDensity& d, double lo, double hi, int n = 1000);

// --------------------------------------------------------------------------
// Tangential realization: j_tau(xi) = j(||xi||). The subgradient lies along
// xi with magnitude in the filled interval at ||xi||; at xi = 0 it is the
// ball whose radius is the largest absolute filled value at 0.
// --------------------------------------------------------------------------

double tangential_ball_radius(const PiecewiseDensity& d);
double clarke_dd_tangential(const PiecewiseDensity& d, const Eigen::Vector2d& xi,
                            const Eigen::Vector2d& dir);

// --------------------------------------------------------------------------
// Boundary integral functional J(theta) = int_{Gamma_C} j(theta) dGamma with
// trapezoid (boundary-lumped) quadrature; the subgradient boxes carry the
// lumped masses.
// --------------------------------------------------------------------------

struct SubgradientBox {
  int vertex = -1;
  double weight = 0.0;  // lumped boundary mass
  Interval box;         // weight * modulation * filled(theta_vertex)
};

struct JFunctional {
  double value = 0.0;
  std::vector<SubgradientBox> boxes;
};

JFunctional integral_functional_J(const BoundaryLaw& law, const Mesh& mesh, const Field& theta,
                                  double t);

// Upper directional value sum_i w_i j0(theta_i; zeta_i); equals the largest
// pairing over box selections.
double j_directional(const BoundaryLaw& law, const Mesh& mesh, const Field& theta,
                     const Field& zeta, double t);

// Shipped discontinuous densities used by tests and example scenarios.
// Names: "step_down" (-sign), "step_up" (sign), "ramp_drop" (unit ramp with a
// drop to half slope at 1).
BoundaryLaw make_builtin_law(const std::string& name, LawRole role);

}  // namespace hemicontact

#endif
