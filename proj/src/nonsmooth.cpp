// SPDX-License-Identifier: MIT

#include "hemicontact/nonsmooth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hemicontact/runtime.hpp"

namespace hemicontact {

namespace {

double poly_eval(const std::vector<double>& c, double s) {
  double v = 0.0;
  for (size_t k = c.size(); k-- > 0;) v = v * s + c[k];
  return v;
}

double poly_derivative_eval(const std::vector<double>& c, double s) {
  double v = 0.0;
  for (size_t k = c.size(); k-- > 1;) v = v * s + c[k] * static_cast<double>(k);
  return v;
}

std::vector<double> poly_antiderivative(const std::vector<double>& c) {
  std::vector<double> a(c.size() + 1, 0.0);
  for (size_t k = 0; k < c.size(); ++k) a[k + 1] = c[k] / static_cast<double>(k + 1);
  return a;
}

}  // namespace

PiecewiseDensity::PiecewiseDensity(std::vector<double> breakpoints,
                                   std::vector<std::vector<double>> piece_coeffs)
    : breaks_(std::move(breakpoints)), pieces_(std::move(piece_coeffs)) {
  if (pieces_.size() != breaks_.size() + 1)
    throw ValidationError("density: need exactly one piece more than breakpoints");
  for (size_t k = 0; k + 1 < breaks_.size(); ++k)
    if (!(breaks_[k] < breaks_[k + 1]))
      throw ValidationError("density: breakpoints must be strictly increasing");
  for (auto& p : pieces_)
    if (p.empty()) p = {0.0};
  point_values_.assign(breaks_.size(), std::nullopt);
  build_antiderivative();
}

void PiecewiseDensity::set_point_value(double x, double v) {
  auto it = std::lower_bound(breaks_.begin(), breaks_.end(), x);
  if (it == breaks_.end() || *it != x)
    throw ValidationError("density: point values may only be declared at breakpoints");
  point_values_[static_cast<size_t>(it - breaks_.begin())] = v;
}

int PiecewiseDensity::piece_index(double s) const {
  return static_cast<int>(std::upper_bound(breaks_.begin(), breaks_.end(), s) - breaks_.begin());
}

double PiecewiseDensity::value(double s) const {
  auto it = std::lower_bound(breaks_.begin(), breaks_.end(), s);
  if (it != breaks_.end() && *it == s) {
    const auto& pv = point_values_[static_cast<size_t>(it - breaks_.begin())];
    if (pv) return *pv;
  }
  return poly_eval(pieces_[static_cast<size_t>(piece_index(s))], s);
}

double PiecewiseDensity::left_limit(double x) const {
  auto it = std::lower_bound(breaks_.begin(), breaks_.end(), x);
  if (it != breaks_.end() && *it == x)
    return poly_eval(pieces_[static_cast<size_t>(it - breaks_.begin())], x);
  return poly_eval(pieces_[static_cast<size_t>(piece_index(x))], x);
}

double PiecewiseDensity::right_limit(double x) const {
  return poly_eval(pieces_[static_cast<size_t>(piece_index(x))], x);
}

Interval PiecewiseDensity::filled(double x) const {
  double l = left_limit(x), r = right_limit(x);
  Interval iv{std::min(l, r), std::max(l, r)};
  auto it = std::lower_bound(breaks_.begin(), breaks_.end(), x);
  if (it != breaks_.end() && *it == x) {
    const auto& pv = point_values_[static_cast<size_t>(it - breaks_.begin())];
    if (pv) {
      iv.lo = std::min(iv.lo, *pv);
      iv.hi = std::max(iv.hi, *pv);
    }
  }
  return iv;
}

void PiecewiseDensity::build_antiderivative() {
  const int np = n_pieces();
  antiderivative_.resize(static_cast<size_t>(np));
  std::vector<double> constants(static_cast<size_t>(np), 0.0);
  for (int k = 0; k < np; ++k)
    antiderivative_[static_cast<size_t>(k)] = poly_antiderivative(pieces_[static_cast<size_t>(k)]);

  const int k0 = piece_index(0.0);
  constants[static_cast<size_t>(k0)] = -poly_eval(antiderivative_[static_cast<size_t>(k0)], 0.0);
  for (int k = k0 + 1; k < np; ++k) {
    double x = breaks_[static_cast<size_t>(k - 1)];
    constants[static_cast<size_t>(k)] =
        constants[static_cast<size_t>(k - 1)] + poly_eval(antiderivative_[static_cast<size_t>(k - 1)], x) -
        poly_eval(antiderivative_[static_cast<size_t>(k)], x);
  }
  for (int k = k0 - 1; k >= 0; --k) {
    double x = breaks_[static_cast<size_t>(k)];
    constants[static_cast<size_t>(k)] =
        constants[static_cast<size_t>(k + 1)] + poly_eval(antiderivative_[static_cast<size_t>(k + 1)], x) -
        poly_eval(antiderivative_[static_cast<size_t>(k)], x);
  }
  for (int k = 0; k < np; ++k) antiderivative_[static_cast<size_t>(k)][0] += constants[static_cast<size_t>(k)];
}

double PiecewiseDensity::superpotential(double s) const {
  return poly_eval(antiderivative_[static_cast<size_t>(piece_index(s))], s);
}

double PiecewiseDensity::clarke_dd(double x, double v) const {
  Interval iv = filled(x);
  return v >= 0.0 ? iv.hi * v : iv.lo * v;
}

double PiecewiseDensity::piece_derivative(double s) const {
  return poly_derivative_eval(pieces_[static_cast<size_t>(piece_index(s))], s);
}

bool PiecewiseDensity::piecewise_linear() const {
  for (const auto& p : pieces_)
    if (p.size() > 2) return false;
  return true;
}

RegularizedDensity::RegularizedDensity(const PiecewiseDensity* base, double eps) : base_(base), eps_(eps) {
  if (!(eps > 0.0)) throw ValidationError("regularize: smoothing width must be positive");
}

double RegularizedDensity::value(double x) const {
  return (base_->superpotential(x + eps_) - base_->superpotential(x - eps_)) / (2.0 * eps_);
}

double RegularizedDensity::slope(double x) const {
  return (base_->value(x + eps_) - base_->value(x - eps_)) / (2.0 * eps_);
}

Modulation::Modulation(std::vector<std::pair<double, double>> knots) : knots_(std::move(knots)) {
  for (size_t k = 0; k + 1 < knots_.size(); ++k)
    if (!(knots_[k].first < knots_[k + 1].first))
      throw ValidationError("modulation: knot times must be strictly increasing");
}

double Modulation::operator()(double t) const {
  if (knots_.empty()) return 1.0;
  if (t <= knots_.front().first) return knots_.front().second;
  if (t >= knots_.back().first) return knots_.back().second;
  auto it = std::upper_bound(knots_.begin(), knots_.end(), t,
                             [](double a, const auto& kn) { return a < kn.first; });
  const auto& [t1, v1] = *it;
  const auto& [t0, v0] = *(it - 1);
  double w = (t - t0) / (t1 - t0);
  return v0 + w * (v1 - v0);
}

namespace {

template <class Fn>
double extremum_on(const std::vector<std::pair<double, double>>& knots, double t0, double t1, Fn pick,
                   double init, const Modulation& m) {
  double best = pick(init, m(t0));
  best = pick(best, m(t1));
  for (const auto& [t, v] : knots)
    if (t > t0 && t < t1) best = pick(best, v);
  return best;
}

}  // namespace

double Modulation::min_on(double t0, double t1) const {
  if (knots_.empty()) return 1.0;
  auto pick = [](double a, double b) { return std::min(a, b); };
  return extremum_on(knots_, t0, t1, pick, std::numeric_limits<double>::infinity(), *this);
}

double Modulation::max_on(double t0, double t1) const {
  if (knots_.empty()) return 1.0;
  auto pick = [](double a, double b) { return std::max(a, b); };
  return extremum_on(knots_, t0, t1, pick, -std::numeric_limits<double>::infinity(), *this);
}

double Modulation::max_abs_on(double t0, double t1) const {
  return std::max(std::abs(min_on(t0, t1)), std::abs(max_on(t0, t1)));
}

Modulation Modulation::scaled(double f) const {
  if (knots_.empty()) return Modulation({{0.0, f}});
  std::vector<std::pair<double, double>> out = knots_;
  for (auto& [t, v] : out) v *= f;
  return Modulation(std::move(out));
}

void BoundaryLaw::validate(double range, int samples) const {
  if (c0 < 0.0 || c1 < 0.0) throw HypothesisError(name + ": growth constants must be nonnegative");
  if (m_relaxed < 0.0) throw HypothesisError(name + ": relaxed monotonicity constant must be nonnegative");
  if (mod.min_on(-1e9, 1e9) < 0.0)
    throw HypothesisError(name + ": law modulation must stay nonnegative (graphs may not flip)");
  // Growth |beta| <= c0 + c1|s| checked on a sampled range, including limits
  // around every breakpoint.
  auto check = [&](double s, double b) {
    if (std::abs(b) > c0 + c1 * std::abs(s) + 1e-9 * (1.0 + c0 + c1 * std::abs(s)))
      throw HypothesisError(name + ": density violates declared growth bound at s = " + std::to_string(s));
  };
  for (int i = 0; i < samples; ++i) {
    double s = -range + 2.0 * range * (static_cast<double>(i) + 0.5) / samples;
    check(s, density.value(s));
  }
  for (double x : density.breakpoints()) {
    check(x, density.left_limit(x));
    check(x, density.right_limit(x));
  }
}

Regularity BoundaryLaw::regularity() const {
  // A continuous density integrates to a C1 superpotential, which is regular
  // (and minus-regular); the stronger flag is reported. The one-sided limits
  // come from different pieces, so continuity is checked up to rounding.
  bool continuous = true;
  for (double x : density.breakpoints()) {
    const Interval gap = density.filled(x);
    if (gap.width() > 1e-12 * (1.0 + std::abs(gap.lo) + std::abs(gap.hi))) continuous = false;
  }
  if (continuous) return Regularity::Regular;
  // Decidable symbolically for monotone piecewise-linear graphs: slopes and
  // jumps of one sign give a convex (or concave) superpotential.
  if (density.piecewise_linear()) {
    bool up = true, down = true;
    for (int k = 0; k < density.n_pieces(); ++k) {
      const auto& p = density.piece(k);
      double slope = p.size() > 1 ? p[1] : 0.0;
      if (slope < 0.0) up = false;
      if (slope > 0.0) down = false;
    }
    for (double x : density.breakpoints()) {
      double jump = density.right_limit(x) - density.left_limit(x);
      if (jump < 0.0) up = false;
      if (jump > 0.0) down = false;
    }
    if (up) return Regularity::Regular;
    if (down) return Regularity::MinusRegular;
  }
  return declared_regularity.value_or(Regularity::Unknown);
}

BoundaryLaw BoundaryLaw::scaled(double f) const {
  if (!(f > 0.0)) throw ValidationError(name + ": scale factor must be positive");
  BoundaryLaw out = *this;
  // The declared constants describe the density before modulation, so only
  // the modulation carries the factor.
  out.mod = mod.scaled(f);
  return out;
}

double relaxed_monotonicity_estimate(const PiecewiseDensity& d, double lo, double hi, int n) {
  if (n < 2) throw ValidationError("relaxed_monotonicity_estimate: need at least 2 grid points");
  std::vector<double> s(static_cast<size_t>(n)), b(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    s[static_cast<size_t>(i)] = lo + (hi - lo) * static_cast<double>(i) / (n - 1);
    b[static_cast<size_t>(i)] = d.value(s[static_cast<size_t>(i)]);
  }
  double worst = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double ds = s[static_cast<size_t>(j)] - s[static_cast<size_t>(i)];
      if (ds == 0.0) continue;
      worst = std::min(worst, (b[static_cast<size_t>(j)] - b[static_cast<size_t>(i)]) / ds);
    }
  return std::max(0.0, -worst);
}

double tangential_ball_radius(const PiecewiseDensity& d) {
  Interval iv = d.filled(0.0);
  return std::max(std::abs(iv.lo), std::abs(iv.hi));
}

double clarke_dd_tangential(const PiecewiseDensity& d, const Eigen::Vector2d& xi,
                            const Eigen::Vector2d& dir) {
  double r = xi.norm();
  if (r < 1e-300) return tangential_ball_radius(d) * dir.norm();
  return d.clarke_dd(r, xi.dot(dir) / r);
}

JFunctional integral_functional_J(const BoundaryLaw& law, const Mesh& mesh, const Field& theta,
                                  double t) {
  JFunctional J;
  const double m = law.mod(t);
  J.boxes.reserve(mesh.contact_vertices.size());
  for (size_t i = 0; i < mesh.contact_vertices.size(); ++i) {
    const int v = mesh.contact_vertices[i];
    const double w = mesh.contact_weight[i];
    const double th = theta.values[v];
    J.value += w * m * law.density.superpotential(th);
    Interval f = law.density.filled(th);
    J.boxes.push_back({v, w, Interval{w * m * f.lo, w * m * f.hi}});
  }
  return J;
}

double j_directional(const BoundaryLaw& law, const Mesh& mesh, const Field& theta, const Field& zeta,
                     double t) {
  const double m = law.mod(t);
  double s = 0.0;
  for (size_t i = 0; i < mesh.contact_vertices.size(); ++i) {
    const int v = mesh.contact_vertices[i];
    s += mesh.contact_weight[i] * m * law.density.clarke_dd(theta.values[v], zeta.values[v]);
  }
  return s;
}

BoundaryLaw make_builtin_law(const std::string& name, LawRole role) {
  BoundaryLaw law;
  law.name = name;
  law.role = role;
  if (name == "step_down") {
    law.density = PiecewiseDensity({0.0}, {{1.0}, {-1.0}});
    law.c0 = 1.0;
    law.c1 = 0.0;
    law.m_relaxed = std::numeric_limits<double>::infinity();  // downward jump
  } else if (name == "step_up") {
    law.density = PiecewiseDensity({0.0}, {{-1.0}, {1.0}});
    law.c0 = 1.0;
    law.c1 = 0.0;
    law.m_relaxed = 0.0;
  } else if (name == "ramp_drop") {
    law.density = PiecewiseDensity({1.0}, {{0.0, 1.0}, {0.0, 0.5}});
    law.c0 = 0.0;
    law.c1 = 1.0;
    law.m_relaxed = std::numeric_limits<double>::infinity();  // downward jump
  } else if (name == "zero") {
    law.density = PiecewiseDensity();
    law.c0 = law.c1 = law.m_relaxed = 0.0;
  } else {
    throw ValidationError("unknown builtin law '" + name + "'");
  }
  return law;
}

}  // namespace hemicontact
