#include "geotomo/geometry.hpp"

#include <cmath>

#include "geotomo/errors.hpp"
#include "geotomo/grid.hpp"

namespace geotomo {

namespace {

constexpr double kGradStep = 1e-6;

// Geodesic acceleration of g = n^2 I, the contraction -Gamma^k_ij v^i v^j
// written out for the conformal Christoffel symbols:
//   a = -(1/n) * (2 <grad n, v> v - |v|^2 grad n).
Vec2 acceleration(const RefractiveMedium& medium, Vec2 x, Vec2 v) {
  Vec2 g = medium.eval_grad(x);
  double ninv = 1.0 / medium.eval_n(x);
  double gv = dot(g, v);
  return -ninv * (2.0 * gv * v - norm2(v) * g);
}

// First crossing of the unit circle along the segment a -> b, as the
// parameter t in [0, 1]. Requires |a| <= 1.
double segment_circle_parameter(Vec2 a, Vec2 b) {
  Vec2 d = b - a;
  double dd = norm2(d);
  double ad = dot(a, d);
  double c = norm2(a) - 1.0;
  if (c > 1e-12)
    throw NoIntersection("segment start lies outside the unit circle");
  double disc = ad * ad - dd * c;
  if (disc < 0.0 || dd == 0.0)
    throw NoIntersection("segment does not reach the unit circle");
  double t = (-ad + std::sqrt(disc)) / dd;
  if (t < 0.0) t = 0.0;
  if (t > 1.0)
    throw NoIntersection("segment ends inside the unit circle");
  return t;
}

}  // namespace

Vec2 RefractiveMedium::eval_grad(Vec2 x) const {
  if (grad_n) return grad_n(x);
  double dx = (n({x.x + kGradStep, x.y}) - n({x.x - kGradStep, x.y}));
  double dy = (n({x.x, x.y + kGradStep}) - n({x.x, x.y - kGradStep}));
  return {dx / (2.0 * kGradStep), dy / (2.0 * kGradStep)};
}

RefractiveMedium make_medium(const std::string& name, double alpha0) {
  RefractiveMedium medium;
  medium.name = name;
  medium.alpha0 = alpha0;
  if (name == "euclid") {
    medium.n = [](Vec2) { return 1.0; };
    medium.grad_n = [](Vec2) { return Vec2{0.0, 0.0}; };
    medium.c_n = 1.0;
    medium.euclidean = true;
  } else if (name == "paper-slow") {
    medium.n = [](Vec2 x) { return 4.0 / 3.0 + 0.002 * norm2(x); };
    medium.grad_n = [](Vec2 x) { return 0.004 * x; };
    medium.c_n = 4.0 / 3.0;
  } else if (name == "paper-mild") {
    medium.n = [](Vec2 x) { return 1.0 + 0.002 * norm2(x); };
    medium.grad_n = [](Vec2 x) { return 0.004 * x; };
    medium.c_n = 1.0;
  } else {
    throw BadConfig("unknown medium: " + name);
  }
  return medium;
}

std::array<std::array<std::array<double, 2>, 2>, 2> christoffel(
    const RefractiveMedium& medium, Vec2 x) {
  double ninv = 1.0 / medium.eval_n(x);
  Vec2 g = medium.eval_grad(x);
  double dn[2] = {g.x, g.y};
  std::array<std::array<std::array<double, 2>, 2>, 2> gamma{};
  for (int k = 0; k < 2; ++k)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        double v = 0.0;
        if (i == k) v += dn[j];
        if (j == k) v += dn[i];
        if (i == j) v -= dn[k];
        gamma[k][i][j] = ninv * v;
      }
  return gamma;
}

GeodesicPath geodesic_trace(const RefractiveMedium& medium, Vec2 x0, Vec2 xi0,
                            double dtau, bool backward, int max_steps) {
  if (dtau <= 0.0) throw BadConfig("geodesic_trace: dtau must be positive");
  if (norm(x0) > 1.0 + 1e-12)
    throw OutsideDomain("geodesic_trace: start point outside the disc");
  double xi_norm = norm(xi0);
  if (xi_norm == 0.0)
    throw BadConfig("geodesic_trace: zero initial direction");
  if (max_steps <= 0) max_steps = static_cast<int>(std::ceil(20.0 / dtau));

  GeodesicPath path;
  path.dtau = dtau;
  Vec2 x = x0;
  Vec2 v = xi0 / (medium.eval_n(x0) * xi_norm);  // g-unit speed
  double h = backward ? -dtau : dtau;
  path.points.push_back(x);
  path.velocities.push_back(v);

  for (int s = 0; s < max_steps; ++s) {
    Vec2 k1x = v;
    Vec2 k1v = acceleration(medium, x, v);
    Vec2 k2x = v + 0.5 * h * k1v;
    Vec2 k2v = acceleration(medium, x + 0.5 * h * k1x, k2x);
    Vec2 k3x = v + 0.5 * h * k2v;
    Vec2 k3v = acceleration(medium, x + 0.5 * h * k2x, k3x);
    Vec2 k4x = v + h * k3v;
    Vec2 k4v = acceleration(medium, x + h * k3x, k4x);
    Vec2 xn = x + (h / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
    Vec2 vn = v + (h / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    path.points.push_back(xn);
    path.velocities.push_back(vn);
    if (norm(xn) > 1.0) {
      double t = segment_circle_parameter(x, xn);
      path.exit_point = x + t * (xn - x);
      double full = norm(xn - x);
      path.dtau_star = full > 0.0 ? dtau * norm(path.exit_point - x) / full
                                  : 0.0;
      return path;
    }
    x = xn;
    v = vn;
  }
  throw MaxStepsExceeded("geodesic_trace: no boundary crossing after " +
                         std::to_string(max_steps) + " steps");
}

double tau_minus_euclid(Vec2 x, Vec2 xi) {
  if (std::abs(norm(x) - 1.0) > 1e-9)
    throw OutsideDomain("tau_minus_euclid: x must lie on the boundary circle");
  double d = dot(x, xi);
  if (d < 0.0)
    throw OutsideDomain("tau_minus_euclid: direction must be outgoing");
  return -2.0 * d;
}

double tau_plus_euclid(Vec2 x, Vec2 xi) {
  double xx = norm2(x);
  if (xx > 1.0 + 1e-12)
    throw OutsideDomain("tau_plus_euclid: x must lie in the closed disc");
  double d = dot(x, xi);
  double disc = d * d + 1.0 - xx;
  if (disc < 0.0) disc = 0.0;
  return -d + std::sqrt(disc);
}

SlowVariationReport check_slow_variation(const RefractiveMedium& medium,
                                         const PolarGrid& grid) {
  SlowVariationReport report;
  for (int r = 0; r < grid.R; ++r)
    for (int p = 0; p < grid.P; ++p) {
      Vec2 x = grid.node(r, p);
      double ratio = norm(medium.eval_grad(x)) / medium.eval_n(x);
      if (ratio > report.sup_ratio) report.sup_ratio = ratio;
    }
  report.satisfied = report.sup_ratio < medium.alpha0;
  return report;
}

}  // namespace geotomo
