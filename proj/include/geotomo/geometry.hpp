#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "geotomo/vec2.hpp"

namespace geotomo {

struct PolarGrid;

// Isotropic refractive medium on the closed unit disc. The metric is the
// conformal one g = n(x)^2 * I, so lengths and angles are Euclidean ones
// scaled by n. alpha0 is a constant attenuation coefficient; a medium may
// instead carry a general phase-space attenuation alpha(x, xi).
struct RefractiveMedium {
  std::string name;
  std::function<double(Vec2)> n;
  std::function<Vec2(Vec2)> grad_n;            // empty: central differences
  std::function<double(Vec2, Vec2)> alpha_fn;  // empty: constant alpha0
  double alpha0 = 0.0;
  double c_n = 1.0;  // positive lower bound of n on the disc
  bool euclidean = false;

  double eval_n(Vec2 x) const { return n(x); }
  Vec2 eval_grad(Vec2 x) const;
  double eval_alpha(Vec2 x, Vec2 xi) const {
    return alpha_fn ? alpha_fn(x, xi) : alpha0;
  }
};

// Built-in media:
//   "euclid"      n = 1
//   "paper-slow"  n = 4/3 + 0.002 |x|^2
//   "paper-mild"  n = 1 + 0.002 (x1^2 + x2^2)
RefractiveMedium make_medium(const std::string& name, double alpha0 = 0.0);

// Christoffel symbols of g = n^2 I, indexed [k][i][j].
std::array<std::array<std::array<double, 2>, 2>, 2> christoffel(
    const RefractiveMedium& medium, Vec2 x);

// Discrete geodesic through (x0, xi0). Sample s lives at parameter s * dtau
// from the start; the final RK4 sample sits just outside the disc and
// exit_point is the segment-circle intersection before it, reached after the
// shortened last step dtau_star <= dtau.
struct GeodesicPath {
  std::vector<Vec2> points;
  std::vector<Vec2> velocities;
  double dtau = 0.0;
  double dtau_star = 0.0;
  Vec2 exit_point;

  // Parameter length from the start to the boundary crossing.
  double param_length() const {
    return (static_cast<double>(points.size()) - 2.0) * dtau + dtau_star;
  }
  const Vec2& exit_velocity() const { return velocities.back(); }
};

// Classical RK4 trace of the geodesic equation. xi0 is normalized to g-unit
// length (n |xi| = 1) before tracing; backward integrates with step -dtau.
// max_steps = 0 means ceil(20 / dtau).
GeodesicPath geodesic_trace(const RefractiveMedium& medium, Vec2 x0, Vec2 xi0,
                            double dtau, bool backward = false,
                            int max_steps = 0);

// Euclidean travel times for the unit disc: tau_minus for an outgoing
// boundary pair (x on the circle, <x,xi> >= 0) back to the entry point, and
// tau_plus from an interior point x to the exit in direction xi.
double tau_minus_euclid(Vec2 x, Vec2 xi);
double tau_plus_euclid(Vec2 x, Vec2 xi);

// sup |grad n| / n over the grid nodes, compared against alpha0. Purely a
// diagnostic; nothing downstream enforces it.
struct SlowVariationReport {
  double sup_ratio = 0.0;
  bool satisfied = false;
};
SlowVariationReport check_slow_variation(const RefractiveMedium& medium,
                                         const PolarGrid& grid);

}  // namespace geotomo
