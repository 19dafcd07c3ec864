#pragma once

#include <functional>
#include <vector>

#include "geotomo/geometry.hpp"
#include "geotomo/grid.hpp"

namespace geotomo {

// Trapezoid: composite trapezoid weights dtau * (1/2, 1, ..., 1, 1/2) with
// the shortened final step. PaperAverage: plain average of the integrand over
// the T+1 samples (no step factor), kept for comparison runs.
enum class QuadratureMode { Trapezoid, PaperAverage };

// One quadrature sample of a ray: interpolation stencil at the sample point,
// direction components of the (g-unit) velocity, metric factor n^(2m), the
// trapezoid weight of the sample and its parameter distance from the ray's
// boundary start. exp(-alpha0 * ell) attenuates sample contributions.
struct RaySample {
  InterpStencil st;
  double dir1 = 0.0, dir2 = 0.0;
  double n2m = 1.0;
  double trap = 0.0;
  double ell = 0.0;
};

// Attenuated ray transform over straight chords of the Euclidean unit disc.
// Data entry (p, q) integrates <f, xi_q^m> exp(alpha0 * tau) over the chord
// through boundary node p with direction xi_q, parameterized so tau = 0 at
// the detector; incoming pairs stay zero. T is the number of quadrature
// intervals per chord. The sample cache is built once, so repeated
// applications (as in iterative reconstruction) only interpolate.
class EuclidForward {
 public:
  EuclidForward(const PolarGrid& grid, double alpha0, int T, int m,
                QuadratureMode mode = QuadratureMode::Trapezoid);
  BoundaryData apply(const TensorField& f) const;
  const PolarGrid& grid() const { return grid_; }
  int rank() const { return m_; }

 private:
  PolarGrid grid_;
  double alpha0_;
  int T_;
  int m_;
  QuadratureMode mode_;
  std::vector<std::vector<RaySample>> rays_;  // indexed p*Q + q, empty if in
};

// Attenuated ray transform along geodesics of g = n^2 I, traced backwards
// from each outgoing boundary pair with step dtau. Inner products with the
// velocity are metric ones, hence the n^(2m) factor on the samples.
class GeodesicForward {
 public:
  GeodesicForward(const PolarGrid& grid, const RefractiveMedium& medium,
                  double dtau, int m);
  BoundaryData apply(const TensorField& f) const;
  void set_alpha(double alpha0);
  const PolarGrid& grid() const { return grid_; }
  int rank() const { return m_; }

 private:
  PolarGrid grid_;
  RefractiveMedium medium_;
  double dtau_;
  int m_;
  std::vector<std::vector<RaySample>> rays_;
};

BoundaryData ray_transform_euclid(const TensorField& field, double alpha0,
                                  const PolarGrid& grid, int T,
                                  QuadratureMode mode = QuadratureMode::Trapezoid);

BoundaryData ray_transform_geodesic(const TensorField& field,
                                    const RefractiveMedium& medium,
                                    const PolarGrid& grid, double dtau);

// Samples grad(phi) on the grid nodes for a scalar potential phi vanishing on
// the boundary circle (checked to 1e-8, else BoundaryNonzero). Uses the
// analytic gradient when given, central differences otherwise. Ray transforms
// of such gradient fields vanish, which makes them convenient null vectors.
TensorField potential_field_gradient(
    const std::function<double(Vec2)>& phi, const PolarGrid& grid,
    const std::function<Vec2(Vec2)>& grad_phi = nullptr);

}  // namespace geotomo
