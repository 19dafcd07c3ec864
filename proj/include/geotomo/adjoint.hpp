#pragma once

#include <functional>
#include <vector>

#include "geotomo/geometry.hpp"
#include "geotomo/grid.hpp"

namespace geotomo {

// Denominator of the backprojection weight at the exit of the ray from an
// interior point. GeometricExit pairs the g-unit outer normal with the g-unit
// exit velocity, n(exit) * <exit, v>_eucl, which is what makes the
// backprojection the discrete adjoint of the ray transform. PaperStartNode is
// the verbatim alternative n(start)^-2 * <gamma_S, v_S>_eucl.
enum class DenominatorMode { GeometricExit, PaperStartNode };

// Backprojection weight for a straight chord: data interpolated at the exit
// angle, attenuated over the remaining travel time and divided by the cosine
// of the exit angle. Near-tangential rays (|denominator| < 1e-8) contribute 0.
double weight_euclid(const BoundaryData& data, const PolarGrid& grid,
                     double alpha0, Vec2 x, int q);

// Geodesic version: traces forward to the boundary, interpolates the data in
// (exit angle, exit direction angle) and attenuates with alpha plus the
// divergence correction Xi_n = (1/2) <grad n, v>_eucl / n along the ray.
double weight_geodesic(const BoundaryData& data, const PolarGrid& grid,
                       const RefractiveMedium& medium, Vec2 x, int q,
                       double dtau,
                       DenominatorMode mode = DenominatorMode::GeometricExit);

// Backprojections [A h](x) = (2 pi / Q) sum_q w(x, phi_q) xi(x, phi_q)^m with
// xi = n(x)^-1 (cos phi_q, sin phi_q). Free functions rebuild the geometry on
// every call; the classes below cache it for iterative use.
TensorField backproject_euclid(const BoundaryData& data, const PolarGrid& grid,
                               double alpha0, int m);
TensorField backproject_geodesic(
    const BoundaryData& data, const PolarGrid& grid,
    const RefractiveMedium& medium, int m, double dtau,
    DenominatorMode mode = DenominatorMode::GeometricExit);

class EuclidBackprojection {
 public:
  EuclidBackprojection(const PolarGrid& grid, double alpha0, int m);
  TensorField apply(const BoundaryData& data) const;
  const PolarGrid& grid() const { return grid_; }

 private:
  struct Tap {
    int p0 = 0, p1 = 0;
    double w0 = 0.0, w1 = 0.0;
    double factor = 0.0;
  };
  PolarGrid grid_;
  double alpha0_;
  int m_;
  std::vector<Tap> taps_;  // indexed node*Q + q
};

class GeodesicBackprojection {
 public:
  GeodesicBackprojection(const PolarGrid& grid, const RefractiveMedium& medium,
                         double dtau, int m,
                         DenominatorMode mode = DenominatorMode::GeometricExit);
  TensorField apply(const BoundaryData& data) const;
  void set_alpha(double alpha0);
  const PolarGrid& grid() const { return grid_; }

 private:
  struct Tap {
    int idx[4] = {0, 0, 0, 0};  // flattened (p, q) data indices
    double w[4] = {0.0, 0.0, 0.0, 0.0};
    double ell = 0.0;  // parameter length to the exit
    double factor = 0.0;
  };
  PolarGrid grid_;
  RefractiveMedium medium_;
  double dtau_;
  int m_;
  DenominatorMode mode_;
  std::vector<Tap> taps_;         // indexed node*Q + q
  std::vector<double> node_nim_;  // n(x)^-m per node
};

// |<If, If>_D - <f, A(If)>_F| / <If, If>_D for a forward/adjoint pair, with
// the metric-weighted discrete inner products.
double duality_defect(
    const TensorField& f, const PolarGrid& grid,
    const RefractiveMedium& medium,
    const std::function<BoundaryData(const TensorField&)>& forward,
    const std::function<TensorField(const BoundaryData&)>& adjoint);

}  // namespace geotomo
