#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "geotomo/adjoint.hpp"
#include "geotomo/forward.hpp"
#include "geotomo/geometry.hpp"
#include "geotomo/inner.hpp"
#include "test_support.hpp"

using namespace geotomo;
using geotomo::testing::random_smooth_field;

TEST_CASE("chord weight reproduces hand geometry") {
  PolarGrid grid(4, 8, 8);
  BoundaryData data(8, 8);
  data.at(1, 0) = 1.0;  // x at mu = pi/4, direction (1, 0)
  const double s2 = std::sqrt(2.0);
  Vec2 x1 = grid.boundary_node(1);
  Vec2 x3 = grid.boundary_node(3);

  // At the data node itself the exit is immediate: w = h / <x, xi>.
  CHECK(weight_euclid(data, grid, 0.0, x1, 0) == doctest::Approx(s2));
  // From the antipodal entry point of the same chord the exit is x1 again,
  // a travel of sqrt(2); without attenuation the weight is unchanged.
  CHECK(weight_euclid(data, grid, 0.0, x3, 0) == doctest::Approx(s2));
  CHECK(weight_euclid(data, grid, 0.1, x3, 0) ==
        doctest::Approx(s2 * std::exp(-0.1 * s2)));
  // Midpoint of the chord: half the travel remains.
  Vec2 mid{0.0, s2 / 2.0};
  CHECK(weight_euclid(data, grid, 0.1, mid, 0) ==
        doctest::Approx(s2 * std::exp(-0.1 * s2 / 2.0)));
  // Tangential rays are cut off instead of dividing by zero.
  CHECK(weight_euclid(data, grid, 0.0, {0.0, 1.0}, 0) == 0.0);
}

TEST_CASE("backprojection matches the per-node weight sum") {
  PolarGrid grid(6, 16, 16);
  BoundaryData data(16, 16);
  for (int p = 0; p < 16; ++p)
    for (int q = 0; q < 16; ++q) {
      Vec2 x = grid.boundary_node(p);
      Vec2 xi = grid.direction(q);
      if (dot(x, xi) > 0.0) data.at(p, q) = 1.0 + 0.3 * x.x - 0.2 * xi.y;
    }
  const double alpha0 = 0.05;
  TensorField bp = backproject_euclid(data, grid, alpha0, 1);
  const double scale = 2.0 * std::numbers::pi / grid.Q;
  for (int r : {0, 2, 5})
    for (int p : {0, 3, 11}) {
      Vec2 x = grid.node(r, p);
      double acc0 = 0.0, acc1 = 0.0;
      for (int q = 0; q < grid.Q; ++q) {
        double w = weight_euclid(data, grid, alpha0, x, q);
        acc0 += w * grid.cos_phi[q];
        acc1 += w * grid.sin_phi[q];
      }
      CHECK(bp.at(r, p, 0) == doctest::Approx(scale * acc0).epsilon(1e-10));
      CHECK(bp.at(r, p, 1) == doctest::Approx(scale * acc1).epsilon(1e-10));
    }
  // The caching class agrees with the free function.
  EuclidBackprojection cached(grid, alpha0, 1);
  TensorField bp2 = cached.apply(data);
  for (int r = 0; r < grid.R; ++r)
    for (int p = 0; p < grid.P; ++p)
      for (int k = 0; k < 2; ++k)
        CHECK(bp2.at(r, p, k) == doctest::Approx(bp.at(r, p, k)));
  // Zero data backprojects to zero.
  TensorField z = cached.apply(BoundaryData(16, 16));
  for (double v : z.values) CHECK(v == 0.0);
}

TEST_CASE("straight-chord adjoint duality holds at working resolution") {
  PolarGrid grid(34, 106, 106);
  RefractiveMedium med = make_medium("euclid");
  for (unsigned seed : {7u, 8u}) {
    TensorField f = random_smooth_field(grid, 1, seed);
    EuclidForward fwd(grid, 0.0, 200, 1);
    EuclidBackprojection adj(grid, 0.0, 1);
    double defect = duality_defect(
        f, grid, med, [&](const TensorField& x) { return fwd.apply(x); },
        [&](const BoundaryData& d) { return adj.apply(d); });
    CHECK(defect < 1e-3);
  }
}

TEST_CASE("geodesic adjoint duality holds for both media") {
  PolarGrid grid(16, 50, 50);
  const double dtau = 0.005;
  for (const char* name : {"euclid", "paper-slow"}) {
    for (double alpha0 : {0.0, 0.1}) {
      RefractiveMedium med = make_medium(name, alpha0);
      TensorField f = random_smooth_field(grid, 1, 11);
      GeodesicForward fwd(grid, med, dtau, 1);
      GeodesicBackprojection adj(grid, med, dtau, 1);
      double defect = duality_defect(
          f, grid, med, [&](const TensorField& x) { return fwd.apply(x); },
          [&](const BoundaryData& d) { return adj.apply(d); });
      CAPTURE(name);
      CAPTURE(alpha0);
      CHECK(defect < 0.01);
    }
  }
}

TEST_CASE("geometric exit denominator beats the start-node variant") {
  PolarGrid grid(12, 36, 36);
  RefractiveMedium med = make_medium("paper-slow");
  TensorField f = random_smooth_field(grid, 1, 3);
  GeodesicForward fwd(grid, med, 0.01, 1);
  GeodesicBackprojection geo(grid, med, 0.01, 1, DenominatorMode::GeometricExit);
  GeodesicBackprojection start(grid, med, 0.01, 1,
                               DenominatorMode::PaperStartNode);
  auto defect_of = [&](const GeodesicBackprojection& adj) {
    return duality_defect(
        f, grid, med, [&](const TensorField& x) { return fwd.apply(x); },
        [&](const BoundaryData& d) { return adj.apply(d); });
  };
  double d_geo = defect_of(geo);
  double d_start = defect_of(start);
  CHECK(d_geo < 0.05);
  CHECK(d_geo < d_start);
}

TEST_CASE("geodesic backprojection attenuation rescaling") {
  PolarGrid grid(10, 30, 30);
  RefractiveMedium med = make_medium("paper-slow");
  BoundaryData data(30, 30);
  for (int p = 0; p < 30; ++p)
    for (int q = 0; q < 30; ++q) {
      Vec2 x = grid.boundary_node(p);
      Vec2 xi = grid.direction(q);
      if (dot(x, xi) > 0.0) data.at(p, q) = 0.5 + 0.1 * p - 0.02 * q;
    }
  GeodesicBackprojection adj(grid, med, 0.01, 1);
  adj.set_alpha(0.1);
  RefractiveMedium med_att = make_medium("paper-slow", 0.1);
  GeodesicBackprojection fresh(grid, med_att, 0.01, 1);
  TensorField a = adj.apply(data);
  TensorField b = fresh.apply(data);
  for (size_t i = 0; i < a.values.size(); ++i)
    CHECK(a.values[i] == doctest::Approx(b.values[i]).epsilon(1e-12));
}
