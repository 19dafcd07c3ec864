#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "geotomo/adjoint.hpp"
#include "geotomo/errors.hpp"
#include "geotomo/geometry.hpp"
#include "geotomo/transport_pde.hpp"
#include "test_support.hpp"

using namespace geotomo;
using geotomo::testing::random_smooth_field;

TEST_CASE("assembled stencil matches hand-computed coefficients") {
  PolarGrid grid(3, 4, 4);
  const double eps = 0.02, alpha0 = 0.07;
  BoundaryData bw(4, 4);
  for (int p = 0; p < 4; ++p) bw.at(p, 0) = 1.0;
  TransportSystem sys = assemble_system(grid, 0, eps, alpha0, bw);
  REQUIRE(sys.A.rows() == 8);
  Eigen::MatrixXd A(sys.A);

  // Row (r=0, p=0): rho = 1/3, theta = phi_0 - mu_0 = 0. The radial second
  // difference reaches the antipodal node (0, 2) through the center.
  const double pi2 = std::numbers::pi * std::numbers::pi;
  double diag = alpha0 + 3.0 + eps * 9.0 + 2.0 * eps * 9.0 * 4.0 / pi2 +
                eps * 9.0;
  double up = -3.0 - eps * 9.0 - 2.0 * eps * 9.0 / 3.0;
  CHECK(A(0, 0) == doctest::Approx(diag).epsilon(1e-13));
  CHECK(A(0, 4) == doctest::Approx(up).epsilon(1e-13));
  CHECK(A(0, 2) == doctest::Approx(-eps * 9.0 / 3.0).epsilon(1e-13));
  CHECK(A(0, 1) == doctest::Approx(-eps * 9.0 * 4.0 / pi2).epsilon(1e-13));
  CHECK(A(0, 3) == doctest::Approx(-eps * 9.0 * 4.0 / pi2).epsilon(1e-13));

  // Row (r=1, p=0) is the last interior ring: its upward coefficient moves to
  // the right-hand side with the boundary value.
  double up1 = -3.0 - eps / (2.0 / 9.0) - eps * 9.0;
  CHECK(sys.rhs[4] == doctest::Approx(-up1 * bw.at(0, 0)).epsilon(1e-13));
  // Rows with theta = -pi/2 (p = 1) have a vanishing radial transport term
  // and antisymmetric angular coupling.
  double rho0 = 1.0 / 3.0;
  double cmu = -eps / (rho0 * rho0 * (pi2 / 4.0));
  double st = std::sin(-std::numbers::pi / 2.0);
  CHECK(A(1, 2) ==
        doctest::Approx(cmu - st / (2.0 * rho0 * (std::numbers::pi / 2.0)))
            .epsilon(1e-12));
  CHECK(A(1, 0) ==
        doctest::Approx(cmu + st / (2.0 * rho0 * (std::numbers::pi / 2.0)))
            .epsilon(1e-12));
}

TEST_CASE("constant boundary data yields the constant solution") {
  PolarGrid grid(8, 16, 8);
  BoundaryData bw(16, 8);
  for (int p = 0; p < 16; ++p) bw.at(p, 3) = 2.5;
  TransportSystem sys = assemble_system(grid, 3, 0.05, 0.0, bw);
  MinNormResult res = solve_min_norm(sys);
  REQUIRE(res.x.size() == (8 - 1) * 16);
  for (int i = 0; i < res.x.size(); ++i)
    CHECK(res.x[i] == doctest::Approx(2.5).epsilon(1e-8));
}

TEST_CASE("zero boundary data yields the zero solution") {
  PolarGrid grid(6, 12, 6);
  BoundaryData bw(12, 6);
  TransportSystem sys = assemble_system(grid, 1, 0.01, 0.1, bw);
  MinNormResult res = solve_min_norm(sys);
  for (int i = 0; i < res.x.size(); ++i) CHECK(std::abs(res.x[i]) < 1e-12);
}

TEST_CASE("vanishing-viscosity solve tracks the characteristic solution") {
  // For n = 1, eps = 0 the equation transports boundary values along straight
  // chords with exponential attenuation: w(x) = psi(exit) exp(-alpha0 tau+).
  PolarGrid grid(16, 50, 12);
  const double alpha0 = 0.1;
  auto psi = [](Vec2 y) {
    return 1.0 + 0.4 * y.x - 0.25 * y.y + 0.3 * y.x * y.y;
  };
  auto exact = [&](Vec2 x, Vec2 xi) {
    double tau = tau_plus_euclid(x, xi);
    Vec2 exit = x + tau * xi;
    return psi(exit) * std::exp(-alpha0 * tau);
  };
  BoundaryData bw(grid.P, grid.Q);
  for (int p = 0; p < grid.P; ++p)
    for (int q = 0; q < grid.Q; ++q)
      bw.at(p, q) = exact(grid.boundary_node(p), grid.direction(q));

  double num = 0.0, den = 0.0;
  for (int q = 0; q < grid.Q; ++q) {
    TransportSystem sys = assemble_system(grid, q, 0.0, alpha0, bw);
    MinNormResult res = solve_min_norm(sys);
    Vec2 xi = grid.direction(q);
    for (int r = 0; r + 1 < grid.R; ++r)
      for (int p = 0; p < grid.P; ++p) {
        double w_ex = exact(grid.node(r, p), xi);
        double diff = res.x[r * grid.P + p] - w_ex;
        num += diff * diff;
        den += w_ex * w_ex;
      }
  }
  double rel_rms = std::sqrt(num / den);
  double bound = 2.0 * (grid.drho() + grid.dmu() * grid.dmu());
  CHECK(rel_rms < bound);
}

TEST_CASE("iterative and dense least-squares solutions agree") {
  // 2432 unknowns forces the LSQR path; the dense rank-revealing solve on the
  // same system is the oracle.
  PolarGrid grid(20, 128, 8);
  BoundaryData bw(grid.P, grid.Q);
  for (int p = 0; p < grid.P; ++p) {
    Vec2 x = grid.boundary_node(p);
    bw.at(p, 5) = 1.0 + 0.5 * x.x - 0.3 * x.y;
  }
  TransportSystem sys = assemble_system(grid, 5, 0.1, 0.05, bw);
  MinNormResult res = solve_min_norm(sys);
  Eigen::MatrixXd dense(sys.A);
  Eigen::VectorXd ref =
      Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd>(dense).solve(
          sys.rhs);
  double worst = 0.0;
  for (int i = 0; i < res.x.size(); ++i)
    worst = std::max(worst, std::abs(res.x[i] - ref[i]));
  CHECK(worst < 1e-5 * (1.0 + ref.norm()));
}

TEST_CASE("boundary weights agree with the chord weight formula") {
  PolarGrid grid(8, 20, 10);
  BoundaryData data(20, 10);
  for (int p = 0; p < 20; ++p)
    for (int q = 0; q < 10; ++q) {
      Vec2 x = grid.boundary_node(p);
      Vec2 xi = grid.direction(q);
      if (dot(x, xi) > 0.0) data.at(p, q) = 1.0 + 0.2 * p + 0.1 * q;
    }
  BoundaryData bw = boundary_w(data, grid, 0.07);
  for (int p = 0; p < 20; ++p)
    for (int q = 0; q < 10; ++q)
      CHECK(bw.at(p, q) ==
            doctest::Approx(
                weight_euclid(data, grid, 0.07, grid.boundary_node(p), q)));
}

TEST_CASE("transport-equation adjoint basics") {
  PolarGrid grid(12, 36, 12);
  BoundaryData zero(36, 12);
  TensorField z = pde_adjoint(zero, grid, 0.0, 0.1, 1);
  for (double v : z.values) CHECK(v == 0.0);

  TensorField f = random_smooth_field(grid, 1, 21);
  double d_int = duality_defect(f, AdjointKind::Integral, grid, 0.0);
  double d_pde_visc = duality_defect(f, AdjointKind::Pde, grid, 0.0, 0.1);
  double d_pde_sharp = duality_defect(f, AdjointKind::Pde, grid, 0.0, 0.0);
  // At this resolution the integral adjoint is already better than the
  // viscous transport solve, and removing the viscosity tightens the defect.
  CHECK(d_int < 0.06);
  CHECK(d_pde_visc > d_int);
  CHECK(d_pde_sharp < d_pde_visc);
  CHECK(d_pde_sharp < 0.03);
}
