#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <memory>
#include <vector>

#include "geotomo/grid.hpp"

namespace geotomo {

// Finite-difference discretization of the stationary transport equation for
// the backprojection weight w(., phi_q) on the polar grid (Euclidean metric):
//
//   -eps (w_rho/rho + w_rhorho + w_mumu/rho^2)
//   - cos(phi_q - mu) w_rho - sin(phi_q - mu) w_mu / rho + alpha0 w = 0
//
// with w given on the boundary ring. Radial first derivatives use forward
// differences, everything else central ones; at the innermost ring the radial
// second difference reaches through the disc center to the antipodal node,
// (2 w_{2,p} - 3 w_{1,p} + w_{1,p+P/2}) / (3 drho^2). Unknowns are the
// interior rings, ordered row = r*P + p with r = 0..R-2.
struct TransportSystem {
  Eigen::SparseMatrix<double> A;
  Eigen::VectorXd rhs;
  int R = 0;
  int P = 0;
  int q = 0;
  double epsilon = 0.0;
  double alpha0 = 0.0;
};

// Boundary values w(x_p, xi_q) on the boundary ring, computed from the data
// by the chord weight formula (exact exit for outgoing pairs, interpolated
// entry-side values for incoming ones).
BoundaryData boundary_w(const BoundaryData& data, const PolarGrid& grid,
                        double alpha0);

TransportSystem assemble_system(const PolarGrid& grid, int q, double epsilon,
                                double alpha0, const BoundaryData& bw);

struct MinNormResult {
  Eigen::VectorXd x;
  double residual = 0.0;    // |A x - rhs|
  double optimality = 0.0;  // |A^T (A x - rhs)| / (|A|_F |A x - rhs|)
  int iterations = 0;
  bool converged = false;
};

// Minimum-norm least-squares solve. Dense complete orthogonal decomposition
// for systems up to 2000 unknowns (rank-revealing, so near-null modes of the
// barely viscous systems are truncated rather than inverted), column-scaled
// LSQR from a zero start otherwise, which regularizes the same modes through
// the Krylov subspace. A sparse direct solve would instead invert them and
// blow up for small epsilon. max_iters = 0 means 10 * unknowns. Throws
// NonConvergence only when the iteration cap is hit while still far from
// least-squares optimality.
MinNormResult solve_min_norm(const TransportSystem& system, double tol = 1e-10,
                             int max_iters = 0);

// Adjoint via the transport PDE: solve for w per direction, then backproject
// (2 pi / Q) sum_q w xi_q^m. Factorizations are cached per direction when the
// dense path applies, so repeated applications are cheap.
class PdeAdjoint {
 public:
  PdeAdjoint(const PolarGrid& grid, double alpha0, double epsilon, int m);
  ~PdeAdjoint();
  TensorField apply(const BoundaryData& data) const;
  const PolarGrid& grid() const { return grid_; }

 private:
  PolarGrid grid_;
  double alpha0_;
  double epsilon_;
  int m_;
  struct PerDirection;
  std::vector<std::unique_ptr<PerDirection>> dirs_;
};

TensorField pde_adjoint(const BoundaryData& data, const PolarGrid& grid,
                        double alpha0, double epsilon, int m);

enum class AdjointKind { Integral, Pde };

// Duality defect of the chosen adjoint against the Euclidean ray transform
// (trapezoid quadrature with T intervals per chord).
double duality_defect(const TensorField& f, AdjointKind kind,
                      const PolarGrid& grid, double alpha0,
                      double epsilon = 0.0, int T = 200);

}  // namespace geotomo
