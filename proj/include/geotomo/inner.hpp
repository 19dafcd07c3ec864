#pragma once

#include "geotomo/geometry.hpp"
#include "geotomo/grid.hpp"

namespace geotomo {

// Discrete L2 inner products. Field values live on the polar nodes and are
// integrated with the area element rho * drho * dmu (half weight on the
// boundary ring, which sits on the integration endpoint rho = 1) times the
// metric volume n^2; the pointwise product of two rank-m tensors carries the
// binomial component multiplicities and the metric factor n^(2m). Boundary
// data is integrated with dmu * dphi times the metric arc length factor n.
// With these weights the backprojection operators are discrete adjoints of
// the ray transforms up to quadrature error.
double field_inner(const TensorField& a, const TensorField& b,
                   const PolarGrid& grid, const RefractiveMedium& medium);
double field_norm(const TensorField& a, const PolarGrid& grid,
                  const RefractiveMedium& medium);
double data_inner(const BoundaryData& a, const BoundaryData& b,
                  const PolarGrid& grid, const RefractiveMedium& medium);
double data_norm(const BoundaryData& a, const PolarGrid& grid,
                 const RefractiveMedium& medium);

// n-free variants (polar weights only), used for error reporting and noise
// scaling where the metric factor would cancel anyway.
double field_inner(const TensorField& a, const TensorField& b,
                   const PolarGrid& grid);
double field_norm(const TensorField& a, const PolarGrid& grid);
double data_norm(const BoundaryData& a, const PolarGrid& grid);

double binomial(int m, int k);

// Small in-place field algebra used by the iterative solvers.
void axpy(double s, const TensorField& x, TensorField& y);   // y += s*x
void scale(double s, TensorField& x);
BoundaryData subtract(const BoundaryData& a, const BoundaryData& b);

}  // namespace geotomo
