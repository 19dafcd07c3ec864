#include "geotomo/inner.hpp"

#include <cmath>

#include "geotomo/errors.hpp"

namespace geotomo {

namespace {

double ring_weight(const PolarGrid& grid, int r) {
  double w = grid.rho(r) * grid.drho() * grid.dmu();
  if (r == grid.R - 1) w *= 0.5;  // boundary ring sits on the endpoint rho=1
  return w;
}

template <typename NPow>
double field_inner_impl(const TensorField& a, const TensorField& b,
                        const PolarGrid& grid, NPow npow) {
  if (a.m != b.m || a.R != b.R || a.P != b.P)
    throw BadConfig("field_inner: mismatched fields");
  int nc = a.components();
  double total = 0.0;
  for (int r = 0; r < grid.R; ++r) {
    double wr = ring_weight(grid, r);
    for (int p = 0; p < grid.P; ++p) {
      double s = 0.0;
      for (int k = 0; k < nc; ++k)
        s += binomial(a.m, k) * a.at(r, p, k) * b.at(r, p, k);
      total += wr * npow(r, p) * s;
    }
  }
  return total;
}

}  // namespace

double binomial(int m, int k) {
  double v = 1.0;
  for (int i = 0; i < k; ++i) v = v * (m - i) / (i + 1);
  return v;
}

double field_inner(const TensorField& a, const TensorField& b,
                   const PolarGrid& grid, const RefractiveMedium& medium) {
  if (medium.euclidean) return field_inner(a, b, grid);
  int m = a.m;
  return field_inner_impl(a, b, grid, [&](int r, int p) {
    double n = medium.eval_n(grid.node(r, p));
    return std::pow(n, 2 * m + 2);
  });
}

double field_inner(const TensorField& a, const TensorField& b,
                   const PolarGrid& grid) {
  return field_inner_impl(a, b, grid, [](int, int) { return 1.0; });
}

double field_norm(const TensorField& a, const PolarGrid& grid,
                  const RefractiveMedium& medium) {
  return std::sqrt(field_inner(a, a, grid, medium));
}

double field_norm(const TensorField& a, const PolarGrid& grid) {
  return std::sqrt(field_inner(a, a, grid));
}

double data_inner(const BoundaryData& a, const BoundaryData& b,
                  const PolarGrid& grid, const RefractiveMedium& medium) {
  if (a.P != b.P || a.Q != b.Q)
    throw BadConfig("data_inner: mismatched data tables");
  double w = grid.dmu() * grid.dphi();
  double total = 0.0;
  for (int p = 0; p < grid.P; ++p) {
    double np = medium.euclidean ? 1.0 : medium.eval_n(grid.boundary_node(p));
    double row = 0.0;
    for (int q = 0; q < grid.Q; ++q) row += a.at(p, q) * b.at(p, q);
    total += np * row;
  }
  return w * total;
}

double data_norm(const BoundaryData& a, const PolarGrid& grid,
                 const RefractiveMedium& medium) {
  return std::sqrt(data_inner(a, a, grid, medium));
}

double data_norm(const BoundaryData& a, const PolarGrid& grid) {
  double total = 0.0;
  for (double v : a.values) total += v * v;
  return std::sqrt(total * grid.dmu() * grid.dphi());
}

void axpy(double s, const TensorField& x, TensorField& y) {
  for (size_t i = 0; i < y.values.size(); ++i) y.values[i] += s * x.values[i];
}

void scale(double s, TensorField& x) {
  for (double& v : x.values) v *= s;
}

BoundaryData subtract(const BoundaryData& a, const BoundaryData& b) {
  BoundaryData out(a.P, a.Q);
  for (size_t i = 0; i < out.values.size(); ++i)
    out.values[i] = a.values[i] - b.values[i];
  return out;
}

}  // namespace geotomo
