#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "geotomo/vec2.hpp"

namespace geotomo {

// Polar grid on the unit disc. Rings r = 0..R-1 sit at radius (r+1)/R (the
// outermost ring is the boundary circle), angular nodes p = 0..P-1 at
// mu_p = 2*pi*p/P, and direction nodes q = 0..Q-1 at phi_q = 2*pi*q/Q.
// P must be even so every angular node has an antipodal partner.
struct PolarGrid {
  int R = 0;
  int P = 0;
  int Q = 0;

  PolarGrid(int R_, int P_, int Q_);

  double drho() const { return 1.0 / R; }
  double dmu() const;
  double dphi() const;
  double rho(int r) const { return static_cast<double>(r + 1) / R; }
  double mu(int p) const;
  double phi(int q) const;
  Vec2 node(int r, int p) const { return rho(r) * boundary_node(p); }
  Vec2 boundary_node(int p) const { return {cos_mu[p], sin_mu[p]}; }
  Vec2 direction(int q) const { return {cos_phi[q], sin_phi[q]}; }
  int node_index(int r, int p) const { return r * P + p; }
  int num_nodes() const { return R * P; }

  std::vector<double> cos_mu, sin_mu;
  std::vector<double> cos_phi, sin_phi;
};

// Symmetric rank-m tensor field sampled at the grid nodes. A rank-m tensor in
// the plane has m+1 independent components, stored per node as component k =
// number of indices equal to 2 (so m=1 stores (f1, f2)).
struct TensorField {
  int R = 0;
  int P = 0;
  int m = 0;
  std::vector<double> values;  // node-major: values[(r*P + p)*(m+1) + k]

  TensorField() = default;
  TensorField(int R_, int P_, int m_)
      : R(R_), P(P_), m(m_), values(static_cast<size_t>(R_) * P_ * (m_ + 1)) {}

  int components() const { return m + 1; }
  double& at(int r, int p, int k) {
    return values[(static_cast<size_t>(r) * P + p) * (m + 1) + k];
  }
  double at(int r, int p, int k) const {
    return values[(static_cast<size_t>(r) * P + p) * (m + 1) + k];
  }
};

// Boundary transform data: one value per boundary node p and direction q.
// Incoming pairs (<x_p, xi_q> < 0) are kept identically zero.
struct BoundaryData {
  int P = 0;
  int Q = 0;
  std::vector<double> values;  // values[p*Q + q]

  BoundaryData() = default;
  BoundaryData(int P_, int Q_)
      : P(P_), Q(Q_), values(static_cast<size_t>(P_) * Q_) {}

  double& at(int p, int q) { return values[static_cast<size_t>(p) * Q + q]; }
  double at(int p, int q) const {
    return values[static_cast<size_t>(p) * Q + q];
  }
};

// Interpolation stencil for a point of the disc: either a bilinear blend of
// four annulus nodes, or (inside the innermost ring) a blend of the ring-1
// average "center value" with the two nearest ring-1 nodes.
struct InterpStencil {
  bool inner = false;
  int node[4] = {0, 0, 0, 0};
  double w[4] = {0.0, 0.0, 0.0, 0.0};
  double w_center = 0.0;  // weight on the ring-average center value (inner)
};

InterpStencil interp_stencil(const PolarGrid& grid, Vec2 x);

// Mean of the ring-1 node values of component k; used as the center value.
double center_value(const TensorField& field, int k);

// Bilinear sample of all components of `field` at x (throws OutsideDomain
// more than 1e-12 outside the closed disc).
std::vector<double> sample_interior(const TensorField& field,
                                    const PolarGrid& grid, Vec2 x);

// Periodic linear interpolation of boundary data in mu at fixed direction q.
double sample_boundary_1d(const BoundaryData& data, const PolarGrid& grid,
                          double mu_tilde, int q);

// Periodic bilinear interpolation of boundary data in (mu, phi).
double sample_boundary_2d(const BoundaryData& data, const PolarGrid& grid,
                          double mu_tilde, double phi_tilde);

// Suggest (R, P) with R*P close to total_nodes and P as near pi*R as an even
// integer allows.
std::pair<int, int> grid_ratio_hint(int total_nodes);

}  // namespace geotomo
