#include "geotomo/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "geotomo/errors.hpp"

namespace geotomo {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Periodic cell lookup: angle -> (lower index, fraction) for N uniform nodes
// at 2*pi*j/N.
inline void angular_cell(double angle, int N, int& j, double& t) {
  double u = angle / (kTwoPi / N);
  double fl = std::floor(u);
  t = u - fl;
  long long jj = static_cast<long long>(fl) % N;
  if (jj < 0) jj += N;
  j = static_cast<int>(jj);
}
}  // namespace

PolarGrid::PolarGrid(int R_, int P_, int Q_) : R(R_), P(P_), Q(Q_) {
  if (R < 2) throw BadConfig("PolarGrid: R must be at least 2");
  if (P < 4 || P % 2 != 0) throw BadConfig("PolarGrid: P must be even, >= 4");
  if (Q < 2) throw BadConfig("PolarGrid: Q must be at least 2");
  cos_mu.resize(P);
  sin_mu.resize(P);
  for (int p = 0; p < P; ++p) {
    cos_mu[p] = std::cos(mu(p));
    sin_mu[p] = std::sin(mu(p));
  }
  cos_phi.resize(Q);
  sin_phi.resize(Q);
  for (int q = 0; q < Q; ++q) {
    cos_phi[q] = std::cos(phi(q));
    sin_phi[q] = std::sin(phi(q));
  }
}

double PolarGrid::dmu() const { return kTwoPi / P; }
double PolarGrid::dphi() const { return kTwoPi / Q; }
double PolarGrid::mu(int p) const { return kTwoPi * p / P; }
double PolarGrid::phi(int q) const { return kTwoPi * q / Q; }

InterpStencil interp_stencil(const PolarGrid& grid, Vec2 x) {
  double rho = norm(x);
  if (rho > 1.0 + 1e-12)
    throw OutsideDomain("interp_stencil: point outside the closed disc");
  if (rho > 1.0) rho = 1.0;

  InterpStencil st;
  double angle = std::atan2(x.y, x.x);
  if (angle < 0.0) angle += kTwoPi;
  int p;
  double s;
  angular_cell(angle, grid.P, p, s);
  int pn = (p + 1) % grid.P;

  double u = rho * grid.R;
  if (u < 1.0) {
    // Inside the innermost ring: blend the center value with the two nearest
    // ring-1 nodes. At the disc center the angular part has zero weight.
    st.inner = true;
    st.w_center = 1.0 - u;
    st.node[0] = grid.node_index(0, p);
    st.node[1] = grid.node_index(0, pn);
    st.w[0] = u * (1.0 - s);
    st.w[1] = u * s;
    return st;
  }
  int fl = std::min(static_cast<int>(std::floor(u)), grid.R - 1);
  int r = fl - 1;  // inner ring of the containing annulus cell
  double t = u - fl;
  st.node[0] = grid.node_index(r, p);
  st.node[1] = grid.node_index(r + 1, p);
  st.node[2] = grid.node_index(r, pn);
  st.node[3] = grid.node_index(r + 1, pn);
  st.w[0] = (1.0 - t) * (1.0 - s);
  st.w[1] = t * (1.0 - s);
  st.w[2] = (1.0 - t) * s;
  st.w[3] = t * s;
  return st;
}

double center_value(const TensorField& field, int k) {
  double sum = 0.0;
  for (int p = 0; p < field.P; ++p) sum += field.at(0, p, k);
  return sum / field.P;
}

std::vector<double> sample_interior(const TensorField& field,
                                    const PolarGrid& grid, Vec2 x) {
  InterpStencil st = interp_stencil(grid, x);
  int nc = field.components();
  std::vector<double> out(nc, 0.0);
  int taps = st.inner ? 2 : 4;
  for (int k = 0; k < nc; ++k) {
    double v = 0.0;
    for (int i = 0; i < taps; ++i)
      v += st.w[i] * field.values[static_cast<size_t>(st.node[i]) * nc + k];
    if (st.inner) v += st.w_center * center_value(field, k);
    out[k] = v;
  }
  return out;
}

double sample_boundary_1d(const BoundaryData& data, const PolarGrid& grid,
                          double mu_tilde, int q) {
  int p;
  double t;
  angular_cell(mu_tilde, grid.P, p, t);
  int pn = (p + 1) % grid.P;
  return (1.0 - t) * data.at(p, q) + t * data.at(pn, q);
}

double sample_boundary_2d(const BoundaryData& data, const PolarGrid& grid,
                          double mu_tilde, double phi_tilde) {
  int p, q;
  double t, s;
  angular_cell(mu_tilde, grid.P, p, t);
  angular_cell(phi_tilde, grid.Q, q, s);
  int pn = (p + 1) % grid.P;
  int qn = (q + 1) % grid.Q;
  return (1.0 - t) * ((1.0 - s) * data.at(p, q) + s * data.at(p, qn)) +
         t * ((1.0 - s) * data.at(pn, q) + s * data.at(pn, qn));
}

std::pair<int, int> grid_ratio_hint(int total_nodes) {
  if (total_nodes < 8) throw BadConfig("grid_ratio_hint: too few nodes");
  // Choose R near sqrt(N/pi) so that P = N/R lands near pi*R, then round P
  // to the nearest even integer. Pick the candidate closest to P = pi*R.
  double r_ideal = std::sqrt(total_nodes / std::numbers::pi);
  int best_R = 0, best_P = 0;
  double best_gap = 0.0;
  for (int R : {static_cast<int>(std::floor(r_ideal)),
                static_cast<int>(std::ceil(r_ideal))}) {
    if (R < 2) R = 2;
    double p_real = static_cast<double>(total_nodes) / R;
    int P = 2 * static_cast<int>(std::lround(p_real / 2.0));
    if (P < 4) P = 4;
    double gap = std::abs(P - std::numbers::pi * R);
    if (best_R == 0 || gap < best_gap) {
      best_R = R;
      best_P = P;
      best_gap = gap;
    }
  }
  return {best_R, best_P};
}

}  // namespace geotomo
