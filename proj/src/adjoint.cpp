#include "geotomo/adjoint.hpp"

#include <cmath>
#include <numbers>

#include "geotomo/errors.hpp"
#include "geotomo/inner.hpp"

namespace geotomo {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Rays tangent to the rim contribute nothing, but computing their exit
// denominator involves sqrt(1 - |x|^2)-type cancellation whose roundoff
// floor is about sqrt(machine epsilon) = 1e-8, not zero. When the node and
// direction lattices align exactly with a tangency (Q divisible by 4) the
// computed denominator lands at that floor and would otherwise mint a 1e8
// weight. Genuine non-tangential samples stay above 2e-3 for every grid
// shape in use, so cutting at 1e-6 removes only the degenerate class.
constexpr double kTangentCut = 1e-6;

double wrap_angle(double a) {
  a = std::fmod(a, kTwoPi);
  if (a < 0.0) a += kTwoPi;
  return a;
}

// Trace geometry shared by the geodesic weight and the cached taps: exit
// angles, total parameter length, attenuation integral along the ray and the
// exit denominator.
struct ExitInfo {
  double mu_tilde = 0.0;
  double phi_tilde = 0.0;
  double ell = 0.0;
  double att = 0.0;    // integral of alpha + Xi_n
  double att_xi = 0.0; // integral of Xi_n alone
  double denom = 0.0;
};

ExitInfo trace_exit(const RefractiveMedium& medium, const PolarGrid& grid,
                    Vec2 x, int q, double dtau, DenominatorMode mode) {
  GeodesicPath path = geodesic_trace(medium, x, grid.direction(q), dtau);
  size_t S = path.points.size() - 1;
  ExitInfo info;
  info.ell = path.param_length();
  double att = 0.0, att_xi = 0.0;
  double prev = 0.0, prev_xi = 0.0;
  for (size_t s = 0; s <= S; ++s) {
    Vec2 pos = (s == S) ? path.exit_point : path.points[s];
    Vec2 vel = path.velocities[s];
    double a = medium.eval_alpha(pos, vel);
    double xi = 0.5 * dot(medium.eval_grad(pos), vel) / medium.eval_n(pos);
    if (s > 0) {
      double width = (s == S) ? path.dtau_star : path.dtau;
      att += 0.5 * width * (prev + a + prev_xi + xi);
      att_xi += 0.5 * width * (prev_xi + xi);
    }
    prev = a;
    prev_xi = xi;
  }
  info.att = att;
  info.att_xi = att_xi;
  Vec2 e = path.exit_point;
  Vec2 v = path.exit_velocity();
  info.mu_tilde = wrap_angle(std::atan2(e.y, e.x));
  info.phi_tilde = wrap_angle(std::atan2(v.y, v.x));
  if (mode == DenominatorMode::GeometricExit) {
    info.denom = medium.eval_n(e) * dot(e, v);
  } else {
    double n0 = medium.eval_n(x);
    info.denom = dot(path.points.back(), v) / (n0 * n0);
  }
  return info;
}

}  // namespace

double weight_euclid(const BoundaryData& data, const PolarGrid& grid,
                     double alpha0, Vec2 x, int q) {
  Vec2 u = grid.direction(q);
  double tau_plus = tau_plus_euclid(x, u);
  double denom = dot(x, u) + tau_plus;
  if (std::abs(denom) < kTangentCut) return 0.0;
  Vec2 e = x + tau_plus * u;
  double h = sample_boundary_1d(data, grid, wrap_angle(std::atan2(e.y, e.x)), q);
  return h * std::exp(-alpha0 * tau_plus) / denom;
}

double weight_geodesic(const BoundaryData& data, const PolarGrid& grid,
                       const RefractiveMedium& medium, Vec2 x, int q,
                       double dtau, DenominatorMode mode) {
  ExitInfo info = trace_exit(medium, grid, x, q, dtau, mode);
  if (std::abs(info.denom) < kTangentCut) return 0.0;
  double h = sample_boundary_2d(data, grid, info.mu_tilde, info.phi_tilde);
  return h * std::exp(-info.att) / info.denom;
}

EuclidBackprojection::EuclidBackprojection(const PolarGrid& grid,
                                           double alpha0, int m)
    : grid_(grid), alpha0_(alpha0), m_(m) {
  taps_.resize(static_cast<size_t>(grid.num_nodes()) * grid.Q);
  const int nodes = grid_.num_nodes();
#pragma omp parallel for schedule(static)
  for (int n = 0; n < nodes; ++n) {
    Vec2 x = grid_.node(n / grid_.P, n % grid_.P);
    for (int q = 0; q < grid_.Q; ++q) {
      Vec2 u = grid_.direction(q);
      double tau_plus = tau_plus_euclid(x, u);
      double denom = dot(x, u) + tau_plus;
      Tap& t = taps_[static_cast<size_t>(n) * grid_.Q + q];
      if (std::abs(denom) < kTangentCut) continue;  // factor stays zero
      Vec2 e = x + tau_plus * u;
      double angle = wrap_angle(std::atan2(e.y, e.x));
      double upos = angle / grid_.dmu();
      double fl = std::floor(upos);
      double frac = upos - fl;
      int p0 = static_cast<int>(fl) % grid_.P;
      t.p0 = p0;
      t.p1 = (p0 + 1) % grid_.P;
      t.w0 = 1.0 - frac;
      t.w1 = frac;
      t.factor = std::exp(-alpha0 * tau_plus) / denom;
    }
  }
}

TensorField EuclidBackprojection::apply(const BoundaryData& data) const {
  if (data.P != grid_.P || data.Q != grid_.Q)
    throw BadConfig("EuclidBackprojection: data does not match grid");
  TensorField out(grid_.R, grid_.P, m_);
  const int nodes = grid_.num_nodes();
  const double scale = kTwoPi / grid_.Q;
  const int nc = m_ + 1;
#pragma omp parallel for schedule(static)
  for (int n = 0; n < nodes; ++n) {
    double acc[8] = {0.0};
    for (int q = 0; q < grid_.Q; ++q) {
      const Tap& t = taps_[static_cast<size_t>(n) * grid_.Q + q];
      if (t.factor == 0.0) continue;
      double h = t.w0 * data.at(t.p0, q) + t.w1 * data.at(t.p1, q);
      double w = h * t.factor;
      double c = grid_.cos_phi[q], s = grid_.sin_phi[q];
      for (int k = 0; k < nc; ++k) {
        double v = w;
        for (int i = 0; i < m_ - k; ++i) v *= c;
        for (int i = 0; i < k; ++i) v *= s;
        acc[k] += v;
      }
    }
    for (int k = 0; k < nc; ++k)
      out.values[static_cast<size_t>(n) * nc + k] = scale * acc[k];
  }
  return out;
}

TensorField backproject_euclid(const BoundaryData& data, const PolarGrid& grid,
                               double alpha0, int m) {
  return EuclidBackprojection(grid, alpha0, m).apply(data);
}

GeodesicBackprojection::GeodesicBackprojection(const PolarGrid& grid,
                                               const RefractiveMedium& medium,
                                               double dtau, int m,
                                               DenominatorMode mode)
    : grid_(grid), medium_(medium), dtau_(dtau), m_(m), mode_(mode) {
  const int nodes = grid_.num_nodes();
  taps_.resize(static_cast<size_t>(nodes) * grid_.Q);
  node_nim_.resize(nodes);
#pragma omp parallel for schedule(dynamic, 8)
  for (int n = 0; n < nodes; ++n) {
    Vec2 x = grid_.node(n / grid_.P, n % grid_.P);
    node_nim_[n] = std::pow(medium_.eval_n(x), -m_);
    for (int q = 0; q < grid_.Q; ++q) {
      ExitInfo info = trace_exit(medium_, grid_, x, q, dtau_, mode_);
      Tap& t = taps_[static_cast<size_t>(n) * grid_.Q + q];
      if (std::abs(info.denom) < kTangentCut) continue;
      double up = info.mu_tilde / grid_.dmu();
      double uq = info.phi_tilde / grid_.dphi();
      int p0 = static_cast<int>(std::floor(up)) % grid_.P;
      int q0 = static_cast<int>(std::floor(uq)) % grid_.Q;
      double tp = up - std::floor(up);
      double tq = uq - std::floor(uq);
      int p1 = (p0 + 1) % grid_.P;
      int q1 = (q0 + 1) % grid_.Q;
      t.idx[0] = p0 * grid_.Q + q0;
      t.idx[1] = p1 * grid_.Q + q0;
      t.idx[2] = p0 * grid_.Q + q1;
      t.idx[3] = p1 * grid_.Q + q1;
      t.w[0] = (1.0 - tp) * (1.0 - tq);
      t.w[1] = tp * (1.0 - tq);
      t.w[2] = (1.0 - tp) * tq;
      t.w[3] = tp * tq;
      t.ell = info.ell;
      t.factor = std::exp(-info.att) / info.denom;
    }
  }
}

void GeodesicBackprojection::set_alpha(double alpha0) {
  if (medium_.alpha_fn)
    throw BadConfig("set_alpha: medium carries a non-constant attenuation");
  double old = medium_.alpha0;
  medium_.alpha0 = alpha0;
  for (Tap& t : taps_) t.factor *= std::exp((old - alpha0) * t.ell);
}

TensorField GeodesicBackprojection::apply(const BoundaryData& data) const {
  if (data.P != grid_.P || data.Q != grid_.Q)
    throw BadConfig("GeodesicBackprojection: data does not match grid");
  TensorField out(grid_.R, grid_.P, m_);
  const int nodes = grid_.num_nodes();
  const double scale = kTwoPi / grid_.Q;
  const int nc = m_ + 1;
#pragma omp parallel for schedule(static)
  for (int n = 0; n < nodes; ++n) {
    double acc[8] = {0.0};
    for (int q = 0; q < grid_.Q; ++q) {
      const Tap& t = taps_[static_cast<size_t>(n) * grid_.Q + q];
      if (t.factor == 0.0) continue;
      double h = t.w[0] * data.values[t.idx[0]] +
                 t.w[1] * data.values[t.idx[1]] +
                 t.w[2] * data.values[t.idx[2]] +
                 t.w[3] * data.values[t.idx[3]];
      double w = h * t.factor;
      double c = grid_.cos_phi[q], s = grid_.sin_phi[q];
      for (int k = 0; k < nc; ++k) {
        double v = w;
        for (int i = 0; i < m_ - k; ++i) v *= c;
        for (int i = 0; i < k; ++i) v *= s;
        acc[k] += v;
      }
    }
    double nim = node_nim_[n];
    for (int k = 0; k < nc; ++k)
      out.values[static_cast<size_t>(n) * nc + k] = scale * nim * acc[k];
  }
  return out;
}

TensorField backproject_geodesic(const BoundaryData& data,
                                 const PolarGrid& grid,
                                 const RefractiveMedium& medium, int m,
                                 double dtau, DenominatorMode mode) {
  return GeodesicBackprojection(grid, medium, dtau, m, mode).apply(data);
}

double duality_defect(
    const TensorField& f, const PolarGrid& grid,
    const RefractiveMedium& medium,
    const std::function<BoundaryData(const TensorField&)>& forward,
    const std::function<TensorField(const BoundaryData&)>& adjoint) {
  BoundaryData g = forward(f);
  double gg = data_inner(g, g, grid, medium);
  if (gg == 0.0) throw ZeroField("duality_defect: forward data vanishes");
  TensorField back = adjoint(g);
  double fg = field_inner(f, back, grid, medium);
  return std::abs(gg - fg) / gg;
}

}  // namespace geotomo
