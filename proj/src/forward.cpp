#include "geotomo/forward.hpp"

#include <cmath>

#include "geotomo/errors.hpp"
#include "geotomo/inner.hpp"

namespace geotomo {

namespace {

// <f(sample), dir^m> without the metric factor: binomial-weighted contraction
// of the stored components with powers of the direction.
double contract(const std::vector<double>& comps, int m, double d1, double d2) {
  double result = 0.0;
  std::vector<double> pow1(m + 1), pow2(m + 1);
  pow1[0] = 1.0;
  pow2[0] = 1.0;
  for (int k = 1; k <= m; ++k) {
    pow1[k] = pow1[k - 1] * d1;
    pow2[k] = pow2[k - 1] * d2;
  }
  for (int k = 0; k <= m; ++k)
    result += binomial(m, k) * comps[k] * pow1[m - k] * pow2[k];
  return result;
}

double eval_sample(const RaySample& s, const TensorField& f,
                   const std::vector<double>& center, int m) {
  int nc = m + 1;
  double acc = 0.0;
  double comps[8];
  int taps = s.st.inner ? 2 : 4;
  for (int k = 0; k < nc; ++k) {
    double v = 0.0;
    for (int i = 0; i < taps; ++i)
      v += s.st.w[i] * f.values[static_cast<size_t>(s.st.node[i]) * nc + k];
    if (s.st.inner) v += s.st.w_center * center[k];
    comps[k] = v;
  }
  if (m == 1) {
    acc = comps[0] * s.dir1 + comps[1] * s.dir2;
  } else {
    std::vector<double> c(comps, comps + nc);
    acc = contract(c, m, s.dir1, s.dir2);
  }
  return acc;
}

BoundaryData apply_rays(const std::vector<std::vector<RaySample>>& rays,
                        const PolarGrid& grid, const TensorField& f, int m) {
  BoundaryData out(grid.P, grid.Q);
  std::vector<double> center(m + 1);
  for (int k = 0; k <= m; ++k) center[k] = center_value(f, k);
  int total = grid.P * grid.Q;
#pragma omp parallel for schedule(static)
  for (int i = 0; i < total; ++i) {
    const auto& ray = rays[i];
    if (ray.empty()) continue;
    double acc = 0.0;
    for (const RaySample& s : ray)
      acc += s.trap * eval_sample(s, f, center, m);
    out.values[i] = acc;
  }
  return out;
}

}  // namespace

EuclidForward::EuclidForward(const PolarGrid& grid, double alpha0, int T,
                             int m, QuadratureMode mode)
    : grid_(grid), alpha0_(alpha0), T_(T), m_(m), mode_(mode) {
  if (T < 1) throw BadConfig("EuclidForward: T must be at least 1");
  rays_.resize(static_cast<size_t>(grid.P) * grid.Q);
  for (int p = 0; p < grid_.P; ++p) {
    Vec2 xp = grid_.boundary_node(p);
    for (int q = 0; q < grid_.Q; ++q) {
      Vec2 u = grid_.direction(q);
      double d = dot(xp, u);
      if (d <= 0.0) continue;  // incoming or tangential: entry stays zero
      double tau_minus = -2.0 * d;
      double dtau = 2.0 * d / T;
      auto& ray = rays_[static_cast<size_t>(p) * grid_.Q + q];
      ray.reserve(T + 1);
      for (int t = 0; t <= T; ++t) {
        double tau = tau_minus + t * dtau;
        RaySample s;
        s.st = interp_stencil(grid_, xp + tau * u);
        s.dir1 = u.x;
        s.dir2 = u.y;
        s.ell = -tau;  // parameter distance from the detector at tau = 0
        double quad = (mode == QuadratureMode::PaperAverage)
                          ? 1.0 / (T + 1)
                          : dtau * ((t == 0 || t == T) ? 0.5 : 1.0);
        s.trap = quad * std::exp(alpha0 * tau);
        ray.push_back(s);
      }
    }
  }
}

BoundaryData EuclidForward::apply(const TensorField& f) const {
  if (f.R != grid_.R || f.P != grid_.P || f.m != m_)
    throw BadConfig("EuclidForward: field does not match operator layout");
  return apply_rays(rays_, grid_, f, m_);
}

GeodesicForward::GeodesicForward(const PolarGrid& grid,
                                 const RefractiveMedium& medium, double dtau,
                                 int m)
    : grid_(grid), medium_(medium), dtau_(dtau), m_(m) {
  rays_.resize(static_cast<size_t>(grid.P) * grid.Q);
  const int total = grid_.P * grid_.Q;
#pragma omp parallel for schedule(dynamic, 16)
  for (int i = 0; i < total; ++i) {
    int p = i / grid_.Q;
    int q = i % grid_.Q;
    Vec2 xp = grid_.boundary_node(p);
    Vec2 u = grid_.direction(q);
    if (dot(xp, u) <= 0.0) continue;
    GeodesicPath path = geodesic_trace(medium_, xp, u, dtau_, true);
    size_t S = path.points.size() - 1;
    auto& ray = rays_[i];
    ray.resize(S + 1);
    double att = 0.0;
    double prev_alpha = 0.0;
    for (size_t s = 0; s <= S; ++s) {
      RaySample& rs = ray[s];
      Vec2 pos = (s == S) ? path.exit_point : path.points[s];
      Vec2 vel = path.velocities[s];
      double width_prev = (s == 0) ? 0.0 : (s == S ? path.dtau_star : dtau_);
      double width_next = (s == S) ? 0.0
                          : (s == S - 1 ? path.dtau_star : dtau_);
      rs.st = interp_stencil(grid_, pos);
      rs.dir1 = vel.x;
      rs.dir2 = vel.y;
      rs.n2m = std::pow(medium_.eval_n(pos), 2 * m_);
      rs.ell = (s == S) ? (S - 1) * dtau_ + path.dtau_star
                        : static_cast<double>(s) * dtau_;
      double a = medium_.eval_alpha(pos, vel);
      if (s > 0) att += 0.5 * width_prev * (prev_alpha + a);
      prev_alpha = a;
      rs.trap = 0.5 * (width_prev + width_next) * std::exp(-att) * rs.n2m;
    }
  }
}

void GeodesicForward::set_alpha(double alpha0) {
  if (medium_.alpha_fn)
    throw BadConfig("set_alpha: medium carries a non-constant attenuation");
  double old = medium_.alpha0;
  medium_.alpha0 = alpha0;
  for (auto& ray : rays_)
    for (RaySample& s : ray)
      s.trap *= std::exp((old - alpha0) * s.ell);
}

BoundaryData GeodesicForward::apply(const TensorField& f) const {
  if (f.R != grid_.R || f.P != grid_.P || f.m != m_)
    throw BadConfig("GeodesicForward: field does not match operator layout");
  return apply_rays(rays_, grid_, f, m_);
}

BoundaryData ray_transform_euclid(const TensorField& field, double alpha0,
                                  const PolarGrid& grid, int T,
                                  QuadratureMode mode) {
  return EuclidForward(grid, alpha0, T, field.m, mode).apply(field);
}

BoundaryData ray_transform_geodesic(const TensorField& field,
                                    const RefractiveMedium& medium,
                                    const PolarGrid& grid, double dtau) {
  return GeodesicForward(grid, medium, dtau, field.m).apply(field);
}

TensorField potential_field_gradient(
    const std::function<double(Vec2)>& phi, const PolarGrid& grid,
    const std::function<Vec2(Vec2)>& grad_phi) {
  for (int p = 0; p < grid.P; ++p) {
    double b = phi(grid.boundary_node(p));
    if (std::abs(b) > 1e-8)
      throw BoundaryNonzero("potential_field_gradient: phi(" +
                            std::to_string(grid.mu(p)) + ") = " +
                            std::to_string(b));
  }
  constexpr double h = 1e-6;
  TensorField out(grid.R, grid.P, 1);
  for (int r = 0; r < grid.R; ++r)
    for (int p = 0; p < grid.P; ++p) {
      Vec2 x = grid.node(r, p);
      Vec2 g;
      if (grad_phi) {
        g = grad_phi(x);
      } else {
        g = {(phi({x.x + h, x.y}) - phi({x.x - h, x.y})) / (2.0 * h),
             (phi({x.x, x.y + h}) - phi({x.x, x.y - h})) / (2.0 * h)};
      }
      out.at(r, p, 0) = g.x;
      out.at(r, p, 1) = g.y;
    }
  return out;
}

}  // namespace geotomo
