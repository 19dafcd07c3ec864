#include "geotomo/transport_pde.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "geotomo/adjoint.hpp"
#include "geotomo/errors.hpp"
#include "geotomo/forward.hpp"
#include "geotomo/geometry.hpp"

namespace geotomo {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Rank cutoff (relative to the largest pivot) for the dense rank-revealing
// solve. At epsilon = 0 the transport matrices carry a band of tiny singular
// values from rays that barely graze the data; Eigen's default threshold is
// machine precision scaled and still inverts that band, which inflates the
// solution by orders of magnitude. Genuine transport modes sit above about
// 1e-3 of the largest pivot, so 1e-6 separates the two cleanly.
constexpr double kRankTol = 1e-6;

// LSQR (Paige & Saunders) on a column-scaled sparse system, started from
// zero. The scaling equalizes the wildly different row magnitudes the 1/rho
// factors produce near the disc center; the zero start keeps iterates in the
// range of the scaled adjoint, so on (near-)singular systems the iteration
// heads for a small-norm least-squares solution instead of amplifying
// near-null modes.
MinNormResult lsqr(const Eigen::SparseMatrix<double>& A,
                   const Eigen::VectorXd& b, double tol, int max_iters) {
  using Vec = Eigen::VectorXd;
  MinNormResult res;
  const int n = static_cast<int>(A.cols());
  Vec d = Vec::Zero(n);
  for (int j = 0; j < A.outerSize(); ++j)
    for (Eigen::SparseMatrix<double>::InnerIterator el(A, j); el; ++el)
      d[el.col()] += el.value() * el.value();
  int nzcols = 0;
  for (int j = 0; j < n; ++j) {
    if (d[j] > 0.0) {
      d[j] = std::sqrt(d[j]);
      ++nzcols;
    } else {
      d[j] = 1.0;
    }
  }
  const double normA = std::sqrt(static_cast<double>(std::max(nzcols, 1)));
  auto apply = [&](const Vec& v) -> Vec { return A * v.cwiseQuotient(d); };
  auto apply_t = [&](const Vec& u) -> Vec {
    return (A.transpose() * u).cwiseQuotient(d);
  };
  const double bnorm = b.norm();
  double beta = bnorm;
  res.x = Vec::Zero(n);
  if (beta == 0.0) {
    res.converged = true;
    return res;
  }
  Vec u = b / beta;
  Vec v = apply_t(u);
  double alpha = v.norm();
  if (alpha == 0.0) {
    res.converged = true;  // rhs orthogonal to the range: x = 0 is optimal
    return res;
  }
  v /= alpha;
  Vec w = v;
  double phibar = beta;
  double rhobar = alpha;
  double best = std::numeric_limits<double>::max();
  int since_best = 0;
  for (int it = 1; it <= max_iters; ++it) {
    u = apply(v) - alpha * u;
    beta = u.norm();
    if (beta > 0.0) u /= beta;
    v = apply_t(u) - beta * v;
    alpha = v.norm();
    if (alpha > 0.0) v /= alpha;
    double rho = std::hypot(rhobar, beta);
    double c = rhobar / rho;
    double s = beta / rho;
    double theta = s * alpha;
    rhobar = -c * alpha;
    double phi = c * phibar;
    phibar = s * phibar;
    res.x += (phi / rho) * w;
    w = v - (theta / rho) * w;
    res.iterations = it;
    double atr = phibar * alpha * std::abs(c);  // |A^T r| estimate
    res.optimality = atr / (normA * phibar + 1e-300);
    res.residual = phibar;
    // Standard stopping pair: small residual relative to the data scale
    // (consistent systems) or small normal-equation residual (least squares).
    double rel_res = phibar / (bnorm + normA * res.x.norm() + 1e-300);
    if (rel_res <= tol || res.optimality <= tol) {
      res.converged = true;
      break;
    }
    double measure = std::min(rel_res, res.optimality);
    if (measure < best * (1.0 - 1e-4)) {
      best = measure;
      since_best = 0;
    } else if (++since_best > 2000) {
      break;  // stalled at the attainable accuracy
    }
    if (alpha == 0.0 || beta == 0.0) {
      res.converged = true;
      break;
    }
  }
  res.x = res.x.cwiseQuotient(d);  // undo the column scaling
  return res;
}

}  // namespace

BoundaryData boundary_w(const BoundaryData& data, const PolarGrid& grid,
                        double alpha0) {
  BoundaryData bw(grid.P, grid.Q);
  for (int p = 0; p < grid.P; ++p) {
    Vec2 x = grid.boundary_node(p);
    for (int q = 0; q < grid.Q; ++q)
      bw.at(p, q) = weight_euclid(data, grid, alpha0, x, q);
  }
  return bw;
}

TransportSystem assemble_system(const PolarGrid& grid, int q, double epsilon,
                                double alpha0, const BoundaryData& bw) {
  const int R = grid.R, P = grid.P;
  const int unknowns = (R - 1) * P;
  const double drho = grid.drho();
  const double dmu = grid.dmu();
  TransportSystem sys;
  sys.R = R;
  sys.P = P;
  sys.q = q;
  sys.epsilon = epsilon;
  sys.alpha0 = alpha0;
  sys.rhs = Eigen::VectorXd::Zero(unknowns);

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<size_t>(unknowns) * 6);
  auto row_of = [P](int r, int p) { return r * P + p; };

  for (int r = 0; r < R - 1; ++r) {
    double rho = grid.rho(r);
    for (int p = 0; p < P; ++p) {
      int row = row_of(r, p);
      double theta = grid.phi(q) - grid.mu(p);
      double ct = std::cos(theta), st = std::sin(theta);
      double diag = alpha0 + ct / drho + epsilon / (rho * drho) +
                    2.0 * epsilon / (rho * rho * dmu * dmu);
      double up = -ct / drho - epsilon / (rho * drho);  // coefficient on r+1
      if (r == 0) {
        diag += epsilon / (drho * drho);
        up += -2.0 * epsilon / (3.0 * drho * drho);
        trip.emplace_back(row, row_of(0, (p + P / 2) % P),
                          -epsilon / (3.0 * drho * drho));
      } else {
        diag += 2.0 * epsilon / (drho * drho);
        up += -epsilon / (drho * drho);
        trip.emplace_back(row, row_of(r - 1, p), -epsilon / (drho * drho));
      }
      trip.emplace_back(row, row, diag);
      if (r + 1 <= R - 2) {
        trip.emplace_back(row, row_of(r + 1, p), up);
      } else {
        sys.rhs[row] -= up * bw.at(p, q);  // boundary ring value
      }
      double cmu = -epsilon / (rho * rho * dmu * dmu);
      trip.emplace_back(row, row_of(r, (p + 1) % P),
                        cmu - st / (2.0 * rho * dmu));
      trip.emplace_back(row, row_of(r, (p - 1 + P) % P),
                        cmu + st / (2.0 * rho * dmu));
    }
  }
  sys.A.resize(unknowns, unknowns);
  sys.A.setFromTriplets(trip.begin(), trip.end());
  sys.A.makeCompressed();
  return sys;
}

MinNormResult solve_min_norm(const TransportSystem& system, double tol,
                             int max_iters) {
  const int n = static_cast<int>(system.A.cols());
  if (max_iters <= 0) max_iters = 10 * n;
  if (n <= 2000) {
    Eigen::MatrixXd dense(system.A);
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod;
    cod.setThreshold(kRankTol);
    cod.compute(dense);
    MinNormResult res;
    res.x = cod.solve(system.rhs);
    res.residual = (system.A * res.x - system.rhs).norm();
    res.converged = true;
    res.iterations = 0;
    return res;
  }
  MinNormResult res = lsqr(system.A, system.rhs, tol, max_iters);
  const double scale =
      system.rhs.norm() + system.A.norm() * res.x.norm() + 1e-300;
  if (!res.converged && res.optimality > 1e-4 && res.residual > 1e-6 * scale)
    throw NonConvergence("solve_min_norm: LSQR stopped after " +
                         std::to_string(res.iterations) +
                         " iterations with residual " +
                         std::to_string(res.residual));
  return res;
}

struct PdeAdjoint::PerDirection {
  Eigen::SparseMatrix<double> A;
  std::unique_ptr<Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd>> cod;
};

PdeAdjoint::PdeAdjoint(const PolarGrid& grid, double alpha0, double epsilon,
                       int m)
    : grid_(grid), alpha0_(alpha0), epsilon_(epsilon), m_(m) {
  const int unknowns = (grid.R - 1) * grid.P;
  BoundaryData zero(grid.P, grid.Q);
  dirs_.resize(grid.Q);
  for (int q = 0; q < grid_.Q; ++q) {
    auto dir = std::make_unique<PerDirection>();
    TransportSystem sys = assemble_system(grid_, q, epsilon_, alpha0_, zero);
    dir->A = sys.A;
    if (unknowns <= 2000) {
      Eigen::MatrixXd dense(sys.A);
      dir->cod = std::make_unique<
          Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd>>();
      dir->cod->setThreshold(kRankTol);
      dir->cod->compute(dense);
    }
    dirs_[q] = std::move(dir);
  }
}

PdeAdjoint::~PdeAdjoint() = default;

TensorField PdeAdjoint::apply(const BoundaryData& data) const {
  const int R = grid_.R, P = grid_.P, Q = grid_.Q;
  const int unknowns = (R - 1) * P;
  BoundaryData bw = boundary_w(data, grid_, alpha0_);
  const double drho = grid_.drho();
  const double rho_top = grid_.rho(R - 2);

  // w per direction: interior rings from the solve, boundary ring from bw.
  std::vector<Eigen::VectorXd> w(Q);
#pragma omp parallel for schedule(dynamic)
  for (int q = 0; q < Q; ++q) {
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(unknowns);
    const double d2 = (R - 2 == 0) ? 2.0 * epsilon_ / (3.0 * drho * drho)
                                   : epsilon_ / (drho * drho);
    for (int p = 0; p < P; ++p) {
      double theta = grid_.phi(q) - grid_.mu(p);
      double up = -std::cos(theta) / drho - epsilon_ / (rho_top * drho) - d2;
      rhs[(R - 2) * P + p] = -up * bw.at(p, q);
    }
    if (dirs_[q]->cod) {
      w[q] = dirs_[q]->cod->solve(rhs);
    } else {
      TransportSystem sys;
      sys.A = dirs_[q]->A;
      sys.rhs = rhs;
      w[q] = solve_min_norm(sys).x;
    }
  }

  TensorField out(R, P, m_);
  const double scale = kTwoPi / Q;
  const int nc = m_ + 1;
  for (int r = 0; r < R; ++r)
    for (int p = 0; p < P; ++p) {
      double acc[8] = {0.0};
      for (int q = 0; q < Q; ++q) {
        double wv = (r < R - 1) ? w[q][r * P + p] : bw.at(p, q);
        double c = grid_.cos_phi[q], s = grid_.sin_phi[q];
        for (int k = 0; k < nc; ++k) {
          double v = wv;
          for (int i = 0; i < m_ - k; ++i) v *= c;
          for (int i = 0; i < k; ++i) v *= s;
          acc[k] += v;
        }
      }
      for (int k = 0; k < nc; ++k) out.at(r, p, k) = scale * acc[k];
    }
  return out;
}

TensorField pde_adjoint(const BoundaryData& data, const PolarGrid& grid,
                        double alpha0, double epsilon, int m) {
  return PdeAdjoint(grid, alpha0, epsilon, m).apply(data);
}

double duality_defect(const TensorField& f, AdjointKind kind,
                      const PolarGrid& grid, double alpha0, double epsilon,
                      int T) {
  RefractiveMedium medium = make_medium("euclid", alpha0);
  EuclidForward fwd(grid, alpha0, T, f.m);
  if (kind == AdjointKind::Integral) {
    EuclidBackprojection bp(grid, alpha0, f.m);
    return duality_defect(
        f, grid, medium,
        [&](const TensorField& x) { return fwd.apply(x); },
        [&](const BoundaryData& d) { return bp.apply(d); });
  }
  PdeAdjoint bp(grid, alpha0, epsilon, f.m);
  return duality_defect(
      f, grid, medium, [&](const TensorField& x) { return fwd.apply(x); },
      [&](const BoundaryData& d) { return bp.apply(d); });
}

}  // namespace geotomo
