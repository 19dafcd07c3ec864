#include "geotomo/recon.hpp"

#include <cmath>
#include <limits>
#include <memory>
#include <random>

#include "geotomo/errors.hpp"
#include "geotomo/inner.hpp"

namespace geotomo {

LinearOperator make_euclid_operator(const PolarGrid& grid, double alpha0,
                                    int T, int m) {
  auto fwd = std::make_shared<EuclidForward>(grid, alpha0, T, m);
  auto adj = std::make_shared<EuclidBackprojection>(grid, alpha0, m);
  LinearOperator op;
  op.apply = [fwd](const TensorField& f) { return fwd->apply(f); };
  op.adjoint = [adj](const BoundaryData& d) { return adj->apply(d); };
  return op;
}

LinearOperator make_geodesic_operator(const PolarGrid& grid,
                                      const RefractiveMedium& medium,
                                      double dtau, int m,
                                      DenominatorMode mode) {
  auto fwd = std::make_shared<GeodesicForward>(grid, medium, dtau, m);
  auto adj =
      std::make_shared<GeodesicBackprojection>(grid, medium, dtau, m, mode);
  LinearOperator op;
  op.apply = [fwd](const TensorField& f) { return fwd->apply(f); };
  op.adjoint = [adj](const BoundaryData& d) { return adj->apply(d); };
  return op;
}

ReconResult landweber(const BoundaryData& g, const LinearOperator& op,
                      const ReconConfig& config, const PolarGrid& grid, int m,
                      const TensorField* f_exact) {
  if (config.omega <= 0.0) throw BadConfig("landweber: omega must be positive");
  if (config.max_iters < 1) throw BadConfig("landweber: max_iters must be >= 1");

  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double g_norm = data_norm(g, grid);

  ReconResult result;
  result.f = TensorField(grid.R, grid.P, m);
  result.history.reserve(static_cast<size_t>(config.max_iters));
  result.reason = StopReason::MaxIters;

  TensorField f_prev = result.f;  // f_{k-1}, zeros initially
  TensorField y = result.f;
  double min_residual = std::numeric_limits<double>::infinity();
  double best_monitor = std::numeric_limits<double>::infinity();
  int since_improvement = 0;

  for (int k = 1; k <= config.max_iters; ++k) {
    if (config.nesterov && k > 1) {
      const double beta = static_cast<double>(k - 1) / static_cast<double>(k + 2);
      y = result.f;
      for (size_t i = 0; i < y.values.size(); ++i)
        y.values[i] += beta * (result.f.values[i] - f_prev.values[i]);
    } else {
      y = result.f;
    }

    const BoundaryData residual = subtract(op.apply(y), g);
    const double res_norm = data_norm(residual, grid);

    TensorField grad = op.adjoint(residual);
    f_prev = result.f;
    result.f = y;
    for (size_t i = 0; i < grad.values.size(); ++i)
      result.f.values[i] -= config.omega * grad.values[i];

    double err = nan;
    if (f_exact != nullptr) err = relative_l2_error(result.f, *f_exact, grid);
    result.history.push_back({k, res_norm, err});

    // Momentum makes the residual legitimately non-monotone (it can rebound
    // well above its running minimum while still converging), so with
    // Nesterov on the blowup reference is the initial residual instead.
    const double reference =
        config.nesterov ? std::max(min_residual, g_norm) : min_residual;
    if (res_norm > config.divergence_factor * reference)
      throw DivergenceDetected("landweber: residual grew to " +
                               std::to_string(res_norm) + " past " +
                               std::to_string(reference) + " at iteration " +
                               std::to_string(k));
    if (res_norm < min_residual) min_residual = res_norm;

    if (f_exact != nullptr && err < config.oracle_stop_tol) {
      result.reason = StopReason::OracleTol;
      break;
    }

    // Stagnation is measured on the best value seen so far, which keeps the
    // rule meaningful when momentum makes the raw sequence oscillate.
    const double monitored = f_exact != nullptr
                                 ? err
                                 : (g_norm > 0.0 ? res_norm / g_norm : res_norm);
    if (monitored < best_monitor - config.stagnation_tol) {
      best_monitor = monitored;
      since_improvement = 0;
    } else {
      ++since_improvement;
    }
    if (config.stagnation_window > 0 &&
        since_improvement >= config.stagnation_window) {
      result.reason = StopReason::Stagnation;
      break;
    }
  }
  return result;
}

BoundaryData add_relative_uniform_noise(const BoundaryData& data, double delta,
                                        uint64_t seed, const PolarGrid& grid) {
  if (delta < 0.0) throw BadConfig("noise level must be nonnegative");
  BoundaryData noisy = data;
  if (delta == 0.0) return noisy;

  const double base = data_norm(data, grid);
  if (base == 0.0) throw ZeroField("cannot add relative noise to zero data");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  BoundaryData noise(grid.P, grid.Q);
  for (int p = 0; p < grid.P; ++p) {
    const Vec2 x = grid.boundary_node(p);
    for (int q = 0; q < grid.Q; ++q) {
      // Only outgoing rays carry data; leave the incoming half untouched.
      if (dot(x, grid.direction(q)) <= 0.0) continue;
      noise.at(p, q) = uni(rng);
    }
  }
  const double noise_norm = data_norm(noise, grid);
  if (noise_norm == 0.0) throw ZeroField("noise draw vanished");
  const double scale = delta * base / noise_norm;
  for (size_t i = 0; i < noisy.values.size(); ++i)
    noisy.values[i] += scale * noise.values[i];
  return noisy;
}

double relative_l2_error(const TensorField& f_approx,
                         const TensorField& f_exact, const PolarGrid& grid) {
  if (f_approx.R != f_exact.R || f_approx.P != f_exact.P ||
      f_approx.m != f_exact.m)
    throw BadConfig("relative_l2_error: field shapes differ");
  TensorField diff = f_approx;
  axpy(-1.0, f_exact, diff);
  const double denom = field_norm(f_exact, grid);
  if (denom == 0.0) throw ZeroField("relative_l2_error: exact field is zero");
  return field_norm(diff, grid) / denom;
}

}  // namespace geotomo
