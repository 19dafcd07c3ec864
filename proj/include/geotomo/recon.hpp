#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "geotomo/adjoint.hpp"
#include "geotomo/forward.hpp"
#include "geotomo/grid.hpp"

namespace geotomo {

// Forward/adjoint pair used by the iterative solvers. The factories wrap the
// cached operator classes so repeated applications stay cheap.
struct LinearOperator {
  std::function<BoundaryData(const TensorField&)> apply;
  std::function<TensorField(const BoundaryData&)> adjoint;
};

LinearOperator make_euclid_operator(const PolarGrid& grid, double alpha0,
                                    int T, int m);
LinearOperator make_geodesic_operator(
    const PolarGrid& grid, const RefractiveMedium& medium, double dtau, int m,
    DenominatorMode mode = DenominatorMode::GeometricExit);

struct ReconConfig {
  double omega = 0.1;
  int max_iters = 5000;
  bool nesterov = false;
  // Stop once |f_k - f*| / |f*| drops below this (needs the exact field).
  double oracle_stop_tol = 1e-5;
  // Stop when the monitored quantity (oracle error if available, otherwise
  // the relative residual) decreases by less than stagnation_tol over
  // stagnation_window consecutive iterations.
  double stagnation_tol = 1e-7;
  int stagnation_window = 25;
  // Abort when the residual grows beyond divergence_factor times its minimum.
  double divergence_factor = 10.0;
};

enum class StopReason { OracleTol, Stagnation, MaxIters };

struct IterationRecord {
  int k = 0;
  double residual = 0.0;   // |A y_{k-1} - g| before the update
  double rel_error = 0.0;  // |f_k - f*| / |f*| after it (NaN without oracle)
};

struct ReconResult {
  TensorField f;
  std::vector<IterationRecord> history;
  StopReason reason = StopReason::MaxIters;
};

// Landweber iteration f_{k+1} = f_k - omega A*(A f_k - g) from f_0 = 0, with
// optional Nesterov momentum y_k = f_k + (k-1)/(k+2) (f_k - f_{k-1}).
ReconResult landweber(const BoundaryData& g, const LinearOperator& op,
                      const ReconConfig& config, const PolarGrid& grid, int m,
                      const TensorField* f_exact = nullptr);

// Multiplicative-style noise: i.i.d. uniform [-1,1] perturbations on the
// outgoing entries, rescaled so |noise| / |data| = delta exactly.
BoundaryData add_relative_uniform_noise(const BoundaryData& data, double delta,
                                        uint64_t seed, const PolarGrid& grid);

double relative_l2_error(const TensorField& f_approx,
                         const TensorField& f_exact, const PolarGrid& grid);

}  // namespace geotomo
