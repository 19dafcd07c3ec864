#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "geotomo/geometry.hpp"
#include "geotomo/grid.hpp"
#include "geotomo/recon.hpp"

namespace geotomo {

// Analytic test fields, all rank-1 (two components):
//   f1(x) = (x1 + x2, x1 - x2)      solenoidal
//   f2(x) = (x1^2 - 2 x2^2, -2 x1 x2)
//   f3(x) = (x1, -x2)
Vec2 phantom_value(const std::string& name, const Vec2& x);
TensorField phantom_field(const std::string& name, const PolarGrid& grid);

struct NoiseCase {
  double delta = 0.0;
  uint64_t seed = 0;
};

struct ExperimentSpec {
  std::string name;
  std::string phantom;                   // empty: experiment default
  std::string medium;                    // empty: experiment default
  std::vector<double> alphas;            // empty: experiment default
  std::vector<std::array<int, 3>> grids; // (R,P,Q); empty: experiment default
  std::vector<int> qs;                   // Q sweep for the direction study
  std::vector<double> epsilons;          // viscosity sweep for the defect study
  std::vector<NoiseCase> noise;          // empty: experiment default
  ReconConfig recon;
  bool recon_set = false;  // leave false to take the experiment default
  int T = 200;             // straight-line quadrature sample count
  double dtau = 0.005;     // geodesic integrator step
  std::string out_dir;     // empty: compute only, write nothing
  uint64_t seed = 1234;    // base seed for defaulted noise cases
};

struct TableResult {
  std::string name;
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

// Landweber error table over the (R,P) pairs with R*P = 3600, Q = P.
TableResult run_table1(const ExperimentSpec& overrides = {});
// Error over the direction count Q at fixed (R,P) = (34,106).
TableResult run_table3(const ExperimentSpec& overrides = {});
// Reconstruction from refractive data with and without modeling refraction.
TableResult run_refraction_comparison(const ExperimentSpec& overrides = {});
// Duality defect of the viscosity PDE adjoint over epsilon vs the integral one.
TableResult run_errdual_sweep(const ExperimentSpec& overrides = {});
// Noise-robustness study; also emits the reconstructed fields when out_dir set.
TableResult run_noise_figure(const ExperimentSpec& overrides = {});

// Dispatch by experiment name: table1 | table3 | refraction | errdual | noise.
TableResult run_experiment(const std::string& name,
                           const ExperimentSpec& overrides = {});

// Merge settings from a JSON config file (documented in the README) into spec.
void apply_config_file(ExperimentSpec& spec, const std::string& path);

}  // namespace geotomo
