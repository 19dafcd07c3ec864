#include <cstdio>
#include <exception>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <CLI11.hpp>

#include "geotomo/csv_io.hpp"
#include "geotomo/errors.hpp"
#include "geotomo/experiments.hpp"
#include "geotomo/inner.hpp"
#include "geotomo/transport_pde.hpp"

namespace {

using namespace geotomo;

void set_threads(int threads) {
#ifdef _OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#else
  (void)threads;
#endif
}

void print_table(const TableResult& table) {
  for (size_t i = 0; i < table.header.size(); ++i)
    std::printf("%s%s", i ? "," : "", table.header[i].c_str());
  std::printf("\n");
  for (const auto& row : table.rows) {
    for (size_t i = 0; i < row.size(); ++i)
      std::printf("%s%.6g", i ? "," : "", row[i]);
    std::printf("\n");
  }
}

const char* reason_name(StopReason reason) {
  switch (reason) {
    case StopReason::OracleTol: return "oracle-tolerance";
    case StopReason::Stagnation: return "stagnation";
    case StopReason::MaxIters: return "max-iterations";
  }
  return "unknown";
}

struct CommonFlags {
  std::string phantom = "f1";
  std::string medium = "euclid";
  double alpha0 = 0.0;
  int R = 34, P = 106, Q = 106;
  int T = 200;
  double dtau = 0.005;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--phantom", flags.phantom, "Test field: f1 | f2 | f3");
  cmd->add_option("--medium", flags.medium,
                  "Refraction model: euclid | paper-slow | paper-mild");
  cmd->add_option("--alpha0", flags.alpha0, "Constant attenuation");
  cmd->add_option("--R", flags.R, "Radial node count");
  cmd->add_option("--P", flags.P, "Angular node count (even)");
  cmd->add_option("--Q", flags.Q, "Direction count");
  cmd->add_option("--T", flags.T, "Straight-chord quadrature intervals");
  cmd->add_option("--dtau", flags.dtau, "Geodesic integrator step");
}

BoundaryData forward_data(const CommonFlags& flags, const PolarGrid& grid,
                          const TensorField& f) {
  if (flags.medium == "euclid")
    return ray_transform_euclid(f, flags.alpha0, grid, flags.T);
  RefractiveMedium medium = make_medium(flags.medium);
  medium.alpha0 = flags.alpha0;
  return ray_transform_geodesic(f, medium, grid, flags.dtau);
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Geodesic ray transforms of tensor fields on the unit disc"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand(
      "run", "Run a named experiment: table1 | table3 | refraction | errdual | noise");
  std::string experiment, out_dir, config_path;
  int threads = 0;
  uint64_t seed = 1234;
  bool seed_given = false;
  run->add_option("experiment", experiment, "Experiment name")->required();
  run->add_option("--out", out_dir, "Output directory for CSVs and manifest");
  run->add_option("--threads", threads, "OpenMP thread count (0 = default)");
  run->add_option("--seed", seed, "Base RNG seed for noise draws")
      ->each([&](const std::string&) { seed_given = true; });
  run->add_option("--config", config_path,
                  "JSON config overriding experiment settings");
  run->callback([&]() {
    set_threads(threads);
    ExperimentSpec spec;
    if (!config_path.empty()) apply_config_file(spec, config_path);
    if (!out_dir.empty()) spec.out_dir = out_dir;
    if (seed_given) spec.seed = seed;
    const TableResult table = run_experiment(experiment, spec);
    print_table(table);
    if (!spec.out_dir.empty())
      std::printf("# wrote %s/%s.csv\n", spec.out_dir.c_str(),
                  table.name.c_str());
  });

  // forward
  auto* fwd = app.add_subcommand("forward",
                                 "Apply the ray transform to a phantom");
  CommonFlags ff;
  std::string fwd_out = "forward.csv";
  add_common(fwd, ff);
  fwd->add_option("--out", fwd_out, "Boundary-data CSV path");
  fwd->add_option("--threads", threads, "OpenMP thread count (0 = default)");
  fwd->callback([&]() {
    set_threads(threads);
    const PolarGrid grid(ff.R, ff.P, ff.Q);
    const TensorField f = phantom_field(ff.phantom, grid);
    const BoundaryData g = forward_data(ff, grid, f);
    write_boundary_csv(fwd_out, g, grid);
    std::printf("wrote %s (|data| = %.17g)\n", fwd_out.c_str(),
                data_norm(g, grid));
  });

  // adjoint
  auto* adj = app.add_subcommand(
      "adjoint", "Apply an adjoint representation to boundary data");
  CommonFlags af;
  std::string adj_out = "adjoint.csv", adj_method = "integral", data_path;
  double epsilon = 0.0;
  add_common(adj, af);
  adj->add_option("--method", adj_method, "integral | pde");
  adj->add_option("--epsilon", epsilon, "Viscosity parameter (pde method)");
  adj->add_option("--data", data_path,
                  "Boundary CSV to backproject (default: forward of phantom)");
  adj->add_option("--out", adj_out, "Field CSV path");
  adj->add_option("--threads", threads, "OpenMP thread count (0 = default)");
  adj->callback([&]() {
    set_threads(threads);
    const PolarGrid grid(af.R, af.P, af.Q);
    BoundaryData g(grid.P, grid.Q);
    if (data_path.empty()) {
      const TensorField f = phantom_field(af.phantom, grid);
      g = forward_data(af, grid, f);
    } else {
      g = read_boundary_csv(data_path);
      if (g.P != grid.P || g.Q != grid.Q)
        throw BadConfig("--data grid does not match --P/--Q");
    }
    TensorField result(grid.R, grid.P, 1);
    if (adj_method == "integral") {
      if (af.medium == "euclid") {
        result = backproject_euclid(g, grid, af.alpha0, 1);
      } else {
        RefractiveMedium medium = make_medium(af.medium);
        medium.alpha0 = af.alpha0;
        result = backproject_geodesic(g, grid, medium, 1, af.dtau);
      }
    } else if (adj_method == "pde") {
      if (af.medium != "euclid")
        throw BadConfig("the pde adjoint supports the euclid medium only");
      result = pde_adjoint(g, grid, af.alpha0, epsilon, 1);
    } else {
      throw BadConfig("unknown adjoint method: " + adj_method);
    }
    write_field_csv(adj_out, result, grid);
    std::printf("wrote %s (|field| = %.17g)\n", adj_out.c_str(),
                field_norm(result, grid));
  });

  // reconstruct
  auto* rec = app.add_subcommand("reconstruct",
                                 "Landweber reconstruction of a phantom");
  CommonFlags rf;
  std::string rec_out = "recon", rec_method = "integral";
  double delta = 0.0, omega = 0.1, rec_epsilon = 0.0;
  uint64_t rec_seed = 1234;
  bool nesterov = false;
  int max_iters = 5000;
  add_common(rec, rf);
  rec->add_option("--delta", delta, "Relative noise level");
  rec->add_option("--seed", rec_seed, "Noise RNG seed");
  rec->add_option("--omega", omega, "Landweber step size");
  rec->add_option("--method", rec_method, "Adjoint in the iteration: integral | pde");
  rec->add_option("--epsilon", rec_epsilon, "Viscosity parameter (pde method)");
  rec->add_flag("--nesterov", nesterov, "Enable Nesterov momentum");
  rec->add_option("--max-iters", max_iters, "Iteration cap");
  rec->add_option("--out", rec_out, "Output directory");
  rec->add_option("--threads", threads, "OpenMP thread count (0 = default)");
  rec->callback([&]() {
    set_threads(threads);
    const PolarGrid grid(rf.R, rf.P, rf.Q);
    const TensorField f = phantom_field(rf.phantom, grid);

    LinearOperator op;
    if (rec_method == "pde") {
      if (rf.medium != "euclid")
        throw BadConfig("the pde adjoint supports the euclid medium only");
      auto forward = std::make_shared<EuclidForward>(grid, rf.alpha0, rf.T, f.m);
      auto adjoint =
          std::make_shared<PdeAdjoint>(grid, rf.alpha0, rec_epsilon, f.m);
      op.apply = [forward](const TensorField& v) { return forward->apply(v); };
      op.adjoint = [adjoint](const BoundaryData& d) { return adjoint->apply(d); };
    } else if (rec_method == "integral") {
      if (rf.medium == "euclid") {
        op = make_euclid_operator(grid, rf.alpha0, rf.T, f.m);
      } else {
        RefractiveMedium medium = make_medium(rf.medium);
        medium.alpha0 = rf.alpha0;
        op = make_geodesic_operator(grid, medium, rf.dtau, f.m);
      }
    } else {
      throw BadConfig("unknown reconstruction method: " + rec_method);
    }

    BoundaryData g = op.apply(f);
    if (delta > 0.0) g = add_relative_uniform_noise(g, delta, rec_seed, grid);

    ReconConfig rc;
    rc.omega = omega;
    rc.nesterov = nesterov;
    rc.max_iters = max_iters;
    const ReconResult res = landweber(g, op, rc, grid, f.m, &f);

    std::filesystem::create_directories(rec_out);
    write_iterations_csv(rec_out + "/iterations.csv", res.history);
    write_field_csv(rec_out + "/field.csv", res.f, grid);
    write_field_csv(rec_out + "/field_exact.csv", f, grid);
    RunManifest manifest;
    manifest.name = "reconstruct";
    manifest.seed = rec_seed;
    manifest.R = rf.R;
    manifest.P = rf.P;
    manifest.Q = rf.Q;
    manifest.flags = {{"phantom", rf.phantom}, {"medium", rf.medium},
                      {"alpha0", std::to_string(rf.alpha0)},
                      {"delta", std::to_string(delta)},
                      {"omega", std::to_string(omega)},
                      {"method", rec_method},
                      {"nesterov", nesterov ? "on" : "off"}};
    write_manifest(rec_out + "/manifest.json", manifest);

    const double err = res.history.empty() ? 0.0 : res.history.back().rel_error;
    std::printf("stopped after %zu iterations (%s), relative error %.6g\n",
                res.history.size(), reason_name(res.reason), err);
    std::printf("wrote %s/{iterations.csv,field.csv,field_exact.csv,manifest.json}\n",
                rec_out.c_str());
  });

  CLI11_PARSE(app, argc, argv);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_cli(argc, argv);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
