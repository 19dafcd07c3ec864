#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "geotomo/grid.hpp"
#include "geotomo/recon.hpp"

namespace geotomo {

// All numeric CSV cells are printed with %.17g so that parsing them back
// reproduces the exact double. Column layouts:
//   field CSV:    r,p,rho,mu,x1,x2,c0[,c1,...]   one row per node
//   boundary CSV: p,q,mu,phi,value               one row per (node, direction)
//   iteration CSV:k,residual,rel_error
//   generic table: caller-provided header plus rows of doubles

void write_field_csv(const std::string& path, const TensorField& field,
                     const PolarGrid& grid);
TensorField read_field_csv(const std::string& path);

void write_boundary_csv(const std::string& path, const BoundaryData& data,
                        const PolarGrid& grid);
BoundaryData read_boundary_csv(const std::string& path);

void write_iterations_csv(const std::string& path,
                          const std::vector<IterationRecord>& history);
std::vector<IterationRecord> read_iterations_csv(const std::string& path);

void write_table_csv(const std::string& path,
                     const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows);
std::pair<std::vector<std::string>, std::vector<std::vector<double>>>
read_table_csv(const std::string& path);

// Run manifest: records what produced a set of outputs. Serialized as JSON.
struct RunManifest {
  std::string name;
  std::string commit;  // defaulted to the built-in commit hash when empty
  uint64_t seed = 0;
  int R = 0;
  int P = 0;
  int Q = 0;
  std::vector<std::pair<std::string, std::string>> flags;
};

std::string build_commit();

void write_manifest(const std::string& path, const RunManifest& manifest);
RunManifest read_manifest(const std::string& path);

}  // namespace geotomo
