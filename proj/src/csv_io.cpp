#include "geotomo/csv_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "geotomo/errors.hpp"

namespace geotomo {
namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw BadConfig("cannot open for writing: " + path);
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw BadConfig("cannot open for reading: " + path);
  return in;
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  return cells;
}

double to_double(const std::string& s) { return std::strtod(s.c_str(), nullptr); }

}  // namespace

void write_field_csv(const std::string& path, const TensorField& field,
                     const PolarGrid& grid) {
  if (field.R != grid.R || field.P != grid.P)
    throw BadConfig("field/grid shape mismatch in write_field_csv");
  auto out = open_out(path);
  out << "r,p,rho,mu,x1,x2";
  for (int k = 0; k <= field.m; ++k) out << ",c" << k;
  out << "\n";
  for (int r = 0; r < field.R; ++r) {
    for (int p = 0; p < field.P; ++p) {
      const Vec2 x = grid.node(r, p);
      out << r << ',' << p << ',' << fmt(grid.rho(r)) << ',' << fmt(grid.mu(p))
          << ',' << fmt(x.x) << ',' << fmt(x.y);
      for (int k = 0; k <= field.m; ++k) out << ',' << fmt(field.at(r, p, k));
      out << "\n";
    }
  }
}

TensorField read_field_csv(const std::string& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw BadConfig("empty field csv: " + path);
  const auto header = split_line(line);
  if (header.size() < 7 || header[0] != "r")
    throw BadConfig("unexpected field csv header in " + path);
  const int m = static_cast<int>(header.size()) - 7;

  struct Row {
    int r, p;
    std::vector<double> c;
  };
  std::vector<Row> rows;
  int R = 0, P = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_line(line);
    if (cells.size() != header.size())
      throw BadConfig("ragged row in field csv " + path);
    Row row;
    row.r = std::atoi(cells[0].c_str());
    row.p = std::atoi(cells[1].c_str());
    for (size_t i = 6; i < cells.size(); ++i) row.c.push_back(to_double(cells[i]));
    R = std::max(R, row.r + 1);
    P = std::max(P, row.p + 1);
    rows.push_back(std::move(row));
  }
  TensorField field(R, P, m);
  for (const auto& row : rows)
    for (int k = 0; k <= m; ++k) field.at(row.r, row.p, k) = row.c[static_cast<size_t>(k)];
  return field;
}

void write_boundary_csv(const std::string& path, const BoundaryData& data,
                        const PolarGrid& grid) {
  if (data.P != grid.P || data.Q != grid.Q)
    throw BadConfig("data/grid shape mismatch in write_boundary_csv");
  auto out = open_out(path);
  out << "p,q,mu,phi,value\n";
  for (int p = 0; p < data.P; ++p)
    for (int q = 0; q < data.Q; ++q)
      out << p << ',' << q << ',' << fmt(grid.mu(p)) << ',' << fmt(grid.phi(q))
          << ',' << fmt(data.at(p, q)) << "\n";
}

BoundaryData read_boundary_csv(const std::string& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw BadConfig("empty boundary csv: " + path);
  if (split_line(line).size() != 5)
    throw BadConfig("unexpected boundary csv header in " + path);
  struct Row {
    int p, q;
    double v;
  };
  std::vector<Row> rows;
  int P = 0, Q = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_line(line);
    if (cells.size() != 5) throw BadConfig("ragged row in boundary csv " + path);
    Row row{std::atoi(cells[0].c_str()), std::atoi(cells[1].c_str()),
            to_double(cells[4])};
    P = std::max(P, row.p + 1);
    Q = std::max(Q, row.q + 1);
    rows.push_back(row);
  }
  BoundaryData data(P, Q);
  for (const auto& row : rows) data.at(row.p, row.q) = row.v;
  return data;
}

void write_iterations_csv(const std::string& path,
                          const std::vector<IterationRecord>& history) {
  auto out = open_out(path);
  out << "k,residual,rel_error\n";
  for (const auto& rec : history)
    out << rec.k << ',' << fmt(rec.residual) << ',' << fmt(rec.rel_error) << "\n";
}

std::vector<IterationRecord> read_iterations_csv(const std::string& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw BadConfig("empty iteration csv: " + path);
  std::vector<IterationRecord> history;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_line(line);
    if (cells.size() != 3) throw BadConfig("ragged row in iteration csv " + path);
    history.push_back(
        {std::atoi(cells[0].c_str()), to_double(cells[1]), to_double(cells[2])});
  }
  return history;
}

void write_table_csv(const std::string& path,
                     const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows) {
  auto out = open_out(path);
  for (size_t i = 0; i < header.size(); ++i)
    out << (i ? "," : "") << header[i];
  out << "\n";
  for (const auto& row : rows) {
    if (row.size() != header.size())
      throw BadConfig("table row width differs from header in " + path);
    for (size_t i = 0; i < row.size(); ++i)
      out << (i ? "," : "") << fmt(row[i]);
    out << "\n";
  }
}

std::pair<std::vector<std::string>, std::vector<std::vector<double>>>
read_table_csv(const std::string& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw BadConfig("empty table csv: " + path);
  const auto header = split_line(line);
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_line(line);
    if (cells.size() != header.size())
      throw BadConfig("ragged row in table csv " + path);
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& cell : cells) row.push_back(to_double(cell));
    rows.push_back(std::move(row));
  }
  return {header, rows};
}

std::string build_commit() {
#ifdef GEOTOMO_GIT_SHA
  return GEOTOMO_GIT_SHA;
#else
  return "unknown";
#endif
}

void write_manifest(const std::string& path, const RunManifest& manifest) {
  nlohmann::json j;
  j["name"] = manifest.name;
  j["commit"] = manifest.commit.empty() ? build_commit() : manifest.commit;
  j["seed"] = manifest.seed;
  j["grid"] = {{"R", manifest.R}, {"P", manifest.P}, {"Q", manifest.Q}};
  nlohmann::json flags = nlohmann::json::object();
  for (const auto& [key, value] : manifest.flags) flags[key] = value;
  j["flags"] = flags;
  auto out = open_out(path);
  out << j.dump(2) << "\n";
}

RunManifest read_manifest(const std::string& path) {
  auto in = open_in(path);
  nlohmann::json j;
  in >> j;
  RunManifest manifest;
  manifest.name = j.value("name", "");
  manifest.commit = j.value("commit", "");
  manifest.seed = j.value("seed", uint64_t{0});
  if (j.contains("grid")) {
    manifest.R = j["grid"].value("R", 0);
    manifest.P = j["grid"].value("P", 0);
    manifest.Q = j["grid"].value("Q", 0);
  }
  if (j.contains("flags"))
    for (const auto& [key, value] : j["flags"].items())
      manifest.flags.emplace_back(key, value.get<std::string>());
  return manifest;
}

}  // namespace geotomo
