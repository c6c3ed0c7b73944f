#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "phasenet/field_solver.hpp"
#include "phasenet/grid.hpp"

namespace phasenet {

// Binary dump of a per-cell field over the full nx x ny box. Layout
// (little endian): 8-byte magic "PNFIELD1", int64 nx, int64 ny, float64
// hgrid, float64 epsilon, int64 m, float64 origin x, float64 origin y,
// then nx * ny * m float64 values, rows of constant j in increasing j,
// components innermost. Cells outside the domain hold NaN.
struct FieldDump {
  std::int64_t nx = 0, ny = 0, m = 0;
  double h = 0.0, epsilon = 0.0;
  Vec2 origin{};
  std::vector<double> values;
  double at(std::int64_t i, std::int64_t j, std::int64_t k) const { return values[((j * nx) + i) * m + k]; }
};

FieldDump make_dump(const DomainGrid& g, const std::vector<double>& u, int m, double epsilon);
void write_field_bin(const std::string& path, const FieldDump& d);
FieldDump read_field_bin(const std::string& path);

// i,j,x,y,u0..u{m-1} over domain cells.
std::string field_csv(const DomainGrid& g, const std::vector<double>& u, int m);
// iteration,phase,energy,residual.
std::string energy_log_csv(const std::vector<EnergyLogEntry>& log);

void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

}  // namespace phasenet
