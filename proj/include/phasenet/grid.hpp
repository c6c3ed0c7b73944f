#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "phasenet/geometry.hpp"

namespace phasenet {

enum class CellKind : std::uint8_t { Interior = 0, Boundary = 1 };

// Cell-centred grid over a convex domain. Domain cells have their centre in
// the closed domain; boundary cells are domain cells with a 4-neighbour
// outside the domain and carry the Dirichlet data.
struct DomainGrid {
  Domain domain = Domain::disk({0, 0}, 1.0);
  int nx = 0, ny = 0;
  Vec2 origin{};  // lower-left corner of cell (0,0)
  double h = 0.0;

  std::vector<int> cell_at;  // nx*ny -> domain index or -1
  std::vector<int> ci, cj;
  std::vector<CellKind> kind;
  std::vector<std::array<int, 4>> nbr;  // east, west, north, south; -1 outside
  std::vector<int> boundary_cells;       // sorted by boundary arclength
  std::vector<double> boundary_param;    // per boundary_cells entry
  int n_interior = 0;

  int size() const { return static_cast<int>(ci.size()); }
  Vec2 center(int c) const { return {origin.x + (ci[c] + 0.5) * h, origin.y + (cj[c] + 0.5) * h}; }
  int at(int i, int j) const {
    if (i < 0 || j < 0 || i >= nx || j >= ny) return -1;
    return cell_at[static_cast<size_t>(j) * nx + i];
  }
  // Domain cell containing p, or -1.
  int locate(Vec2 p) const;
  double area() const { return size() * h * h; }
  bool interior(int c) const { return kind[c] == CellKind::Interior; }
};

DomainGrid build_disk_grid(double R, double h, Vec2 center = {0.0, 0.0});
DomainGrid build_rect_grid(Vec2 lo, Vec2 hi, double h);

struct GridCheck {
  bool ok = true;
  int interior_components = 0;
  bool stencil_closed = true;
};
GridCheck check_grid(const DomainGrid& g);

// Bilinear interpolation of a per-cell field (m components) at p; returns
// false when a supporting cell centre lies outside the domain.
bool interpolate(const DomainGrid& g, const std::vector<double>& values, int m, Vec2 p, double* out);

}  // namespace phasenet
