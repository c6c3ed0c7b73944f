#include "phasenet/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>

#include "phasenet/errors.hpp"

namespace phasenet {

int DomainGrid::locate(Vec2 p) const {
  int i = static_cast<int>(std::floor((p.x - origin.x) / h));
  int j = static_cast<int>(std::floor((p.y - origin.y) / h));
  return at(i, j);
}

static void finish_grid(DomainGrid& g) {
  g.cell_at.assign(static_cast<size_t>(g.nx) * g.ny, -1);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      Vec2 c{g.origin.x + (i + 0.5) * g.h, g.origin.y + (j + 0.5) * g.h};
      if (!g.domain.contains(c, 1e-12 * g.h)) continue;
      g.cell_at[static_cast<size_t>(j) * g.nx + i] = static_cast<int>(g.ci.size());
      g.ci.push_back(i);
      g.cj.push_back(j);
    }
  const int n = g.size();
  g.kind.assign(n, CellKind::Interior);
  g.nbr.resize(n);
  g.n_interior = 0;
  for (int c = 0; c < n; ++c) {
    int i = g.ci[c], j = g.cj[c];
    g.nbr[c] = {g.at(i + 1, j), g.at(i - 1, j), g.at(i, j + 1), g.at(i, j - 1)};
    bool bnd = false;
    for (int q : g.nbr[c]) bnd |= (q < 0);
    g.kind[c] = bnd ? CellKind::Boundary : CellKind::Interior;
    if (!bnd) ++g.n_interior;
  }
  std::vector<std::pair<double, int>> b;
  for (int c = 0; c < n; ++c)
    if (g.kind[c] == CellKind::Boundary) b.emplace_back(g.domain.param(g.center(c)), c);
  std::sort(b.begin(), b.end());
  for (auto& [s, c] : b) {
    g.boundary_cells.push_back(c);
    g.boundary_param.push_back(s);
  }
  auto chk = check_grid(g);
  if (!chk.ok) throw Error(Errc::ResolutionTooCoarse, "grid interior is not a single closed 4-connected component");
}

DomainGrid build_disk_grid(double R, double h, Vec2 center) {
  if (!(R > 0.0) || !(h > 0.0)) throw Error(Errc::InvalidArgument, "radius and spacing must be positive");
  if (!(h < R / 16.0)) throw Error(Errc::ResolutionTooCoarse, "grid spacing must be below R/16");
  DomainGrid g;
  g.domain = Domain::disk(center, R);
  g.h = h;
  int half = static_cast<int>(std::ceil(R / h)) + 1;
  g.nx = g.ny = 2 * half;
  g.origin = {center.x - half * h, center.y - half * h};
  finish_grid(g);
  return g;
}

DomainGrid build_rect_grid(Vec2 lo, Vec2 hi, double h) {
  if (!(h > 0.0)) throw Error(Errc::InvalidArgument, "spacing must be positive");
  DomainGrid g;
  g.domain = Domain::rect(lo, hi);
  double w = hi.x - lo.x, ht = hi.y - lo.y;
  if (!(h < std::min(w, ht) / 16.0)) throw Error(Errc::ResolutionTooCoarse, "grid spacing must be below width/16");
  g.h = h;
  g.nx = static_cast<int>(std::floor(w / h + 1e-9));
  g.ny = static_cast<int>(std::floor(ht / h + 1e-9));
  g.origin = {lo.x + 0.5 * (w - g.nx * h), lo.y + 0.5 * (ht - g.ny * h)};
  finish_grid(g);
  return g;
}

GridCheck check_grid(const DomainGrid& g) {
  GridCheck r;
  const int n = g.size();
  for (int c = 0; c < n; ++c)
    if (g.kind[c] == CellKind::Interior)
      for (int q : g.nbr[c])
        if (q < 0) r.stencil_closed = false;
  std::vector<char> seen(n, 0);
  for (int c = 0; c < n; ++c) {
    if (g.kind[c] != CellKind::Interior || seen[c]) continue;
    ++r.interior_components;
    std::queue<int> Q;
    Q.push(c);
    seen[c] = 1;
    while (!Q.empty()) {
      int x = Q.front();
      Q.pop();
      for (int q : g.nbr[x])
        if (q >= 0 && !seen[q] && g.kind[q] == CellKind::Interior) {
          seen[q] = 1;
          Q.push(q);
        }
    }
  }
  r.ok = r.stencil_closed && r.interior_components == 1;
  return r;
}

bool interpolate(const DomainGrid& g, const std::vector<double>& values, int m, Vec2 p, double* out) {
  double fx = (p.x - g.origin.x) / g.h - 0.5, fy = (p.y - g.origin.y) / g.h - 0.5;
  int i0 = static_cast<int>(std::floor(fx)), j0 = static_cast<int>(std::floor(fy));
  double wx = fx - i0, wy = fy - j0;
  int c00 = g.at(i0, j0), c10 = g.at(i0 + 1, j0), c01 = g.at(i0, j0 + 1), c11 = g.at(i0 + 1, j0 + 1);
  if (c00 < 0 || c10 < 0 || c01 < 0 || c11 < 0) return false;
  for (int k = 0; k < m; ++k)
    out[k] = (1 - wx) * (1 - wy) * values[c00 * m + k] + wx * (1 - wy) * values[c10 * m + k] +
             (1 - wx) * wy * values[c01 * m + k] + wx * wy * values[c11 * m + k];
  return true;
}

}  // namespace phasenet
