#include "phasenet/boundary.hpp"

#include <algorithm>
#include <cmath>

#include "phasenet/errors.hpp"

namespace phasenet {

static double sup_norm(const DomainGrid& grid, const std::vector<double>& v, int m) {
  double M = 0.0;
  for (int c : grid.boundary_cells) {
    double s = 0.0;
    for (int k = 0; k < m; ++k) s += v[c * m + k] * v[c * m + k];
    M = std::max(M, std::sqrt(s));
  }
  return M;
}

BoundaryDatum build_boundary_datum(const DomainGrid& grid, const std::vector<double>& vertices,
                                   const std::vector<int>& labels, double w, const ProfileSet& profiles,
                                   double epsilon, const Potential& p) {
  const int K = static_cast<int>(vertices.size());
  if (K < 1 || labels.size() != vertices.size())
    throw Error(Errc::InvalidArgument, "one label per boundary arc between consecutive vertices");
  if (!(w > 0.0)) throw Error(Errc::InvalidArgument, "transition width must be positive");
  if (!(epsilon > 0.0)) throw Error(Errc::InvalidArgument, "epsilon must be positive");
  const Domain& D = grid.domain;
  const double P = D.perimeter();
  std::vector<double> v = vertices;
  for (double& s : v) {
    s = std::fmod(s, P);
    if (s < 0) s += P;
  }
  for (int k = 1; k < K; ++k)
    if (v[k] <= v[k - 1]) throw Error(Errc::InvalidArgument, "vertices must be increasing in arclength");
  for (int k = 0; k < K; ++k) {
    double gap = K == 1 ? P : D.ccw_gap(v[k], v[(k + 1) % K]);
    if (gap < w) throw Error(Errc::OverlappingTransitions, "transition arcs around adjacent vertices overlap");
    if (K > 1 && labels[k] == labels[(k + K - 1) % K])
      throw Error(Errc::InvalidArgument, "adjacent boundary arcs carry the same well");
  }

  const int m = p.dim();
  BoundaryDatum d;
  d.m = m;
  d.values.assign(static_cast<size_t>(grid.size()) * m, 0.0);
  std::vector<double> tmp(m);
  for (size_t b = 0; b < grid.boundary_cells.size(); ++b) {
    int c = grid.boundary_cells[b];
    double s = grid.boundary_param[b];
    int kbest = 0;
    double best = 1e300;
    for (int k = 0; k < K; ++k) {
      double g = D.signed_gap(v[k], s);
      if (std::abs(g) < std::abs(best)) {
        best = g;
        kbest = k;
      }
    }
    double* out = d.values.data() + c * m;
    int after = labels[kbest], before = labels[(kbest + K - 1) % K];
    int side = best >= 0 ? after : before;
    auto well = p.well(side);
    if (K > 1 && std::abs(best) < 0.5 * w) {
      // core of the transition follows the rescaled profile, the outer half
      // blends linearly to the well on that side
      profiles.eval(before, after, best / epsilon, tmp);
      double lam = std::clamp((std::abs(best) - 0.25 * w) / (0.25 * w), 0.0, 1.0);
      for (int k = 0; k < m; ++k) out[k] = (1.0 - lam) * tmp[k] + lam * well[k];
    } else {
      for (int k = 0; k < m; ++k) out[k] = well[k];
    }
  }
  d.M = sup_norm(grid, d.values, m);
  for (int k = 0; k < K; ++k) {
    double a = v[k], b = K == 1 ? v[k] + P : v[(k + 1) % K];
    BoundaryArc g;
    g.label = labels[k];
    g.s_start = std::fmod(a + 0.5 * w, P);
    g.length = (K == 1 ? P : D.ccw_gap(a, b)) - (K == 1 ? 0.0 : w);
    g.s_end = std::fmod(g.s_start + g.length, P);
    d.gammas.push_back(g);
    if (K > 1) {
      BoundaryArc t;
      t.from = labels[(k + K - 1) % K];
      t.to = labels[k];
      t.s_start = std::fmod(a - 0.5 * w + P, P);
      t.length = w;
      t.s_end = std::fmod(a + 0.5 * w, P);
      d.transitions.push_back(t);
    }
  }
  return d;
}

BoundaryDatum datum_from_field(const DomainGrid& grid, const std::vector<double>& field, int m) {
  BoundaryDatum d;
  d.m = m;
  d.values.assign(static_cast<size_t>(grid.size()) * m, 0.0);
  for (int c : grid.boundary_cells)
    for (int k = 0; k < m; ++k) d.values[c * m + k] = field[c * m + k];
  d.M = sup_norm(grid, d.values, m);
  return d;
}

BoundaryDatum constant_datum(const DomainGrid& grid, std::span<const double> value) {
  const int m = static_cast<int>(value.size());
  std::vector<double> f(static_cast<size_t>(grid.size()) * m);
  for (int c = 0; c < grid.size(); ++c)
    for (int k = 0; k < m; ++k) f[c * m + k] = value[k];
  return datum_from_field(grid, f, m);
}

DatumArcs measure_datum_arcs(const DomainGrid& grid, const BoundaryDatum& datum, const Potential& p, double delta) {
  DatumArcs out;
  const int nb = static_cast<int>(grid.boundary_cells.size());
  out.gamma_runs_per_well.assign(p.num_wells(), 0);
  if (nb == 0) return out;
  std::vector<int> lab(nb);
  for (int b = 0; b < nb; ++b) {
    int w = -1;
    double d = p.nearest_well(datum.at(grid.boundary_cells[b]), &w);
    lab[b] = d <= delta ? w : -1;
  }
  // rotate so that the scan starts at a label change
  int start = 0;
  for (int b = 0; b < nb; ++b)
    if (lab[b] != lab[(b + nb - 1) % nb]) {
      start = b;
      break;
    }
  const double P = grid.domain.perimeter();
  const double cell_len = P / nb;
  int b = 0;
  while (b < nb) {
    int idx = (start + b) % nb;
    int l = lab[idx];
    int e = b;
    while (e + 1 < nb && lab[(start + e + 1) % nb] == l) ++e;
    BoundaryArc arc;
    arc.label = l;
    arc.s_start = grid.boundary_param[idx];
    arc.s_end = grid.boundary_param[(start + e) % nb];
    arc.length = (e - b + 1) * cell_len;
    if (l >= 0) {
      out.gammas.push_back(arc);
      out.gamma_runs_per_well[l]++;
    } else {
      out.transitions.push_back(arc);
    }
    b = e + 1;
  }
  return out;
}

DatumCheck check_datum(const DomainGrid& grid, const BoundaryDatum& datum, const Potential& p, double delta,
                       double M_bound, double transition_C, double epsilon) {
  DatumCheck r;
  if (datum.M > M_bound) {
    r.ok = false;
    r.failures.push_back("datum sup norm exceeds M");
  }
  auto arcs = measure_datum_arcs(grid, datum, p, delta);
  for (int a = 0; a < p.num_wells(); ++a)
    if (arcs.gamma_runs_per_well[a] > 1) {
      r.ok = false;
      r.failures.push_back("Gamma_" + std::to_string(a) + " is not a single arc");
    }
  double bound = transition_C * std::cbrt(epsilon);
  for (const auto& t : arcs.transitions)
    if (t.length > bound) {
      r.ok = false;
      r.failures.push_back("transition arc longer than C eps^{1/3}");
    }
  return r;
}

}  // namespace phasenet
