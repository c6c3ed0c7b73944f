#include "phasenet/interface.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "phasenet/errors.hpp"

namespace phasenet {

namespace {

// Labels connected components of cells with keep(c) true. Cells in one
// component must also share key(c).
template <class Keep, class Key>
int label_components(const DomainGrid& g, bool diagonal, Keep keep, Key key, std::vector<int>& comp) {
  const int n = g.size();
  comp.assign(n, -1);
  int count = 0;
  std::vector<int> stack;
  for (int c0 = 0; c0 < n; ++c0) {
    if (comp[c0] >= 0 || !keep(c0)) continue;
    comp[c0] = count;
    stack.push_back(c0);
    while (!stack.empty()) {
      int c = stack.back();
      stack.pop_back();
      int i = g.ci[c], j = g.cj[c];
      for (int dj = -1; dj <= 1; ++dj)
        for (int di = -1; di <= 1; ++di) {
          if (di == 0 && dj == 0) continue;
          if (!diagonal && di != 0 && dj != 0) continue;
          int q = g.at(i + di, j + dj);
          if (q < 0 || comp[q] >= 0 || !keep(q) || key(q) != key(c)) continue;
          comp[q] = count;
          stack.push_back(q);
        }
    }
    ++count;
  }
  return count;
}

}  // namespace

InterfaceSet extract(const DomainGrid& g, const std::vector<double>& u, const Potential& p, double delta, double d0) {
  if (!(delta > 0.0 && delta < d0))
    throw Error(Errc::DeltaOutOfRange, "delta must lie in (0, d0)");
  const int n = g.size(), m = p.dim(), nw = p.num_wells();
  if (static_cast<int>(u.size()) != n * m) throw Error(Errc::DimensionMismatch, "field size does not match grid");
  InterfaceSet s;
  s.delta = delta;
  s.wells = nw;
  s.interface_mask.assign(n, 0);
  s.phase_label.assign(n, -1);
  s.phase_cells.assign(nw, 0);
  for (int c = 0; c < n; ++c) {
    int w = -1;
    double d = p.nearest_well({u.data() + static_cast<size_t>(c) * m, static_cast<size_t>(m)}, &w);
    if (d > delta) {
      s.interface_mask[c] = 1;
      ++s.interface_cells;
    } else {
      s.phase_label[c] = w;
      ++s.phase_cells[w];
    }
  }
  s.measure = s.interface_cells * g.h * g.h;

  s.n_interface_components = label_components(
      g, true, [&](int c) { return s.interface_mask[c] != 0; }, [](int) { return 0; }, s.interface_component);
  label_components(
      g, false, [&](int c) { return s.phase_label[c] >= 0; }, [&](int c) { return s.phase_label[c]; },
      s.phase_component);
  s.phase_components.assign(nw, 0);
  std::vector<int> seen;
  for (int c = 0; c < n; ++c) {
    int k = s.phase_component[c];
    if (k < 0) continue;
    if (k >= static_cast<int>(seen.size())) seen.resize(k + 1, 0);
    if (!seen[k]) {
      seen[k] = 1;
      ++s.phase_components[s.phase_label[c]];
    }
  }
  for (int c = 0; c < n; ++c) {
    if (s.phase_label[c] < 0) continue;
    for (int q : {g.nbr[c][0], g.nbr[c][2]})
      if (q >= 0 && s.phase_label[q] >= 0 && s.phase_label[q] != s.phase_label[c]) ++s.adjacent_phase_pairs;
  }
  return s;
}

bool ConnectivityReport::all_phases_connected() const {
  return std::all_of(phase_connected.begin(), phase_connected.end(), [](bool b) { return b; });
}

ConnectivityReport connectivity_report(const DomainGrid& g, const std::vector<double>& u, const Potential& p,
                                       double delta, double d0, const BoundaryDatum* datum, double delta0) {
  ConnectivityReport r;
  auto s = extract(g, u, p, delta, d0);
  r.interface_components = s.n_interface_components;
  r.phase_components = s.phase_components;
  const int nw = p.num_wells();
  for (int a = 0; a < nw; ++a) {
    r.phase_connected.push_back(s.phase_components[a] <= 1);
    std::vector<int> comp;
    r.complement_components.push_back(label_components(
        g, false, [&](int c) { return s.phase_label[c] != a; }, [](int) { return 0; }, comp));
  }
  if (datum) {
    auto arcs = measure_datum_arcs(g, *datum, p, delta);
    r.gamma_runs = arcs.gamma_runs_per_well;
    for (int k : r.gamma_runs) r.gamma_single_arc.push_back(k <= 1);
  }
  for (double f : {0.99, 1.01}) {
    double d = delta * f;
    if (!(d < d0)) continue;
    auto t = extract(g, u, p, d, d0);
    if (t.n_interface_components != s.n_interface_components || t.phase_components != s.phase_components)
      r.near_critical_delta = true;
  }
  if (r.near_critical_delta) r.warnings.push_back("near-critical delta");
  if (delta0 > 0.0 && delta > delta0) {
    r.delta_above_delta0 = true;
    r.warnings.push_back("delta exceeds delta0");
  }
  return r;
}

MeasureScaling measure_scaling(double alpha, const std::vector<double>& eps, const std::vector<double>& measure) {
  if (eps.size() != measure.size()) throw Error(Errc::InvalidArgument, "eps and measure lists differ in length");
  std::vector<double> e = eps;
  std::sort(e.begin(), e.end());
  int distinct = static_cast<int>(std::unique(e.begin(), e.end()) - e.begin());
  if (distinct < 3) throw Error(Errc::InsufficientData, "measure scaling needs at least three epsilon values");
  for (double v : measure)
    if (!(v > 0.0)) throw Error(Errc::InsufficientData, "interface measure must be positive");
  MeasureScaling out;
  out.alpha = alpha;
  out.eps = eps;
  out.measure = measure;
  out.fit = power_fit(eps, measure);
  return out;
}

std::string labels_csv(const DomainGrid& g, const InterfaceSet& s) {
  std::ostringstream o;
  o << "i,j,x,y,label,interface\n";
  char buf[128];
  for (int c = 0; c < g.size(); ++c) {
    Vec2 x = g.center(c);
    std::snprintf(buf, sizeof buf, "%d,%d,%.9g,%.9g,%d,%d\n", g.ci[c], g.cj[c], x.x, x.y, s.phase_label[c],
                  static_cast<int>(s.interface_mask[c]));
    o << buf;
  }
  return o.str();
}

std::string interface_svg(const DomainGrid& g, const InterfaceSet& s, int pixels) {
  static const char* colors[] = {"#f2e6a0", "#a6cee3", "#b2df8a", "#fb9a99", "#fdbf6f",
                                 "#cab2d6", "#ffff99", "#8dd3c7", "#bebada", "#80b1d3"};
  double span = std::max(g.nx, g.ny) * g.h;
  double sc = pixels / span;
  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << pixels << "\" height=\"" << pixels
    << "\" shape-rendering=\"crispEdges\">\n";
  char buf[160];
  // One rect per horizontal run of equal colour.
  for (int j = 0; j < g.ny; ++j) {
    int i = 0;
    while (i < g.nx) {
      int c = g.at(i, j);
      if (c < 0) {
        ++i;
        continue;
      }
      int key = s.interface_mask[c] ? -1 : s.phase_label[c];
      int e = i + 1;
      while (e < g.nx) {
        int q = g.at(e, j);
        if (q < 0 || (s.interface_mask[q] ? -1 : s.phase_label[q]) != key) break;
        ++e;
      }
      const char* fill = key < 0 ? "#444444" : colors[key % 10];
      std::snprintf(buf, sizeof buf, "<rect x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" height=\"%.2f\" fill=\"%s\"/>\n",
                    i * g.h * sc, (g.ny - 1 - j) * g.h * sc, (e - i) * g.h * sc, g.h * sc, fill);
      o << buf;
      i = e;
    }
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace phasenet
