#include "phasenet/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "phasenet/errors.hpp"
#include "phasenet/fit.hpp"

namespace phasenet {

double fiber_energy(const Potential& p, const std::vector<double>& samples, int m, double L, double eps) {
  int n = static_cast<int>(samples.size()) / m;
  if (n < 2) return 0.0;
  double ds = L / (n - 1), J = 0.0;
  std::vector<double> mid(m);
  for (int k = 0; k + 1 < n; ++k) {
    double g2 = 0.0;
    for (int i = 0; i < m; ++i) {
      double d = (samples[(k + 1) * m + i] - samples[k * m + i]) / ds;
      g2 += d * d;
      mid[i] = 0.5 * (samples[(k + 1) * m + i] + samples[k * m + i]);
    }
    J += (0.5 * eps * g2 + p.value(mid) / eps) * ds;
  }
  return J;
}

FiberReport fiber_lower_bound(const DomainGrid& g, const std::vector<double>& u, const Potential& p,
                              const Network& net, const SurfaceTensionMatrix& sigma, double eps,
                              const FiberOptions& opts) {
  FiberReport r;
  const int m = p.dim();
  const double L = std::pow(eps, opts.beta);
  const double spacing = opts.spacing > 0 ? opts.spacing : 2 * g.h;
  const double exclude = opts.branch_C * std::pow(eps, 0.5 - opts.alpha);
  r.delta = std::pow(eps, opts.alpha);
  int n = opts.samples > 0 ? opts.samples : std::max(9, static_cast<int>(std::ceil(2 * L / (0.25 * g.h))) + 1);

  std::vector<double> samples(static_cast<size_t>(n) * m);
  for (int k = 0; k < static_cast<int>(net.arcs.size()); ++k) {
    const auto& a = net.arcs[k];
    if (a.degenerate) continue;
    Vec2 p1 = net.nodes[a.nodes[0]].pos, p2 = net.nodes[a.nodes[1]].pos;
    double len = norm(p2 - p1);
    if (len <= 0) continue;
    Vec2 tau = (p2 - p1) / len, nu = perp(tau);
    double sg = sigma(a.phases[0], a.phases[1]);
    int count = std::max(1, static_cast<int>(std::floor(len / spacing)));
    for (int i = 0; i < count; ++i) {
      FiberSample f;
      f.arc = k;
      f.s = (i + 0.5) * len / count;
      f.x = p1 + f.s * tau;
      f.nu = nu;
      f.half_length = L;
      f.sigma = sg;
      bool inside = true;
      for (int q = 0; q < n && inside; ++q) {
        Vec2 y = f.x + (-L + 2 * L * q / (n - 1)) * nu;
        inside = interpolate(g, u, m, y, samples.data() + static_cast<size_t>(q) * m);
      }
      if (!inside) {
        ++r.outside;
        continue;
      }
      f.J = fiber_energy(p, samples, m, 2 * L, eps);
      int wl = -1, wr = -1;
      double dl = p.nearest_well({samples.data() + static_cast<size_t>(n - 1) * m, static_cast<size_t>(m)}, &wl);
      double dr = p.nearest_well({samples.data(), static_cast<size_t>(m)}, &wr);
      f.phases_ok = wl == a.phases[0] && wr == a.phases[1] && dl <= r.delta && dr <= r.delta;
      for (int e = 0; e < 2; ++e)
        if (net.nodes[a.nodes[e]].kind == NodeKind::Branch && norm(f.x - net.nodes[a.nodes[e]].pos) < exclude)
          f.near_branch = true;
      r.fibers.push_back(f);
    }
  }
  if (r.fibers.empty()) throw Error(Errc::FiberOutsideGrid, "every fiber leaves the grid");
  int ok = 0;
  r.min_J = std::numeric_limits<double>::infinity();
  r.min_normalized_gap = std::numeric_limits<double>::infinity();
  double sum = 0;
  for (const auto& f : r.fibers) {
    double w = norm(net.nodes[net.arcs[f.arc].nodes[1]].pos - net.nodes[net.arcs[f.arc].nodes[0]].pos);
    int cnt = std::max(1, static_cast<int>(std::floor(w / spacing)));
    double ds = w / cnt;
    ok += f.phases_ok;
    sum += f.J;
    r.min_J = std::min(r.min_J, f.J);
    r.covered_length += ds;
    r.sigma_covered += f.sigma * ds;
    r.fiber_energy += f.J * ds;
    if (!f.near_branch && f.phases_ok)
      r.min_normalized_gap = std::min(r.min_normalized_gap, (f.J - f.sigma) / (r.delta * r.delta));
  }
  r.fraction_phases_ok = static_cast<double>(ok) / r.fibers.size();
  r.mean_J = sum / r.fibers.size();
  return r;
}

double sandwich_budget(const SandwichBudget& b, double eps) {
  return std::max(b.C1 * std::cbrt(eps), b.C_ub * eps * std::pow(std::log(eps), 2)) + b.tol;
}

SandwichReport sandwich_report(double J, double F_hat, double F_free, double eps, const SandwichBudget& b,
                               double J_test, bool throw_on_fail) {
  SandwichReport r;
  r.J = J;
  r.F_hat = F_hat;
  r.F_free = F_free;
  r.J_test = J_test;
  r.eps = eps;
  r.budget = sandwich_budget(b, eps);
  r.lower_ok = J >= F_hat - r.budget;
  r.upper_ok = J_test > 0 ? J <= J_test + b.tol : J <= F_free + r.budget;
  r.network_ok = F_hat - F_free <= r.budget;
  if (throw_on_fail && !r.pass()) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "eps %.4g: J %.6f F_hat %.6f F_free %.6f budget %.6f", eps, J, F_hat, F_free,
                  r.budget);
    throw Error(Errc::SandwichViolation, buf);
  }
  return r;
}

DecayFit decay_fit(const DomainGrid& g, const std::vector<double>& u, const Potential& p, const Network& net,
                   double eps, const DecayOptions& opts) {
  DecayFit out;
  out.eps = eps;
  out.offset = opts.C_off * std::pow(eps, 1.0 / 6.0);
  const int m = p.dim(), nw = p.num_wells();
  const double node_r = opts.node_C * std::cbrt(eps);
  std::vector<std::vector<double>> xs(nw), ys(nw);
  const int na = static_cast<int>(net.arcs.size());
  std::vector<std::vector<double>> sx(static_cast<size_t>(na) * nw), sy(sx.size());
  for (int c = 0; c < g.size(); ++c) {
    if (!g.interior(c)) continue;
    Vec2 x = g.center(c);
    double d = distance_to_network(net, x);
    if (d <= out.offset || g.domain.boundary_distance(x) < d) continue;
    bool near_node = false;
    for (const auto& nd : net.nodes) near_node = near_node || norm(x - nd.pos) < node_r;
    if (near_node) continue;
    int a = face_label_at(net, x);
    if (a < 0 || a >= nw) continue;
    auto w = p.well(a);
    double dev = 0;
    for (int i = 0; i < m; ++i) dev += std::pow(u[static_cast<size_t>(c) * m + i] - w[i], 2);
    dev = std::sqrt(dev);
    if (dev <= opts.floor) continue;
    xs[a].push_back(d);
    ys[a].push_back(std::log(dev));
    int best = -1;
    double bd = std::numeric_limits<double>::infinity();
    for (int k = 0; k < na; ++k) {
      const auto& arc = net.arcs[k];
      if (arc.degenerate) continue;
      double dk = segment_distance(x, net.nodes[arc.nodes[0]].pos, net.nodes[arc.nodes[1]].pos);
      if (dk < bd) {
        bd = dk;
        best = k;
      }
    }
    if (best >= 0) {
      sx[static_cast<size_t>(best) * nw + a].push_back(d);
      sy[static_cast<size_t>(best) * nw + a].push_back(std::log(dev));
    }
  }
  for (int k = 0; k < na; ++k)
    for (int a = 0; a < nw; ++a) {
      const auto& x = sx[static_cast<size_t>(k) * nw + a];
      if (static_cast<int>(x.size()) < opts.min_cells) continue;
      auto f = linear_fit(x, sy[static_cast<size_t>(k) * nw + a]);
      out.sides.push_back({k, a, static_cast<int>(x.size()), -f.slope * eps, f.intercept, f.r2});
    }
  for (int a = 0; a < nw; ++a) {
    PhaseDecay pd;
    pd.well = a;
    pd.cells = static_cast<int>(xs[a].size());
    if (pd.cells >= opts.min_cells) {
      auto f = linear_fit(xs[a], ys[a]);
      pd.fitted = true;
      pd.slope = f.slope;
      pd.intercept = f.intercept;
      pd.r2 = f.r2;
      pd.k_eps = -f.slope * eps;
      out.dist.insert(out.dist.end(), xs[a].begin(), xs[a].end());
      out.log_dev.insert(out.log_dev.end(), ys[a].begin(), ys[a].end());
    }
    out.phases.push_back(pd);
  }
  out.cells = static_cast<int>(out.dist.size());
  if (out.cells < opts.min_cells) throw Error(Errc::TooFewQualifyingCells, "too few cells qualify for the decay fit");
  auto f = linear_fit(out.dist, out.log_dev);
  out.k_eps = -f.slope * eps;
  out.r2 = f.r2;
  return out;
}

bool DecayFit::phases_pass(double min_r2) const {
  bool any = false;
  for (const auto& p : phases) {
    if (!p.fitted) continue;
    any = true;
    if (!(p.r2 >= min_r2 && p.slope < 0)) return false;
  }
  return any;
}

std::string fibers_csv(const FiberReport& r) {
  std::ostringstream o;
  o << "arc,s,x,y,J,sigma,phases_ok,near_branch\n";
  char buf[200];
  for (const auto& f : r.fibers) {
    std::snprintf(buf, sizeof buf, "%d,%.9g,%.9g,%.9g,%.12g,%.12g,%d,%d\n", f.arc, f.s, f.x.x, f.x.y, f.J, f.sigma,
                  f.phases_ok ? 1 : 0, f.near_branch ? 1 : 0);
    o << buf;
  }
  return o.str();
}

std::string decay_csv(const DecayFit& f) {
  std::ostringstream o;
  o << "dist,log_dev\n";
  char buf[64];
  for (size_t i = 0; i < f.dist.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.9g,%.9g\n", f.dist[i], f.log_dev[i]);
    o << buf;
  }
  return o.str();
}

}  // namespace phasenet
