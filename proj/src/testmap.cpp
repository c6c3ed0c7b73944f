#include "phasenet/testmap.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "phasenet/errors.hpp"
#include "phasenet/fit.hpp"

namespace phasenet {

TestMap::TestMap(const Network& net, const ProfileSet& profiles, const Potential& p, double epsilon,
                 const TestMapParams& params)
    : net_(&net), profiles_(&profiles), pot_(&p), m_(p.dim()) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw Error(Errc::InvalidArgument, "test map needs 0 < eps < 1");
  const double scale = net.domain.scale();
  const double tol = 1e-9 * scale;
  geom_.epsilon = epsilon;
  geom_.min_arc = std::numeric_limits<double>::infinity();

  std::vector<std::vector<double>> dirs;
  auto center_of = [&](Vec2 q) {
    for (size_t k = 0; k < geom_.centers.size(); ++k)
      if (norm(geom_.centers[k] - q) <= tol) return static_cast<int>(k);
    geom_.centers.push_back(q);
    dirs.emplace_back();
    return static_cast<int>(geom_.centers.size()) - 1;
  };
  for (const auto& a : net.arcs) {
    if (a.degenerate) continue;
    Vec2 p1 = net.nodes[a.nodes[0]].pos, p2 = net.nodes[a.nodes[1]].pos;
    double len = norm(p2 - p1);
    if (len <= tol) continue;
    if (!profiles.has(a.phases[1], a.phases[0]))
      throw Error(Errc::InvalidArgument, "no connection profile for phases " + std::to_string(a.phases[1]) + "," +
                                             std::to_string(a.phases[0]));
    Vec2 tau = (p2 - p1) / len;
    segs_.push_back({p1, tau, perp(tau), len, a.phases[0], a.phases[1]});
    geom_.min_arc = std::min(geom_.min_arc, len);
    dirs[center_of(p1)].push_back(std::atan2(tau.y, tau.x));
    dirs[center_of(p2)].push_back(std::atan2(-tau.y, -tau.x));
  }

  double alpha0 = M_PI;
  for (auto& d : dirs) {
    if (d.size() < 2) continue;
    std::sort(d.begin(), d.end());
    for (size_t i = 0; i < d.size(); ++i) {
      double gap = i + 1 < d.size() ? d[i + 1] - d[i] : d[0] + 2 * M_PI - d[i];
      alpha0 = std::min(alpha0, gap);
    }
  }
  geom_.alpha0 = params.alpha0 > 0 ? params.alpha0 : alpha0;
  double c0 = profiles.min_tail_rate();
  geom_.kappa0 = params.kappa0 > 0 ? params.kappa0 : 2.0 / c0;
  geom_.h = geom_.kappa0 * epsilon * std::abs(std::log(epsilon));
  geom_.rho = 4 * geom_.h / std::sin(geom_.alpha0 / 2);

  geom_.min_center_gap = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < geom_.centers.size(); ++i)
    for (size_t j = i + 1; j < geom_.centers.size(); ++j)
      geom_.min_center_gap = std::min(geom_.min_center_gap, norm(geom_.centers[i] - geom_.centers[j]));
  if (!segs_.empty() && !(2 * geom_.h < geom_.min_arc / 4)) {
    geom_.invariants_ok = false;
    geom_.problems.push_back("2h is not below min arc length / 4");
  }
  if (!(geom_.rho < geom_.min_center_gap / 2)) {
    if (geom_.centers.size() > 1) {
      geom_.invariants_ok = false;
      geom_.problems.push_back("rho is not below half the distance between ball centres");
    }
  }
  if (params.enforce && !geom_.invariants_ok) throw Error(Errc::GeometryConflict, geom_.problems.front());
}

TestRegion TestMap::outside_balls(Vec2 x, std::span<double> out, bool* conflict) const {
  const double h = geom_.h, eps = geom_.epsilon;
  const Seg* hit = nullptr;
  double t_hit = 0;
  for (const auto& s : segs_) {
    Vec2 d = x - s.p1;
    double sp = dot(d, s.tau), t = dot(d, s.nu);
    if (sp < 0 || sp > s.len || std::abs(t) > 2 * h) continue;
    if (hit && conflict) *conflict = true;
    if (!hit) {
      hit = &s;
      t_hit = t;
    }
  }
  if (!hit) {
    int w = face_label_at(*net_, x);
    auto a = pot_->well(std::max(w, 0));
    std::copy(a.begin(), a.end(), out.begin());
    return TestRegion::Exterior;
  }
  const int from = hit->a_prime, to = hit->a;
  if (std::abs(t_hit) <= h) {
    profiles_->eval(from, to, t_hit / eps, out);
    return TestRegion::Strip;
  }
  std::vector<double> edge(m_);
  double r = std::abs(t_hit) / h;
  auto well = pot_->well(t_hit > 0 ? to : from);
  profiles_->eval(from, to, (t_hit > 0 ? h : -h) / eps, edge);
  for (int i = 0; i < m_; ++i) out[i] = edge[i] * (2 - r) + (r - 1) * well[i];
  return TestRegion::Blend;
}

TestRegion TestMap::eval(Vec2 x, std::span<double> out, bool* conflict) const {
  const double rho = geom_.rho;
  for (const auto& c : geom_.centers) {
    double r = norm(x - c);
    if (r >= rho) continue;
    if (r == 0.0) {
      std::fill(out.begin(), out.end(), 0.0);
      return TestRegion::Ball;
    }
    Vec2 on = c + (rho / r) * (x - c);
    outside_balls(on, out, nullptr);
    for (auto& v : out) v *= r / rho;
    return TestRegion::Ball;
  }
  return outside_balls(x, out, conflict);
}

TestMapField build_test_map(const Network& net, const ProfileSet& profiles, const Potential& p, const DomainGrid& g,
                            double epsilon, const TestMapParams& params) {
  TestMap map(net, profiles, p, epsilon, params);
  const int n = g.size(), m = p.dim();
  TestMapField f;
  f.geom = map.geometry();
  f.u.assign(static_cast<size_t>(n) * m, 0.0);
  f.region.assign(n, TestRegion::Exterior);
  int conflicts = 0;
  for (int c = 0; c < n; ++c) {
    bool conflict = false;
    f.region[c] = map.eval(g.center(c), {f.u.data() + static_cast<size_t>(c) * m, static_cast<size_t>(m)}, &conflict);
    if (conflict) ++conflicts;
  }
  if (conflicts > 0)
    throw Error(Errc::GeometryConflict, std::to_string(conflicts) + " cells lie in strips of two arcs outside the balls");
  f.energy = energy_of(g, f.u, p, epsilon);
  return f;
}

EnergyBreakdown breakdown(const DomainGrid& g, const std::vector<double>& u, const std::vector<TestRegion>& region,
                          const Potential& p, double epsilon) {
  auto ce = cell_energy(g, u, p, epsilon);
  EnergyBreakdown b;
  for (int c = 0; c < g.size(); ++c) {
    switch (region[c]) {
      case TestRegion::Strip: b.strip += ce[c]; break;
      case TestRegion::Blend: b.blend += ce[c]; break;
      case TestRegion::Ball: b.ball += ce[c]; break;
      case TestRegion::Exterior: b.exterior += ce[c]; break;
    }
    b.total += ce[c];
  }
  return b;
}

DomainGrid refined_grid(const DomainGrid& g, int factor) {
  if (factor < 1) throw Error(Errc::InvalidArgument, "refinement factor must be positive");
  if (g.domain.kind() == Domain::Kind::Disk) return build_disk_grid(g.domain.radius(), g.h / factor, g.domain.center());
  return build_rect_grid(g.domain.lo(), g.domain.hi(), g.h / factor);
}

void fit_excess(const std::vector<double>& eps, const std::vector<double>& e, double* C, double* q, double* r2) {
  std::vector<double> x, y;
  for (size_t i = 0; i < eps.size(); ++i) {
    x.push_back(std::log(std::abs(std::log(eps[i]))));
    y.push_back(std::log(e[i] / eps[i]));
  }
  auto f = linear_fit(x, y);
  *C = std::exp(f.intercept);
  *q = f.slope;
  *r2 = f.r2;
}

UpperBoundFit verify_upper_bound(const Network& net, const SurfaceTensionMatrix& sigma, const ProfileSet& profiles,
                                 const Potential& p, const std::vector<double>& eps_list,
                                 const std::vector<double>& hgrid, const TestMapParams& params, int refine,
                                 double negative_tol) {
  if (eps_list.size() < 3) throw Error(Errc::InsufficientData, "upper bound fit needs at least three epsilon values");
  if (hgrid.size() != eps_list.size()) throw Error(Errc::InvalidArgument, "one grid spacing per epsilon");
  UpperBoundFit out;
  const double F = energy_F(net, sigma);
  const Domain& D = net.domain;
  for (size_t i = 0; i < eps_list.size(); ++i) {
    double hg = hgrid[i] / refine;
    DomainGrid g = D.kind() == Domain::Kind::Disk ? build_disk_grid(D.radius(), hg, D.center())
                                                  : build_rect_grid(D.lo(), D.hi(), hg);
    auto tm = build_test_map(net, profiles, p, g, eps_list[i], params);
    UpperBoundPoint pt;
    pt.epsilon = eps_list[i];
    pt.hgrid = hg;
    pt.J = tm.energy;
    pt.F = F;
    pt.e = tm.energy - F;
    pt.parts = breakdown(g, tm.u, tm.region, p, eps_list[i]);
    pt.geom = tm.geom;
    if (pt.e < -negative_tol * std::max(F, 1e-300))
      throw Error(Errc::NegativeExcessBeyondTolerance, "J(u_test) - F is strongly negative");
    out.points.push_back(pt);
  }
  return summarize_upper_bound(std::move(out.points));
}

UpperBoundFit summarize_upper_bound(std::vector<UpperBoundPoint> points) {
  UpperBoundFit out;
  out.points = std::move(points);
  auto pts = out.points;
  std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.epsilon < b.epsilon; });
  out.positive = std::all_of(pts.begin(), pts.end(), [](const auto& q) { return q.e > 0; });
  out.monotone = true;
  for (size_t i = 1; i < pts.size(); ++i) out.monotone = out.monotone && pts[i].e > pts[i - 1].e;
  if (out.positive && pts.size() >= 2) {
    std::vector<double> e, x;
    for (const auto& q : pts) {
      x.push_back(q.epsilon);
      e.push_back(q.e);
    }
    fit_excess(x, e, &out.C, &out.q, &out.r2);
  }
  out.pass = out.positive && out.monotone && pts.size() >= 2 && out.q <= 2.5;
  return out;
}

std::string breakdown_csv(const std::vector<UpperBoundPoint>& pts) {
  std::ostringstream o;
  o << "epsilon,hgrid,h,rho,J_test,F,e,strip,blend,ball,exterior\n";
  char buf[320];
  for (const auto& q : pts) {
    std::snprintf(buf, sizeof buf, "%.9g,%.9g,%.9g,%.9g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g\n", q.epsilon,
                  q.hgrid, q.geom.h, q.geom.rho, q.J, q.F, q.e, q.parts.strip, q.parts.blend, q.parts.ball,
                  q.parts.exterior);
    o << buf;
  }
  return o.str();
}

}  // namespace phasenet
