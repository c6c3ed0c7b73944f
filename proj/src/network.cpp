#include "phasenet/network.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "phasenet/errors.hpp"

namespace phasenet {

int Network::add_node(Vec2 p, NodeKind kind) {
  nodes.push_back({p, kind});
  return static_cast<int>(nodes.size()) - 1;
}

int Network::add_arc(int a, int b, int left, int right) {
  NetworkArc arc;
  arc.nodes = {a, b};
  arc.phases = {left, right};
  arc.points = {nodes[a].pos, nodes[b].pos};
  arc.degenerate = norm(nodes[a].pos - nodes[b].pos) <= 1e-12 * domain.scale();
  arcs.push_back(std::move(arc));
  return static_cast<int>(arcs.size()) - 1;
}

void Network::straighten(double tol) {
  for (auto& arc : arcs) {
    Vec2 a = nodes[arc.nodes[0]].pos, b = nodes[arc.nodes[1]].pos;
    arc.points = {a, b};
    arc.degenerate = norm(a - b) <= tol * domain.scale();
  }
}

int Network::branch_count() const {
  return static_cast<int>(std::count_if(nodes.begin(), nodes.end(),
                                        [](const NetworkNode& n) { return n.kind == NodeKind::Branch; }));
}

int Network::end_count() const { return static_cast<int>(nodes.size()) - branch_count(); }

std::vector<int> Network::degrees() const {
  std::vector<int> deg(nodes.size(), 0);
  for (const auto& a : arcs) {
    ++deg[a.nodes[0]];
    ++deg[a.nodes[1]];
  }
  return deg;
}

std::vector<int> Network::ends_ccw() const {
  std::vector<int> ends;
  for (int i = 0; i < static_cast<int>(nodes.size()); ++i)
    if (nodes[i].kind == NodeKind::End) ends.push_back(i);
  std::sort(ends.begin(), ends.end(),
            [&](int a, int b) { return domain.param(nodes[a].pos) < domain.param(nodes[b].pos); });
  return ends;
}

int Network::incident_arc(int e) const {
  for (int k = 0; k < static_cast<int>(arcs.size()); ++k)
    if (arcs[k].nodes[0] == e || arcs[k].nodes[1] == e) return k;
  return -1;
}

int Network::boundary_phase_after(int e) const {
  int k = incident_arc(e);
  if (k < 0) return -1;
  const auto& a = arcs[k];
  // Leaving e into the domain, the counterclockwise boundary side is on the right.
  return a.nodes[0] == e ? a.phases[1] : a.phases[0];
}

double energy_F(const Network& net, const SurfaceTensionMatrix& sigma) {
  double F = 0.0;
  for (const auto& a : net.arcs) {
    int i = a.phases[0], j = a.phases[1];
    if (i < 0 || j < 0 || i >= sigma.n() || j >= sigma.n())
      throw Error(Errc::MissingSigma, "no surface tension for pair (" + std::to_string(i) + "," + std::to_string(j) + ")");
    if (a.degenerate) continue;
    F += sigma(i, j) * a.length();
  }
  return F;
}

namespace {

std::vector<double> cumulative_fractions(const std::vector<Vec2>& pts) {
  std::vector<double> c(pts.size(), 0.0);
  for (size_t i = 1; i < pts.size(); ++i) c[i] = c[i - 1] + norm(pts[i] - pts[i - 1]);
  double L = c.back();
  for (auto& v : c) v = L > 0 ? v / L : 0.0;
  return c;
}

double oriented_sup(const std::vector<Vec2>& a, const std::vector<Vec2>& b) {
  std::vector<double> s = cumulative_fractions(a);
  std::vector<double> sb = cumulative_fractions(b);
  s.insert(s.end(), sb.begin(), sb.end());
  s.push_back(0.0);
  s.push_back(1.0);
  double sup = 0.0;
  for (double t : s) sup = std::max(sup, norm(polyline_at(a, t) - polyline_at(b, t)));
  return sup;
}

std::vector<Vec2> arc_points(const NetworkArc& arc, const Network& net) {
  if (arc.degenerate || arc.points.size() < 2) return {net.nodes[arc.nodes[0]].pos, net.nodes[arc.nodes[0]].pos};
  return arc.points;
}

}  // namespace

double arc_distance(const std::vector<Vec2>& a, const std::vector<Vec2>& b) {
  std::vector<Vec2> rb(b.rbegin(), b.rend());
  return std::min(oriented_sup(a, b), oriented_sup(a, rb));
}

std::vector<int> arc_correspondence(const Network& a, const Network& b) {
  if (a.arcs.size() != b.arcs.size())
    throw Error(Errc::NoCorrespondence, "arc counts differ (" + std::to_string(a.arcs.size()) + " vs " +
                                            std::to_string(b.arcs.size()) + ")");
  auto key = [](const Network& n, const NetworkArc& arc) {
    int p = std::min(arc.phases[0], arc.phases[1]), q = std::max(arc.phases[0], arc.phases[1]);
    int k0 = static_cast<int>(n.nodes[arc.nodes[0]].kind), k1 = static_cast<int>(n.nodes[arc.nodes[1]].kind);
    return std::array<int, 4>{p, q, std::min(k0, k1), std::max(k0, k1)};
  };
  std::map<std::array<int, 4>, std::vector<int>> ga, gb;
  for (int i = 0; i < static_cast<int>(a.arcs.size()); ++i) ga[key(a, a.arcs[i])].push_back(i);
  for (int i = 0; i < static_cast<int>(b.arcs.size()); ++i) gb[key(b, b.arcs[i])].push_back(i);
  std::vector<int> corr(a.arcs.size(), -1);
  for (const auto& [k, ia] : ga) {
    auto it = gb.find(k);
    if (it == gb.end() || it->second.size() != ia.size())
      throw Error(Errc::NoCorrespondence, "no matching arcs for phase pair (" + std::to_string(k[0]) + "," +
                                              std::to_string(k[1]) + ")");
    const auto& ib = it->second;
    auto cost = [&](int i, int j) {
      Vec2 a0 = a.nodes[a.arcs[i].nodes[0]].pos, a1 = a.nodes[a.arcs[i].nodes[1]].pos;
      Vec2 b0 = b.nodes[b.arcs[j].nodes[0]].pos, b1 = b.nodes[b.arcs[j].nodes[1]].pos;
      return std::min(norm(a0 - b0) + norm(a1 - b1), norm(a0 - b1) + norm(a1 - b0));
    };
    size_t n = ia.size();
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    if (n <= 7) {
      std::vector<int> best = perm;
      double best_cost = std::numeric_limits<double>::infinity();
      do {
        double c = 0.0;
        for (size_t t = 0; t < n; ++t) c += cost(ia[t], ib[perm[t]]);
        if (c < best_cost - 1e-15) {
          best_cost = c;
          best = perm;
        }
      } while (std::next_permutation(perm.begin(), perm.end()));
      for (size_t t = 0; t < n; ++t) corr[ia[t]] = ib[best[t]];
    } else {
      std::vector<bool> used(n, false);
      for (size_t t = 0; t < n; ++t) {
        size_t arg = 0;
        double bc = std::numeric_limits<double>::infinity();
        for (size_t u = 0; u < n; ++u)
          if (!used[u] && cost(ia[t], ib[u]) < bc) {
            bc = cost(ia[t], ib[u]);
            arg = u;
          }
        used[arg] = true;
        corr[ia[t]] = ib[arg];
      }
    }
  }
  return corr;
}

double distance(const Network& a, const Network& b, const std::vector<int>& corr) {
  if (corr.size() != a.arcs.size() || a.arcs.size() != b.arcs.size())
    throw Error(Errc::NoCorrespondence, "correspondence size mismatch");
  std::vector<bool> seen(b.arcs.size(), false);
  double d = 0.0;
  for (size_t i = 0; i < corr.size(); ++i) {
    int j = corr[i];
    if (j < 0 || j >= static_cast<int>(b.arcs.size()) || seen[j])
      throw Error(Errc::NoCorrespondence, "correspondence is not a bijection");
    seen[j] = true;
    d += arc_distance(arc_points(a.arcs[i], a), arc_points(b.arcs[j], b));
  }
  return d;
}

double distance(const Network& a, const Network& b) { return distance(a, b, arc_correspondence(a, b)); }

namespace {

// Unit tangent of an arc leaving the given node.
Vec2 leaving_tangent(const NetworkArc& arc, int node) {
  const auto& p = arc.points;
  if (arc.nodes[0] == node) {
    for (size_t i = 1; i < p.size(); ++i)
      if (norm(p[i] - p[0]) > 0) return unit(p[i] - p[0]);
  } else {
    for (size_t i = p.size() - 1; i-- > 0;)
      if (norm(p[i] - p.back()) > 0) return unit(p[i] - p.back());
  }
  return {0, 0};
}

}  // namespace

JunctionResidual junction_angle_residual(const Network& net, const SurfaceTensionMatrix& sigma, int node) {
  std::vector<int> inc;
  for (int k = 0; k < static_cast<int>(net.arcs.size()); ++k)
    if (net.arcs[k].nodes[0] == node || net.arcs[k].nodes[1] == node) inc.push_back(k);
  if (inc.size() != 3) throw Error(Errc::DegenerateJunction, "node " + std::to_string(node) + " has degree " + std::to_string(inc.size()));
  for (int k : inc)
    if (net.arcs[k].degenerate || net.arcs[k].length() <= 0)
      throw Error(Errc::DegenerateJunction, "node " + std::to_string(node) + " has a degenerate incident arc");
  std::array<Vec2, 3> tau;
  std::array<double, 3> ang;
  std::array<double, 3> sig;
  for (int i = 0; i < 3; ++i) {
    tau[i] = leaving_tangent(net.arcs[inc[i]], node);
    ang[i] = std::atan2(tau[i].y, tau[i].x);
    sig[i] = sigma(net.arcs[inc[i]].phases[0], net.arcs[inc[i]].phases[1]);
  }
  std::array<int, 3> ord{0, 1, 2};
  std::sort(ord.begin(), ord.end(), [&](int a, int b) { return ang[a] < ang[b]; });
  JunctionResidual r;
  r.node = node;
  Vec2 sum{};
  for (int i = 0; i < 3; ++i) sum = sum + sig[i] * tau[i];
  r.residual = norm(sum);
  for (int i = 0; i < 3; ++i) {
    r.arcs[i] = inc[ord[i]];
    double a0 = ang[ord[i]], a1 = ang[ord[(i + 1) % 3]];
    double d = a1 - a0;
    if (i == 2) d += 2 * M_PI;
    r.angles[i] = d;
  }
  // Sector i lies between arcs i and i+1; the sector opposite arc i is i+1.
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (int i = 0; i < 3; ++i) {
    double s = std::sin(r.angles[(i + 1) % 3]);
    double ratio = s > 1e-15 ? sig[ord[i]] / s : std::numeric_limits<double>::infinity();
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  r.sine_law_spread = std::isfinite(hi) ? (hi - lo) / hi : std::numeric_limits<double>::infinity();
  return r;
}

std::vector<JunctionResidual> junction_residuals(const Network& net, const SurfaceTensionMatrix& sigma) {
  std::vector<JunctionResidual> out;
  auto deg = net.degrees();
  double tol = 1e-9 * net.domain.scale();
  for (int v = 0; v < static_cast<int>(net.nodes.size()); ++v) {
    if (net.nodes[v].kind != NodeKind::Branch || deg[v] != 3) continue;
    if (net.domain.boundary_distance(net.nodes[v].pos) <= tol) continue;
    bool ok = true;
    for (const auto& a : net.arcs)
      if ((a.nodes[0] == v || a.nodes[1] == v) && (a.degenerate || a.length() <= tol)) ok = false;
    if (ok) out.push_back(junction_angle_residual(net, sigma, v));
  }
  return out;
}

Network reparam_to_endpoints(const Network& net, const std::map<int, double>& targets, double max_shift) {
  Network out = net;
  const Domain& D = net.domain;
  for (const auto& [e, s_t] : targets) {
    if (e < 0 || e >= static_cast<int>(net.nodes.size()) || net.nodes[e].kind != NodeKind::End)
      throw Error(Errc::InvalidArgument, "node " + std::to_string(e) + " is not an end node");
    double s_q = D.param(net.nodes[e].pos);
    double gap = D.signed_gap(s_q, s_t);
    if (std::abs(gap) > max_shift * (1 + 1e-12) + 1e-15)
      throw Error(Errc::TargetTooFar, "end node " + std::to_string(e) + " target is " + std::to_string(std::abs(gap)) +
                                          " away along the boundary (limit " + std::to_string(max_shift) + ")");
    if (std::abs(gap) <= 1e-15 * D.perimeter()) continue;
    std::vector<Vec2> path;  // target -> q
    if (gap > 0) {
      path = D.boundary_path(s_q, s_q + gap);
      std::reverse(path.begin(), path.end());
    } else {
      path = D.boundary_path(s_q + gap, s_q);
    }
    int k = net.incident_arc(e);
    auto& arc = out.arcs[k];
    std::vector<Vec2> body = arc.degenerate ? std::vector<Vec2>{net.nodes[e].pos} : arc.points;
    if (arc.nodes[0] == e) {
      path.insert(path.end(), body.begin() + 1, body.end());
      arc.points = path;
    } else {
      std::reverse(path.begin(), path.end());
      body.insert(body.end(), path.begin() + 1, path.end());
      arc.points = body;
    }
    arc.degenerate = false;
    out.nodes[e].pos = D.point_at(s_t);
  }
  return out;
}

int face_label_at(const Network& net, Vec2 x) {
  double best = std::numeric_limits<double>::infinity();
  int best_arc = -1;
  size_t best_seg = 0;
  double best_t = 0.0;
  for (int k = 0; k < static_cast<int>(net.arcs.size()); ++k) {
    const auto& a = net.arcs[k];
    if (a.degenerate) continue;
    for (size_t i = 0; i + 1 < a.points.size(); ++i) {
      if (norm(a.points[i + 1] - a.points[i]) <= 0) continue;
      double t;
      double d = segment_distance(x, a.points[i], a.points[i + 1], &t);
      if (d < best) {
        best = d;
        best_arc = k;
        best_seg = i;
        best_t = t;
      }
    }
  }
  if (best_arc < 0) return net.background;
  const auto& a = net.arcs[best_arc];
  Vec2 p0 = a.points[best_seg], p1 = a.points[best_seg + 1];
  if (best_t > 1e-12 && best_t < 1 - 1e-12) return cross(p1 - p0, x - p0) >= 0 ? a.phases[0] : a.phases[1];
  Vec2 P = best_t <= 1e-12 ? p0 : p1;
  if (norm(x - P) == 0.0) return a.phases[0];
  // Angular sector rule at a polyline vertex shared by several segments.
  double tol = 1e-12 * net.domain.scale();
  std::vector<std::pair<double, int>> dirs;
  for (const auto& b : net.arcs) {
    if (b.degenerate) continue;
    for (size_t i = 0; i + 1 < b.points.size(); ++i) {
      Vec2 q0 = b.points[i], q1 = b.points[i + 1];
      if (norm(q1 - q0) <= 0) continue;
      if (norm(q0 - P) <= tol) dirs.push_back({std::atan2(q1.y - q0.y, q1.x - q0.x), b.phases[0]});
      if (norm(q1 - P) <= tol) dirs.push_back({std::atan2(q0.y - q1.y, q0.x - q1.x), b.phases[1]});
    }
  }
  double th = std::atan2(x.y - P.y, x.x - P.x);
  std::sort(dirs.begin(), dirs.end());
  int label = dirs.back().second;  // wraps around when th precedes every direction
  for (const auto& [ang, lab] : dirs)
    if (ang <= th) label = lab;
  return label;
}

double distance_to_network(const Network& net, Vec2 x) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& a : net.arcs) {
    if (a.degenerate) {
      best = std::min(best, norm(x - net.nodes[a.nodes[0]].pos));
      continue;
    }
    for (size_t i = 0; i + 1 < a.points.size(); ++i) best = std::min(best, segment_distance(x, a.points[i], a.points[i + 1]));
  }
  return best;
}

}  // namespace phasenet
