#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "phasenet/network.hpp"

namespace phasenet {

namespace {

struct HalfEdge {
  int from = -1, to = -1;  // clusters
  int label = -1;          // phase on the left
  std::vector<Vec2> pts;
  double angle = 0.0;
  int twin = -1;
  int boundary = 0;  // +1 boundary traversed ccw, -1 cw, 0 network arc
};

int find(std::vector<int>& p, int x) {
  while (p[x] != x) x = p[x] = p[p[x]];
  return x;
}

}  // namespace

FaceTrace trace_faces(const Network& net) {
  FaceTrace out;
  int n = static_cast<int>(net.nodes.size());
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  for (const auto& a : net.arcs)
    if (a.degenerate) parent[find(parent, a.nodes[0])] = find(parent, a.nodes[1]);
  std::vector<int> cluster(n, -1);
  int nc = 0;
  {
    std::vector<int> id(n, -1);
    for (int v = 0; v < n; ++v) {
      int r = find(parent, v);
      if (id[r] < 0) id[r] = nc++;
      cluster[v] = id[r];
    }
  }
  std::vector<HalfEdge> he;
  auto add_pair = [&](int c0, int c1, std::vector<Vec2> pts, int left, int right, int boundary = 0) {
    HalfEdge f, b;
    f.boundary = boundary;
    b.boundary = -boundary;
    f.from = c0;
    f.to = c1;
    f.label = left;
    f.pts = pts;
    std::reverse(pts.begin(), pts.end());
    b.from = c1;
    b.to = c0;
    b.label = right;
    b.pts = std::move(pts);
    int i = static_cast<int>(he.size());
    f.twin = i + 1;
    b.twin = i;
    he.push_back(std::move(f));
    he.push_back(std::move(b));
  };
  for (const auto& a : net.arcs)
    if (!a.degenerate) add_pair(cluster[a.nodes[0]], cluster[a.nodes[1]], a.points, a.phases[0], a.phases[1]);

  auto ends = net.ends_ccw();
  for (size_t k = 0; k < ends.size(); ++k) {
    int e0 = ends[k], e1 = ends[(k + 1) % ends.size()];
    double s0 = net.domain.param(net.nodes[e0].pos);
    double s1 = net.domain.param(net.nodes[e1].pos);
    std::vector<Vec2> path;
    if (ends.size() == 1) {
      path = net.domain.boundary_path(s0, s0 + net.domain.perimeter() * (1 - 1e-12), 8);
      path.back() = net.nodes[e0].pos;
    } else {
      path = net.domain.boundary_path(s0, s1);
    }
    int lab = net.boundary_phase_after(e0);
    int next_lab = -1;
    {
      int arc = net.incident_arc(e1);
      if (arc >= 0) next_lab = net.arcs[arc].nodes[0] == e1 ? net.arcs[arc].phases[0] : net.arcs[arc].phases[1];
    }
    if (lab != next_lab) {
      out.consistent = false;
      out.problems.push_back("boundary arc after end node " + std::to_string(e0) + " has phases " + std::to_string(lab) +
                             " and " + std::to_string(next_lab) + " at its two ends");
    }
    add_pair(cluster[e0], cluster[e1], std::move(path), lab, -2, 1);
  }
  // Boundary half-edges leave along the true tangent, so an arc whose
  // polyline hugs the boundary still sorts on the interior side.
  const double ds = 1e-9 * net.domain.perimeter();
  for (auto& h : he) {
    Vec2 d{0, 0};
    if (h.boundary != 0) {
      double s = net.domain.param(h.pts.front());
      d = net.domain.point_at(s + h.boundary * ds) - h.pts.front();
    }
    for (size_t i = 1; i < h.pts.size() && norm(d) == 0; ++i) d = h.pts[i] - h.pts[0];
    h.angle = std::atan2(d.y, d.x);
  }
  std::vector<std::vector<int>> out_edges(nc);
  for (int i = 0; i < static_cast<int>(he.size()); ++i) out_edges[he[i].from].push_back(i);
  std::vector<int> pos_in(he.size(), 0);
  for (auto& lst : out_edges) {
    // On a tie the ccw boundary edge comes first and the cw one last.
    std::sort(lst.begin(), lst.end(), [&](int a, int b) {
      if (he[a].angle != he[b].angle) return he[a].angle < he[b].angle;
      return -he[a].boundary < -he[b].boundary;
    });
    for (int t = 0; t < static_cast<int>(lst.size()); ++t) pos_in[lst[t]] = t;
  }
  // Face on the left: at the head, take the outgoing edge just clockwise of the twin.
  auto next = [&](int i) {
    int t = he[i].twin;
    const auto& lst = out_edges[he[t].from];
    int k = pos_in[t];
    return lst[(k + static_cast<int>(lst.size()) - 1) % lst.size()];
  };
  std::vector<bool> used(he.size(), false);
  for (int i = 0; i < static_cast<int>(he.size()); ++i) {
    if (used[i]) continue;
    Face f;
    f.label = he[i].label;
    std::set<int> labels;
    int j = i;
    int guard = 0;
    do {
      used[j] = true;
      labels.insert(he[j].label);
      f.boundary.insert(f.boundary.end(), he[j].pts.begin(), he[j].pts.end() - 1);
      j = next(j);
    } while (j != i && ++guard < static_cast<int>(he.size()) + 2);
    if (labels.size() != 1) {
      out.consistent = false;
      std::string s = "face with mixed labels {";
      for (int l : labels) s += std::to_string(l) + " ";
      out.problems.push_back(s + "}");
      f.label = *labels.rbegin();
    }
    f.area = f.boundary.size() >= 3 ? polygon_area(f.boundary) : 0.0;
    out.faces.push_back(std::move(f));
  }
  std::set<int> active;
  for (const auto& h : he) active.insert(h.from);
  out.vertices = static_cast<int>(active.size());
  out.edges = static_cast<int>(he.size()) / 2;
  if (!he.empty() && out.vertices - out.edges + static_cast<int>(out.faces.size()) != 2) {
    out.consistent = false;
    out.problems.push_back("Euler characteristic V - E + F = " +
                           std::to_string(out.vertices - out.edges + static_cast<int>(out.faces.size())) +
                           " (network is not a connected planar subdivision)");
  }
  return out;
}

NetworkDiagnostics validate(const Network& net, const ValidateOptions& opts) {
  NetworkDiagnostics d;
  auto fail = [&](std::string s) {
    d.ok = false;
    d.failures.push_back(std::move(s));
  };
  const Domain& D = net.domain;
  double tol = opts.boundary_tol * D.scale();
  double Kl = opts.length_bound > 0 ? opts.length_bound : 4.0 * D.perimeter();
  d.n_branch = net.branch_count();
  d.n_arcs = static_cast<int>(net.arcs.size());
  for (const auto& a : net.arcs) d.n_degenerate += a.degenerate;

  if (net.N >= 2) {
    int ns = 3 * (net.N - 1) - net.Ntilde, nb = 2 * (net.N - 1) - net.Ntilde;
    if (d.n_arcs != ns) fail("arc count " + std::to_string(d.n_arcs) + ", expected " + std::to_string(ns));
    if (d.n_branch != nb) fail("branch count " + std::to_string(d.n_branch) + ", expected " + std::to_string(nb));
    if (net.end_count() != net.Ntilde)
      fail("end count " + std::to_string(net.end_count()) + ", expected " + std::to_string(net.Ntilde));
  }
  auto deg = net.degrees();
  for (int v = 0; v < static_cast<int>(net.nodes.size()); ++v) {
    const auto& nd = net.nodes[v];
    if (nd.kind == NodeKind::Branch && deg[v] != 3)
      fail("branch node " + std::to_string(v) + " has degree " + std::to_string(deg[v]));
    if (nd.kind == NodeKind::End && deg[v] != 1)
      fail("end node " + std::to_string(v) + " has degree " + std::to_string(deg[v]));
    if (nd.kind == NodeKind::End && std::abs(D.boundary_distance(nd.pos)) > tol)
      fail("end node " + std::to_string(v) + " is off the boundary by " + std::to_string(D.boundary_distance(nd.pos)));
    if (nd.kind == NodeKind::Branch && D.boundary_distance(nd.pos) < -tol)
      fail("branch node " + std::to_string(v) + " lies outside the domain");
  }
  for (int k = 0; k < d.n_arcs; ++k) {
    const auto& a = net.arcs[k];
    std::string tag = "arc " + std::to_string(k);
    if (a.phases[0] == a.phases[1]) fail(tag + " separates a phase from itself");
    if (a.phases[0] < 0 || a.phases[1] < 0 || (net.N > 0 && (a.phases[0] >= net.N || a.phases[1] >= net.N)))
      fail(tag + " has a phase outside the well range");
    if (a.points.size() < 2) {
      fail(tag + " has fewer than two points");
      continue;
    }
    double L = polyline_length(a.points);
    if (norm(a.points.front() - net.nodes[a.nodes[0]].pos) > tol ||
        norm(a.points.back() - net.nodes[a.nodes[1]].pos) > tol)
      fail(tag + " polyline does not start and end at its nodes");
    if (a.degenerate && L > tol) fail(tag + " is flagged degenerate but has length " + std::to_string(L));
    if (!a.degenerate && L <= tol) fail(tag + " has zero length but is not flagged degenerate");
    if (L >= Kl) fail(tag + " length exceeds the bound");
    for (const auto& p : a.points)
      if (D.boundary_distance(p) < -tol) {
        fail(tag + " leaves the domain");
        break;
      }
  }
  // Crossings between segments of distinct arcs away from shared points.
  for (int i = 0; i < d.n_arcs; ++i)
    for (int j = i + 1; j < d.n_arcs; ++j) {
      const auto& A = net.arcs[i];
      const auto& B = net.arcs[j];
      if (A.degenerate || B.degenerate) continue;
      for (size_t s = 0; s + 1 < A.points.size(); ++s)
        for (size_t t = 0; t + 1 < B.points.size(); ++t) {
          Vec2 a0 = A.points[s], a1 = A.points[s + 1], b0 = B.points[t], b1 = B.points[t + 1];
          if (!segments_intersect(a0, a1, b0, b1)) continue;
          bool touch = norm(a0 - b0) <= tol || norm(a0 - b1) <= tol || norm(a1 - b0) <= tol || norm(a1 - b1) <= tol;
          if (!touch) {
            fail("arcs " + std::to_string(i) + " and " + std::to_string(j) + " cross");
          } else {
            // Shared vertex: overlap along a common direction is a tangency we cannot classify.
            Vec2 da = a1 - a0, db = b1 - b0;
            if (std::abs(cross(da, db)) <= 1e-12 * norm(da) * norm(db) && dot(da, db) != 0) {
              bool collinear_overlap = segment_distance(b0, a0, a1) <= tol && segment_distance(b1, a0, a1) <= tol;
              if (collinear_overlap || segment_distance(a0, b0, b1) <= tol && segment_distance(a1, b0, b1) <= tol)
                d.flags.push_back("arcs " + std::to_string(i) + " and " + std::to_string(j) + " overlap at a shared vertex");
            }
          }
        }
    }
  if (net.arcs.empty()) {
    if (net.N > 1) fail("network without arcs for " + std::to_string(net.N) + " wells");
    d.phase_area.assign(std::max(net.N, 1), 0.0);
    if (net.background >= 0 && net.background < static_cast<int>(d.phase_area.size()))
      d.phase_area[net.background] = D.kind() == Domain::Kind::Disk ? M_PI * D.radius() * D.radius()
                                                                    : (D.hi().x - D.lo().x) * (D.hi().y - D.lo().y);
    return d;
  }
  FaceTrace ft = trace_faces(net);
  for (auto& p : ft.problems) fail(p);
  d.faces = ft.faces;
  int N = std::max(net.N, 0);
  d.phase_area.assign(N, 0.0);
  std::vector<int> count(N, 0);
  for (const auto& f : ft.faces) {
    if (f.label == -2) continue;
    if (f.label < 0 || f.label >= N) {
      fail("face with invalid label " + std::to_string(f.label));
      continue;
    }
    ++count[f.label];
    d.phase_area[f.label] += f.area;
    if (f.area < -tol * D.scale()) fail("face of phase " + std::to_string(f.label) + " has negative orientation");
  }
  std::vector<bool> on_arc(N, false);
  for (const auto& a : net.arcs)
    for (int s : a.phases)
      if (s >= 0 && s < N) on_arc[s] = true;
  for (int a = 0; a < N; ++a) {
    if (count[a] > 1) fail("phase " + std::to_string(a) + " labels " + std::to_string(count[a]) + " faces");
    if (count[a] == 0) {
      if (on_arc[a]) d.flags.push_back("phase " + std::to_string(a) + " has a face of zero measure");
      else fail("phase " + std::to_string(a) + " labels no face");
    }
  }
  return d;
}

}  // namespace phasenet
