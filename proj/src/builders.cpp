#include "phasenet/builders.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "phasenet/errors.hpp"

namespace phasenet {

namespace {

double wrap_angle(double th) {
  th = std::fmod(th, 2 * M_PI);
  return th < 0 ? th + 2 * M_PI : th;
}

std::vector<double> sorted_angles(std::vector<double> a) {
  for (auto& t : a) t = wrap_angle(t);
  std::sort(a.begin(), a.end());
  return a;
}

Vec2 ray(double deg) { return polar(1.0, deg * M_PI / 180.0); }

}  // namespace

Vec2 disk_point(const Domain& D, double theta) { return D.center() + polar(D.radius(), theta); }

std::vector<double> regular_angles(int N, double offset) {
  std::vector<double> a(N);
  for (int k = 0; k < N; ++k) a[k] = offset + 2 * M_PI * k / N;
  return a;
}

void assign_boundary_phases(Network& net) {
  auto ends = net.ends_ccw();
  int n = static_cast<int>(net.nodes.size());
  std::vector<std::vector<int>> adj(n);
  for (int k = 0; k < static_cast<int>(net.arcs.size()); ++k) {
    adj[net.arcs[k].nodes[0]].push_back(k);
    adj[net.arcs[k].nodes[1]].push_back(k);
    net.arcs[k].phases = {-1, -1};
  }
  int E = static_cast<int>(ends.size());
  for (int k = 0; k < E; ++k) {
    int src = ends[k], dst = ends[(k + 1) % E];
    std::vector<int> via(n, -2);
    via[src] = -1;
    std::queue<int> q;
    q.push(src);
    while (!q.empty()) {
      int v = q.front();
      q.pop();
      for (int a : adj[v]) {
        int w = net.arcs[a].nodes[0] == v ? net.arcs[a].nodes[1] : net.arcs[a].nodes[0];
        if (via[w] != -2) continue;
        via[w] = a;
        q.push(w);
      }
    }
    if (via[dst] == -2) throw Error(Errc::InvalidArgument, "network is not connected");
    for (int v = dst; v != src;) {
      int a = via[v];
      auto& arc = net.arcs[a];
      int u = arc.nodes[0] == v ? arc.nodes[1] : arc.nodes[0];
      // Traversed u -> v: phase k on the right.
      if (arc.nodes[0] == u) arc.phases[1] = k;
      else arc.phases[0] = k;
      v = u;
    }
  }
  for (const auto& a : net.arcs)
    if (a.phases[0] < 0 || a.phases[1] < 0)
      throw Error(Errc::InvalidArgument, "boundary phases do not determine every arc (network is not a tree?)");
  net.N = E;
  net.Ntilde = E;
}

Network tree_network(const Domain& D, const std::vector<Vec2>& ends, const std::vector<Vec2>& branches,
                     const std::vector<std::array<int, 2>>& edges) {
  Network net;
  net.domain = D;
  for (auto p : ends) net.add_node(D.project_to_boundary(p), NodeKind::End);
  for (auto p : branches) net.add_node(p, NodeKind::Branch);
  for (auto e : edges) net.add_arc(e[0], e[1], -1, -1);
  assign_boundary_phases(net);
  return net;
}

Network star_network(const Domain& D, const std::vector<double>& end_angles, Vec2 center) {
  std::vector<Vec2> ends;
  for (double t : end_angles) ends.push_back(disk_point(D, t));
  std::vector<std::array<int, 2>> edges;
  int E = static_cast<int>(ends.size());
  for (int k = 0; k < E; ++k) edges.push_back({k, E});
  return tree_network(D, ends, {center}, edges);
}

Network polygon_network(const Domain& D, const std::vector<double>& end_angles, int removed) {
  auto ang = sorted_angles(end_angles);
  int N = static_cast<int>(ang.size());
  if (N < 2) throw Error(Errc::InvalidArgument, "polygon needs at least two vertices");
  removed = ((removed % N) + N) % N;
  std::vector<Vec2> ends;
  for (double t : ang) ends.push_back(disk_point(D, t));
  Network net;
  net.domain = D;
  for (auto p : ends) net.add_node(p, NodeKind::End);
  // Vertex k is represented by node at[k]: its end node when it bounds the
  // removed side, otherwise a coincident branch node.
  std::vector<int> at(N);
  for (int k = 0; k < N; ++k) {
    if (k == removed || k == (removed + 1) % N) {
      at[k] = k;
    } else {
      at[k] = net.add_node(ends[k], NodeKind::Branch);
      net.add_arc(k, at[k], -1, -1);
    }
  }
  for (int k = 0; k < N; ++k)
    if (k != removed) net.add_arc(at[k], at[(k + 1) % N], -1, -1);
  assign_boundary_phases(net);
  return net;
}

Network interior_polygon_network(const Domain& D, std::vector<double> end_angles, double ell,
                                 std::vector<int> boundary_labels, int interior) {
  auto ang = sorted_angles(end_angles);
  int N = static_cast<int>(ang.size());
  if (boundary_labels.empty())
    for (int k = 0; k < N; ++k) boundary_labels.push_back(k);
  if (interior < 0) interior = N;
  Network net;
  net.domain = D;
  std::vector<int> q(N), p(N);
  for (int k = 0; k < N; ++k) q[k] = net.add_node(disk_point(D, ang[k]), NodeKind::End);
  for (int k = 0; k < N; ++k) p[k] = net.add_node(D.center() + polar(ell, ang[k]), NodeKind::Branch);
  for (int k = 0; k < N; ++k) {
    int before = boundary_labels[(k + N - 1) % N], after = boundary_labels[k];
    net.add_arc(q[k], p[k], before, after);
  }
  for (int k = 0; k < N; ++k) net.add_arc(p[k], p[(k + 1) % N], interior, boundary_labels[k]);
  net.N = N + 1;
  net.Ntilde = N;
  return net;
}

Network n4_steiner_init(const Domain& D, const std::vector<double>& end_angles) {
  auto ang = sorted_angles(end_angles);
  if (ang.size() != 4) throw Error(Errc::InvalidArgument, "four end angles required");
  std::vector<Vec2> ends;
  for (double t : ang) ends.push_back(disk_point(D, t));
  Vec2 c = D.center();
  Vec2 b1 = c + 0.45 * ((ends[0] + ends[1]) / 2 - c);
  Vec2 b2 = c + 0.45 * ((ends[2] + ends[3]) / 2 - c);
  return tree_network(D, ends, {b1, b2}, {{0, 4}, {1, 4}, {2, 5}, {3, 5}, {4, 5}});
}

Network n5_steiner_init(double R) {
  Domain D = Domain::disk({0, 0}, R);
  std::vector<Vec2> ends = {R * ray(18), R * ray(90), R * ray(162), R * ray(234), R * ray(306)};
  std::vector<Vec2> br = {R * Vec2{0, 0.438666}, R * Vec2{0.5878, 0.0993}, R * Vec2{-0.5878, 0.0993}};
  return tree_network(D, ends, br, {{1, 5}, {5, 6}, {5, 7}, {6, 0}, {6, 4}, {7, 2}, {7, 3}});
}

Network n6_g1(double R) {
  Domain D = Domain::disk({0, 0}, R);
  std::vector<Vec2> ends;
  for (int k = 0; k < 6; ++k) ends.push_back(R * ray(30 + 60 * k));  // 30, 90, 150, 210, 270, 330
  std::vector<Vec2> br = {R * Vec2{0.28867, 0.5}, R * Vec2{0.28867, -0.5}, R * Vec2{-0.57735, 0}, {0, 0}};
  return tree_network(D, ends, br, {{6, 0}, {6, 1}, {7, 4}, {7, 5}, {8, 2}, {8, 3}, {6, 9}, {7, 9}, {8, 9}});
}

Network n6_g2(double R) {
  Domain D = Domain::disk({0, 0}, R);
  std::vector<Vec2> ends;
  for (int k = 0; k < 6; ++k) ends.push_back(R * ray(30 + 60 * k));
  Vec2 b1{0.247436, 0.285714}, b3{0.6185894, 0.214286};
  std::vector<Vec2> br = {R * b1, R * (-b1), R * b3, R * (-b3)};
  // b1 = 6, b2 = 7, b3 = 8, b4 = 9
  return tree_network(D, ends, br, {{6, 1}, {7, 4}, {6, 7}, {6, 8}, {7, 9}, {8, 0}, {8, 5}, {9, 3}, {9, 2}});
}

SurfaceTensionMatrix n4_sigma(double sigma, double sigma0) {
  SurfaceTensionMatrix s(4);
  for (int i = 1; i < 4; ++i) {
    s.set(0, i, sigma0);
    for (int j = i + 1; j < 4; ++j) s.set(i, j, sigma);
  }
  return s;
}

Network n4_family(double R, double ell) {
  Domain D = Domain::disk({0, 0}, R);
  return interior_polygon_network(D, regular_angles(3), ell, {1, 2, 3}, 0);
}

// ---- seven wells --------------------------------------------------------

namespace {

constexpr int W0 = 0, Wa = 1, Wb = 2, Wc = 3, Wa_ = 4, Wb_ = 5, Wc_ = 6;

int rot_label(int l, int k) {
  static const int r[7] = {0, 2, 3, 1, 5, 6, 4};
  for (int i = 0; i < ((k % 3) + 3) % 3; ++i) l = r[l];
  return l;
}

Vec2 rot(Vec2 v, int k) { return rotate(v, 2 * M_PI * k / 3); }

}  // namespace

SurfaceTensionMatrix N7Sigma::matrix() const {
  SurfaceTensionMatrix s(7);
  int outer[3] = {Wa, Wb, Wc}, inner[3] = {Wa_, Wb_, Wc_};
  for (int i = 0; i < 3; ++i) {
    s.set(W0, outer[i], sigma00);
    s.set(W0, inner[i], tau0);
    s.set(outer[i], inner[i], sigma_prime);
    for (int j = 0; j < 3; ++j) {
      if (j > i) {
        s.set(outer[i], outer[j], sigma);
        s.set(inner[i], inner[j], tau);
      }
      if (j != i) s.set(outer[i], inner[j], sigma0);
    }
  }
  return s;
}

N7Sigma n7_equality_sigma(double psi) {
  N7Sigma s;
  s.sigma0 = 1.0;
  s.sigma = 2 * std::cos(psi);
  s.tau = 2 * std::sin(M_PI / 6 - psi);
  s.tau0 = 2 / std::sqrt(3.0) * std::sin(M_PI / 6 - psi);
  s.sigma00 = 2 / std::sqrt(3.0) * std::cos(psi);
  s.sigma_prime = 1.5;
  return s;
}

N7Sigma n7_strict_sigma(double psi, double margin) {
  N7Sigma s = n7_equality_sigma(psi);
  s.sigma += margin;
  s.sigma00 += margin;
  s.tau += margin;
  return s;
}

double n7_g(double psi) { return std::sqrt(3.0) / 2 * std::sin(psi) / std::cos(M_PI / 6 - psi); }

double n7_tip(double psi, double d) { return d * std::sin(psi) / std::cos(M_PI / 6 - psi); }

double n7_equal_F(double psi) { return 6 * std::cos(psi); }

Network n7_case1_explicit(double dp, double dtip, double dT, double R) {
  Network net;
  net.domain = Domain::disk({0, 0}, R);
  int q[3], p[3], tip[3], T[3];
  for (int k = 0; k < 3; ++k) q[k] = net.add_node(R * rot(ray(90), k), NodeKind::End);
  for (int k = 0; k < 3; ++k) p[k] = net.add_node(R * dp * rot(ray(90), k), NodeKind::Branch);
  for (int k = 0; k < 3; ++k) tip[k] = net.add_node(R * dtip * rot(ray(30), k), NodeKind::Branch);
  for (int k = 0; k < 3; ++k) T[k] = net.add_node(R * dT * rot(ray(30), k), NodeKind::Branch);
  for (int k = 0; k < 3; ++k) {
    auto L = [k](int l) { return rot_label(l, k); };
    int k1 = (k + 1) % 3;
    net.add_arc(q[k], p[k], L(Wa), L(Wb));
    net.add_arc(p[k], tip[k], L(Wa), L(Wc_));
    net.add_arc(p[k], tip[k1], L(Wc_), L(Wb));
    net.add_arc(tip[k], T[k], L(Wb_), L(Wc_));
    net.add_arc(T[k], T[k1], L(W0), L(Wc_));
  }
  net.N = 7;
  net.Ntilde = 3;
  return net;
}

Network n7_case1(double psi, double d, double ell, double R) {
  return n7_case1_explicit(d, n7_tip(psi, d), 2 * ell / std::sqrt(3.0), R);
}

Network n7_case2_explicit(double dp, Vec2 left, Vec2 right, double R) {
  Network net;
  net.domain = Domain::disk({0, 0}, R);
  int q[3], p[3], Lk[3], Rk[3];
  for (int k = 0; k < 3; ++k) q[k] = net.add_node(R * rot(ray(90), k), NodeKind::End);
  for (int k = 0; k < 3; ++k) p[k] = net.add_node(R * dp * rot(ray(90), k), NodeKind::Branch);
  for (int k = 0; k < 3; ++k) Lk[k] = net.add_node(R * rot(left, k), NodeKind::Branch);
  for (int k = 0; k < 3; ++k) Rk[k] = net.add_node(R * rot(right, k), NodeKind::Branch);
  for (int k = 0; k < 3; ++k) {
    auto L = [k](int l) { return rot_label(l, k); };
    net.add_arc(q[k], p[k], L(Wa), L(Wb));
    net.add_arc(p[k], Rk[k], L(Wa), L(Wc_));
    net.add_arc(p[k], Lk[k], L(Wc_), L(Wb));
    net.add_arc(Rk[k], Lk[k], L(W0), L(Wc_));
    net.add_arc(Rk[k], Lk[(k + 2) % 3], L(Wa), L(W0));
  }
  net.N = 7;
  net.Ntilde = 3;
  return net;
}

Network n7_case2(double psi, double d, double ell, double R) {
  double y = d - ell / std::tan(psi);
  return n7_case2_explicit(d, {-ell, y}, {ell, y}, R);
}

Network n7_G0(double, double R) { return n7_case1_explicit(0, 0, 0, R); }

Network n7_Gstar(double psi, double R) { return n7_case1_explicit(1, n7_tip(psi, 1), 0, R); }

Network n7_Gtri(double psi, double R) {
  double t = n7_tip(psi, 1);
  return n7_case1_explicit(1, t, t, R);
}

Network n7_type1(double psi, double h, double s, double R) {
  double t = n7_tip(psi, 1);
  return n7_case1_explicit(1 - h, t, t - s, R);
}

Network n7_type2(double psi, double h, double rho, double beta, double R) {
  double t = n7_tip(psi, 1);
  Vec2 u = ray(150);
  Vec2 tip = t * u;
  Vec2 axis = -u;            // towards the centre
  Vec2 nrm = -perp(u);       // towards the end point at 90 degrees
  Vec2 X = tip + rho * (std::cos(beta) * axis + std::sin(beta) * nrm);
  return n7_case2_explicit(1 - h, X, {-X.x, X.y}, R);
}

double n7_type2_rate(const N7Sigma& s, double psi, double beta) {
  return 6 * (s.sigma00 * std::sin(beta) - std::cos(beta - M_PI / 6) * s.tau0 -
              std::cos(2 * M_PI / 3 - psi - beta) * s.sigma0);
}

}  // namespace phasenet
