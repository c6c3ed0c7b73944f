#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "phasenet/builders.hpp"
#include "phasenet/network.hpp"
#include "phasenet/optimizer.hpp"

using namespace phasenet;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const Domain D = Domain::disk({0, 0}, 1.0);

// Shortest network joining four points with two Steiner points, over both
// pairings, by shrinking-step pattern search (the length is convex in the
// two Steiner points).
double steiner4_oracle(const std::vector<Vec2>& q) {
  double best = INFINITY;
  for (int pairing = 0; pairing < 2; ++pairing) {
    Vec2 a = q[0], b = pairing ? q[3] : q[1], c = pairing ? q[1] : q[2], d = pairing ? q[2] : q[3];
    auto len = [&](Vec2 s, Vec2 t) { return norm(a - s) + norm(b - s) + norm(s - t) + norm(c - t) + norm(d - t); };
    Vec2 s = 0.5 * (a + b), t = 0.5 * (c + d);
    double L = len(s, t);
    for (double step = 0.25; step > 1e-12;) {
      bool moved = false;
      for (int k = 0; k < 8; ++k) {
        Vec2 dv = polar(step, k * M_PI / 4);
        for (int which = 0; which < 2; ++which) {
          Vec2 s2 = which ? s : s + dv, t2 = which ? t + dv : t;
          double L2 = len(s2, t2);
          if (L2 < L) {
            L = L2;
            s = s2;
            t = t2;
            moved = true;
          }
        }
      }
      if (!moved) step *= 0.5;
    }
    best = std::min(best, L);
  }
  return best;
}

}  // namespace

TEST_CASE("three ends, equal sigma: Fermat point at the centre") {
  auto S = equal_sigma(3, 1.0);
  auto res = local_minimize(star_network(D, regular_angles(3), {0.3, -0.2}), S);
  CHECK(res.converged);
  CHECK_THAT(res.F_value, WithinAbs(3.0, 1e-6));
  CHECK(norm(res.net.nodes[3].pos) < 1e-6);
  auto jr = junction_residuals(res.net, S);
  REQUIRE(jr.size() == 1);
  for (double a : jr[0].angles) CHECK_THAT(a, WithinAbs(2 * M_PI / 3, 1e-4));
}

TEST_CASE("four ends on a square") {
  auto S = equal_sigma(4, 1.0);
  auto ang = regular_angles(4, M_PI / 4);
  auto res = local_minimize(n4_steiner_init(D, ang), S);
  std::vector<Vec2> q;
  for (double t : ang) q.push_back(disk_point(D, t));
  double oracle = steiner4_oracle(q);
  CHECK_THAT(oracle, WithinAbs(std::sqrt(2.0) * (1 + std::sqrt(3.0)), 1e-6));
  CHECK_THAT(res.F_value, WithinAbs(oracle, 1e-6));
  for (const auto& j : junction_residuals(res.net, S))
    for (double a : j.angles) CHECK_THAT(a, WithinAbs(2 * M_PI / 3, 1e-4));
}

TEST_CASE("unequal sigma satisfies the sine law") {
  SurfaceTensionMatrix S(3);
  S.set(0, 1, 1.0);
  S.set(0, 2, 1.2);
  S.set(1, 2, 1.4);
  auto res = local_minimize(star_network(D, regular_angles(3), {0.0, 0.0}), S);
  CHECK(res.converged);
  auto jr = junction_residuals(res.net, S);
  REQUIRE(jr.size() == 1);
  CHECK(jr[0].residual < 1e-8);
  CHECK(jr[0].sine_law_spread < 1e-6);
}

TEST_CASE("reduced model gradient matches finite differences") {
  auto S = equal_sigma(4, 1.0);
  auto net = n4_steiner_init(D, regular_angles(4, M_PI / 4));
  auto rm = reduced_model(net, S);
  REQUIRE(rm.dim() == 4);
  const double h = 1e-6;
  for (int k = 0; k < rm.dim(); ++k) {
    auto shift = [&](double s) {
      Network n = net;
      for (int v : rm.clusters[k / 2]) (k % 2 ? n.nodes[v].pos.y : n.nodes[v].pos.x) += s;
      n.straighten();
      return energy_F(n, S);
    };
    double fd = (shift(h) - shift(-h)) / (2 * h);
    CHECK_THAT(rm.grad[k], WithinAbs(fd, 1e-6));
  }
}

TEST_CASE("nondegeneracy probe") {
  auto S = equal_sigma(3, 1.0);
  auto net = local_minimize(star_network(D, regular_angles(3), {0.1, 0}), S).net;
  auto cert = nondegeneracy_probe(net, S, {1e-3, 1e-2, 5e-2});
  CHECK(cert.pass);
  CHECK(cert.c0 > 0);
  CHECK(cert.flat_directions == 0);
  // perturbing away from the minimizer raises F
  auto moved = star_network(D, regular_angles(3), {0.05, 0.02});
  CHECK(energy_F(moved, S) > energy_F(net, S));
}

TEST_CASE("pinned and sliding ends") {
  auto S = equal_sigma(3, 1.0);
  auto init = star_network(D, {0.0, 2.0, 4.0}, {0.1, 0.1});
  auto pinned = local_minimize(init, S);
  for (int e : {0, 1, 2}) CHECK(norm(pinned.net.nodes[e].pos - init.nodes[e].pos) < 1e-12);
  OptimizeOptions o;
  o.sliding = {0};
  auto slid = local_minimize(init, S, o);
  CHECK(slid.F_value <= pinned.F_value + 1e-12);
  CHECK(std::abs(D.boundary_distance(slid.net.nodes[0].pos)) < 1e-9);
}
