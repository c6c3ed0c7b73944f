#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "phasenet/builders.hpp"
#include "phasenet/errors.hpp"
#include "phasenet/network.hpp"
#include "phasenet/optimizer.hpp"

using namespace phasenet;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const Domain D = Domain::disk({0, 0}, 1.0);

Network centred_star() { return star_network(D, regular_angles(3), {0, 0}); }

// Inserts k evenly spaced points into every polyline segment.
Network resample(Network net, int k) {
  for (auto& a : net.arcs) {
    if (a.degenerate) continue;
    std::vector<Vec2> pts;
    for (size_t i = 0; i + 1 < a.points.size(); ++i)
      for (int j = 0; j <= k; ++j) pts.push_back(a.points[i] + (double(j) / (k + 1)) * (a.points[i + 1] - a.points[i]));
    pts.push_back(a.points.back());
    a.points = pts;
  }
  return net;
}

}  // namespace

TEST_CASE("star network counts and energy") {
  auto net = centred_star();
  auto d = validate(net);
  CHECK(d.ok);
  // n_b = 2(N-1) - Ntilde and n_s = 3(N-1) - Ntilde for N = Ntilde = 3
  CHECK(d.n_branch == 1);
  CHECK(d.n_arcs == 3);
  CHECK_THAT(energy_F(net, equal_sigma(3, 1.0)), WithinAbs(3.0, 1e-12));
  CHECK_THAT(energy_F(net, equal_sigma(3, 2.0)), WithinAbs(6.0, 1e-12));
  double area = 0;
  for (double a : d.phase_area) area += a;
  CHECK_THAT(area, WithinRel(M_PI, 1e-3));
  for (double a : d.phase_area) CHECK_THAT(a, WithinRel(M_PI / 3, 1e-3));
}

TEST_CASE("counts for N = 4 and N = 2") {
  auto n4 = n4_steiner_init(D, regular_angles(4, M_PI / 4));
  auto d4 = validate(n4);
  CHECK(d4.ok);
  CHECK(d4.n_branch == 2);
  CHECK(d4.n_arcs == 5);
  auto n2 = tree_network(D, {disk_point(D, 0), disk_point(D, M_PI)}, {}, {{0, 1}});
  auto d2 = validate(n2);
  CHECK(d2.ok);
  CHECK(d2.n_branch == 0);
  CHECK(d2.n_arcs == 1);
  CHECK_THAT(energy_F(n2, equal_sigma(2, 1.0)), WithinAbs(2.0, 1e-12));
}

TEST_CASE("F is invariant under reparameterization") {
  auto net = local_minimize(n4_steiner_init(D, regular_angles(4, M_PI / 4)), equal_sigma(4, 1.0)).net;
  auto S = equal_sigma(4, 1.0);
  double F = energy_F(net, S);
  for (int k : {1, 3, 10}) CHECK_THAT(energy_F(resample(net, k), S), WithinRel(F, 1e-12));
  CHECK(distance(net, resample(net, 3)) < 1e-12);
}

TEST_CASE("metric axioms on sampled networks") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> U(-0.3, 0.3);
  std::vector<Network> nets;
  for (int i = 0; i < 6; ++i) nets.push_back(star_network(D, regular_angles(3), {U(rng), U(rng)}));
  for (const auto& a : nets) {
    CHECK(distance(a, a) < 1e-14);
    for (const auto& b : nets) {
      double ab = distance(a, b);
      CHECK(ab >= 0);
      CHECK_THAT(ab, WithinAbs(distance(b, a), 1e-12));
      for (const auto& c : nets) CHECK(distance(a, c) <= ab + distance(b, c) + 1e-12);
    }
  }
  // moving the branch node by v moves each of the three star arcs by |v|
  auto a = star_network(D, regular_angles(3), {0, 0});
  auto b = star_network(D, regular_angles(3), {0.1, 0});
  CHECK_THAT(distance(a, b), WithinAbs(3 * 0.1, 1e-9));
}

TEST_CASE("junction residual at a symmetric star") {
  auto net = centred_star();
  auto jr = junction_angle_residual(net, equal_sigma(3, 1.0), 3);
  CHECK(jr.residual < 1e-12);
  for (double a : jr.angles) CHECK_THAT(a, WithinAbs(2 * M_PI / 3, 1e-12));
  auto all = junction_residuals(net, equal_sigma(3, 1.0));
  CHECK(all.size() == 1);
}

TEST_CASE("face labels and distance") {
  auto net = centred_star();
  // boundary arc after the end at 90 degrees carries phase 0
  CHECK(face_label_at(net, {-0.5, 0.3}) == net.boundary_phase_after(net.ends_ccw()[0]));
  CHECK_THAT(distance_to_network(net, {0, 0}), WithinAbs(0.0, 1e-15));
  CHECK_THAT(distance_to_network(net, {0, -0.5}), WithinAbs(0.5 * std::sin(M_PI / 3), 1e-12));
  auto ft = trace_faces(net);
  CHECK(ft.consistent);
}

TEST_CASE("json round trip") {
  auto net = local_minimize(n4_steiner_init(D, regular_angles(4, M_PI / 4)), equal_sigma(4, 1.0)).net;
  auto back = network_from_json(network_to_json(net));
  REQUIRE(back.nodes.size() == net.nodes.size());
  REQUIRE(back.arcs.size() == net.arcs.size());
  CHECK(distance(net, back) < 1e-12);
  CHECK(back.N == net.N);
  CHECK(network_to_svg(net).rfind("<svg", 0) == 0);
}

TEST_CASE("endpoint reparameterization") {
  auto net = centred_star();
  auto S = equal_sigma(3, 1.0);
  double F0 = energy_F(net, S);
  const double ell = 0.05;
  int e = net.ends_ccw()[0];
  double s = D.param(net.nodes[e].pos);
  auto moved = reparam_to_endpoints(net, {{e, s + ell}}, 0.1);
  auto vd = validate(moved);
  INFO((vd.failures.empty() ? "" : vd.failures.front()));
  CHECK(vd.ok);
  CHECK(energy_F(moved, S) <= F0 + ell + 1e-12);
  CHECK_THROWS_MATCHES(reparam_to_endpoints(net, {{e, s + 0.5}}, 0.1), Error,
                       Catch::Matchers::Predicate<Error>([](const Error& x) { return x.code() == Errc::TargetTooFar; }));
}
