#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "phasenet/builders.hpp"
#include "phasenet/errors.hpp"
#include "phasenet/optimizer.hpp"
#include "phasenet/testmap.hpp"

using namespace phasenet;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

struct Setup {
  Potential p;
  SigmaAssembly sa;
  Network net;
  double F;
};

const Setup& setup() {
  static Setup s = [] {
    Setup r;
    std::vector<WellPoint> w;
    for (double d : {90.0, 210.0, 330.0}) w.push_back({std::cos(d * M_PI / 180), std::sin(d * M_PI / 180)});
    r.p = make_product_potential(w, 0.5);
    r.sa = assemble_sigma(r.p);
    Domain D = Domain::disk({0, 0}, 1);
    r.net = local_minimize(star_network(D, regular_angles(3, M_PI / 6), {0.1, 0}), r.sa.sigma).net;
    r.F = energy_F(r.net, r.sa.sigma);
    return r;
  }();
  return s;
}

}  // namespace

TEST_CASE("geometry constants") {
  const auto& s = setup();
  const double eps = 0.02;
  TestMap tm(s.net, s.sa.profiles, s.p, eps);
  const auto& g = tm.geometry();
  double c0 = s.sa.profiles.min_tail_rate();
  CHECK_THAT(g.kappa0, WithinRel(2 / c0, 1e-12));
  CHECK_THAT(g.h, WithinRel(2 / c0 * eps * std::abs(std::log(eps)), 1e-12));
  CHECK_THAT(g.alpha0, WithinAbs(2 * M_PI / 3, 1e-9));
  CHECK_THAT(g.rho, WithinRel(4 * g.h / std::sin(M_PI / 3), 1e-9));
  CHECK(g.centers.size() == 4);
  CHECK(g.invariants_ok);
}

TEST_CASE("values in each region") {
  const auto& s = setup();
  const double eps = 0.02;
  TestMap tm(s.net, s.sa.profiles, s.p, eps);
  double out[2];
  // far from the network: the face well
  Vec2 far{0.0, 0.7};
  CHECK(tm.eval(far, out) == TestRegion::Exterior);
  auto w = s.p.well(face_label_at(s.net, far));
  CHECK_THAT(out[0], WithinAbs(w[0], 1e-15));
  CHECK_THAT(out[1], WithinAbs(w[1], 1e-15));
  // on an arc midway: the profile at t = 0
  const auto& a = s.net.arcs[0];
  Vec2 mid = 0.5 * (s.net.nodes[a.nodes[0]].pos + s.net.nodes[a.nodes[1]].pos);
  CHECK(tm.eval(mid, out) == TestRegion::Strip);
  double ref[2];
  s.sa.profiles.eval(a.phases[1], a.phases[0], 0.0, ref);
  CHECK_THAT(out[0], WithinAbs(ref[0], 1e-12));
  CHECK_THAT(out[1], WithinAbs(ref[1], 1e-12));
  // centre of a ball: zero
  CHECK(tm.eval(tm.geometry().centers[0], out) == TestRegion::Ball);
  CHECK(out[0] == 0.0);
  CHECK(out[1] == 0.0);
}

TEST_CASE("geometry conflict at large eps") {
  const auto& s = setup();
  CHECK_THROWS_MATCHES(TestMap(s.net, s.sa.profiles, s.p, 0.2), Error,
                       Catch::Matchers::Predicate<Error>([](const Error& e) {
                         return e.code() == Errc::GeometryConflict;
                       }));
  TestMapParams loose;
  loose.enforce = false;
  TestMap tm(s.net, s.sa.profiles, s.p, 0.2, loose);
  CHECK_FALSE(tm.geometry().invariants_ok);
}

TEST_CASE("upper bound excess on the three-phase disk") {
  const auto& s = setup();
  std::vector<double> eps{0.04, 0.03, 0.02}, hg;
  for (double e : eps) hg.push_back(e / 2.56);
  auto fit = verify_upper_bound(s.net, s.sa.sigma, s.sa.profiles, s.p, eps, hg, {}, 1);
  CHECK(fit.positive);
  CHECK(fit.monotone);
  for (const auto& pt : fit.points) {
    CHECK_THAT(pt.parts.total, WithinRel(pt.J, 1e-12));
    CHECK_THAT(pt.parts.strip + pt.parts.blend + pt.parts.ball + pt.parts.exterior, WithinRel(pt.J, 1e-12));
  }
  auto csv = breakdown_csv(fit.points);
  CHECK(csv.rfind("epsilon,hgrid,h,rho,J_test,F,e,strip,blend,ball,exterior\n", 0) == 0);
  CHECK_THROWS_AS(verify_upper_bound(s.net, s.sa.sigma, s.sa.profiles, s.p, {0.04, 0.02}, {0.01, 0.01}), Error);
}

TEST_CASE("excess fit recovers exact data") {
  std::vector<double> eps{0.04, 0.02, 0.01}, e;
  for (double x : eps) e.push_back(1.7 * x * std::pow(std::abs(std::log(x)), 2.0));
  double C, q, r2;
  fit_excess(eps, e, &C, &q, &r2);
  CHECK_THAT(q, WithinAbs(2.0, 1e-10));
  CHECK_THAT(C, WithinRel(1.7, 1e-10));
}

TEST_CASE("refined grid") {
  auto g = build_disk_grid(1.0, 1.0 / 32);
  auto r = refined_grid(g, 2);
  CHECK_THAT(r.h, WithinRel(1.0 / 64, 1e-15));
  CHECK_THAT(static_cast<double>(r.size()) / g.size(), WithinRel(4.0, 0.05));
  CHECK_THROWS_AS(refined_grid(g, 0), Error);
}
