#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "phasenet/connections.hpp"
#include "phasenet/errors.hpp"

using namespace phasenet;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// Composite Simpson rule for int_{-1}^{1} sqrt(2 W(u)) du of the double well.
double double_well_sigma_oracle() {
  const int n = 2000;
  const double a = -1, b = 1, h = (b - a) / n;
  auto f = [](double u) { return std::sqrt(2 * 0.25 * (1 - u * u) * (1 - u * u)); };
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4 : 2) * f(a + i * h);
  return s * h / 3;
}

std::vector<WellPoint> three_wells() {
  std::vector<WellPoint> w;
  for (double d : {90.0, 210.0, 330.0}) w.push_back({std::cos(d * M_PI / 180), std::sin(d * M_PI / 180)});
  return w;
}

}  // namespace

TEST_CASE("double well surface tension") {
  auto p = make_double_well();
  auto prof = solve_connection(p, 0, 1);
  double oracle = double_well_sigma_oracle();
  CHECK_THAT(oracle, WithinAbs(2 * std::sqrt(2.0) / 3, 1e-9));
  CHECK_THAT(prof.energy, WithinAbs(oracle, 1e-3));
  // equipartition: kinetic and potential parts agree
  CHECK_THAT(prof.kinetic, WithinRel(prof.potential, 1e-2));
  // linearization at the wells: rate sqrt(W''(+-1)) = sqrt(2)
  CHECK_THAT(prof.tail_rate, WithinRel(std::sqrt(2.0), 0.05));
}

TEST_CASE("profile matches the tanh heteroclinic") {
  auto p = make_double_well();
  auto prof = solve_connection(p, 0, 1);
  double out[1];
  for (double t : {-3.0, -1.0, 0.0, 0.5, 2.0}) {
    prof.eval(t, out);
    CHECK_THAT(out[0], WithinAbs(std::tanh(t / std::sqrt(2.0)), 2e-3));
  }
}

TEST_CASE("doubling the window leaves the energy unchanged") {
  auto p = make_double_well();
  ConnectionOptions a, b;
  b.T = 40;
  b.n_pts = 8001;
  double e1 = solve_connection(p, 0, 1, a).energy, e2 = solve_connection(p, 0, 1, b).energy;
  CHECK(std::abs(e1 - e2) < 1e-6);
}

TEST_CASE("three-well sigma matrix") {
  auto p = make_product_potential(three_wells(), 0.5);
  auto sa = assemble_sigma(p);
  REQUIRE(sa.sigma.n() == 3);
  double s01 = sa.sigma(0, 1);
  // Rotational symmetry of the wells and of W.
  CHECK_THAT(sa.sigma(0, 2), WithinRel(s01, 1e-6));
  CHECK_THAT(sa.sigma(1, 2), WithinRel(s01, 1e-6));
  CHECK(sa.sigma(1, 0) == s01);
  // Straight-line path between the wells bounds sigma from above
  // (adaptive quadrature of sqrt(2W) along the chord: 1.3409197).
  CHECK(s01 < 1.3409197 + 1e-6);
  CHECK(s01 > 0);
  CHECK(sa.sigma.triangle_violations().empty());
  CHECK(sa.profiles.has(0, 1));
  CHECK(sa.profiles.has(1, 0));
  // reversed profile runs the other way
  double fwd[2], rev[2];
  sa.profiles.eval(0, 1, 0.7, fwd);
  sa.profiles.eval(1, 0, -0.7, rev);
  CHECK_THAT(fwd[0], WithinAbs(rev[0], 1e-9));
  CHECK_THAT(fwd[1], WithinAbs(rev[1], 1e-9));
}

TEST_CASE("discrete action") {
  auto p = make_double_well();
  std::vector<double> flat(11, 1.0);
  CHECK(discrete_action(p, flat, 1, 0.1) == 0.0);
  std::vector<double> ramp{0.0, 0.1, 0.2};
  double K, V;
  double A = discrete_action(p, ramp, 1, 0.5, &K, &V);
  // two intervals of slope 0.2: kinetic 2 * 0.5 * 0.04 / 2
  CHECK_THAT(K, WithinAbs(0.02, 1e-15));
  CHECK_THAT(A, WithinAbs(K + V, 1e-15));
}

TEST_CASE("manual sigma") {
  auto m = set_sigma_manual(3, {{0, 1, 1}, {1, 0, 3}, {1, 3, 0}});
  CHECK_FALSE(m.warnings.empty());
  auto ok = set_sigma_manual(3, {{0, 1, 1}, {1, 0, 1}, {1, 1, 0}});
  CHECK(ok.warnings.empty());
  CHECK_THROWS_AS(set_sigma_manual(2, {{0, -1}, {-1, 0}}), Error);
  CHECK_THROWS_AS(set_sigma_manual(2, {{0, 1}, {2, 0}}), Error);
  auto e = equal_sigma(4, 2.5);
  CHECK(e(0, 3) == 2.5);
  CHECK(e(2, 2) == 0.0);
  CHECK_THROWS_AS(solve_connection(make_double_well(), 0, 0), Error);
}
