#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "phasenet/builders.hpp"
#include "phasenet/errors.hpp"
#include "phasenet/verify.hpp"

using namespace phasenet;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const double kSigma = 2 * std::sqrt(2.0) / 3;

struct Strip {
  Potential p = make_double_well();
  DomainGrid g;
  Network net;
  std::vector<double> u;
  SurfaceTensionMatrix S = equal_sigma(2, kSigma);
};

// Vertical interface x = 0.5 in the unit square with the exact heteroclinic.
Strip strip(double eps, double h) {
  Strip s;
  Domain D = Domain::rect({0, 0}, {1, 1});
  s.g = build_rect_grid({0, 0}, {1, 1}, h);
  s.net = tree_network(D, {{0.5, 0.0}, {0.5, 1.0}}, {}, {{0, 1}});
  double sign = face_label_at(s.net, {0.25, 0.5}) == 0 ? 1.0 : -1.0;
  s.u.resize(s.g.size());
  for (int c = 0; c < s.g.size(); ++c)
    s.u[c] = sign * std::tanh((s.g.center(c).x - 0.5) / (std::sqrt(2.0) * eps));
  return s;
}

}  // namespace

TEST_CASE("fibers across the exact 1D profile") {
  const double eps = 0.02;
  auto s = strip(eps, 1.0 / 200);
  FiberOptions o;
  auto r = fiber_lower_bound(s.g, s.u, s.p, s.net, s.S, eps, o);
  REQUIRE(!r.fibers.empty());
  CHECK(r.fraction_phases_ok == 1.0);
  double delta = std::pow(eps, 1.0 / 6.0);
  for (const auto& f : r.fibers) {
    CHECK(f.J >= kSigma - delta * delta);
    CHECK_THAT(f.J, WithinRel(kSigma, 0.02));
  }
}

TEST_CASE("constant field fails the endpoint test") {
  const double eps = 0.02;
  auto s = strip(eps, 1.0 / 100);
  std::fill(s.u.begin(), s.u.end(), 1.0);
  auto r = fiber_lower_bound(s.g, s.u, s.p, s.net, s.S, eps);
  CHECK(r.fraction_phases_ok == 0.0);
  for (const auto& f : r.fibers) CHECK(f.J < 1e-12);
}

TEST_CASE("fiber energy is invariant under reversal") {
  auto p = make_double_well();
  std::vector<double> v;
  for (int i = 0; i < 101; ++i) v.push_back(std::tanh((i - 40) / 15.0));
  std::vector<double> rv(v.rbegin(), v.rend());
  CHECK_THAT(fiber_energy(p, v, 1, 0.4, 0.02), WithinRel(fiber_energy(p, rv, 1, 0.4, 0.02), 1e-14));
}

TEST_CASE("sandwich report") {
  SandwichBudget b{0.5, 0.0, 1e-6};
  const double eps = 0.01, budget = 0.5 * std::cbrt(eps) + 1e-6;
  CHECK_THAT(sandwich_budget(b, eps), WithinRel(budget, 1e-14));
  auto ok = sandwich_report(3.0, 3.0, 3.0, eps, b);
  CHECK(ok.pass());
  auto low = sandwich_report(3.0 - 2 * budget, 3.0, 3.0, eps, b);
  CHECK_FALSE(low.lower_ok);
  CHECK_THROWS_MATCHES(sandwich_report(3.0 - 2 * budget, 3.0, 3.0, eps, b, 0.0, true), Error,
                       Catch::Matchers::Predicate<Error>([](const Error& e) {
                         return e.code() == Errc::SandwichViolation;
                       }));
  // with a test map energy the upper check is J <= J_test
  CHECK(sandwich_report(3.5, 3.0, 3.0, eps, b, 3.6).upper_ok);
  CHECK_FALSE(sandwich_report(3.7, 3.0, 3.0, eps, b, 3.6).upper_ok);
  // monotone in the budget
  for (double J : {2.5, 2.9, 3.0, 3.2, 3.5})
    for (double C1 : {0.0, 0.1, 0.5, 1.0}) {
      bool small = sandwich_report(J, 3.0, 3.0, eps, {C1, 0.0, 0.0}).pass();
      bool large = sandwich_report(J, 3.0, 3.0, eps, {C1 + 0.5, 0.0, 0.0}).pass();
      CHECK((!small || large));
    }
}

TEST_CASE("decay rate of the 1D tail") {
  // tail rate sqrt(W''(+-1)) = sqrt(2)
  const double eps = 0.02;
  auto s = strip(eps, 1.0 / 200);
  auto f = decay_fit(s.g, s.u, s.p, s.net, eps);
  CHECK_THAT(f.k_eps, WithinRel(std::sqrt(2.0), 0.1));
  CHECK(f.phases_pass(0.9));
  for (const auto& ph : f.phases) {
    REQUIRE(ph.fitted);
    CHECK(ph.slope < 0);
    CHECK_THAT(ph.k_eps, WithinRel(std::sqrt(2.0), 0.1));
  }
  REQUIRE(f.sides.size() == 2);
  for (const auto& sd : f.sides) CHECK_THAT(sd.k_eps, WithinRel(std::sqrt(2.0), 0.1));
  // cells below the offset are excluded
  for (double d : f.dist) CHECK(d > f.offset);
  CHECK(decay_csv(f).rfind("dist,log_dev\n", 0) == 0);
}

TEST_CASE("constant field has no decay data") {
  const double eps = 0.02;
  auto s = strip(eps, 1.0 / 100);
  for (int c = 0; c < s.g.size(); ++c) s.u[c] = s.p.well(face_label_at(s.net, s.g.center(c)))[0];
  CHECK_THROWS_MATCHES(decay_fit(s.g, s.u, s.p, s.net, eps), Error, Catch::Matchers::Predicate<Error>([](const Error& e) {
                         return e.code() == Errc::TooFewQualifyingCells;
                       }));
}
