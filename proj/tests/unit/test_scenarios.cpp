#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "phasenet/builders.hpp"
#include "phasenet/errors.hpp"
#include "phasenet/scenarios.hpp"

using namespace phasenet;
using Catch::Matchers::WithinAbs;

namespace {

bool all_pass(const ScenarioReport& r) {
  for (const auto& c : r.checks) {
    INFO(c.claim << ": " << c.detail);
    CHECK(c.pass);
  }
  return r.passed();
}

}  // namespace

TEST_CASE("Pol6 in the unit disk") {
  auto r = run_scenario("polygon_equal_sigma", {{"N", 6}});
  CHECK(all_pass(r));
  CHECK(r.best().name.rfind("Pol", 0) == 0);
  CHECK_THAT(r.best().F, WithinAbs(5.0, 1e-6));
  CHECK_THAT(r.values.at("F_pol_closed_form"), WithinAbs(5.0, 1e-12));
  CHECK(r.values.at("F_G1") > 5.0);
  CHECK(r.values.at("F_G2") > 5.0);
}

TEST_CASE("polygon closed form scales with R and sigma") {
  for (int N : {3, 4, 5}) {
    auto r = run_scenario("polygon_equal_sigma", {{"N", N}, {"R", 2.0}, {"sigma", 1.5}});
    CHECK(all_pass(r));
    CHECK_THAT(r.values.at("F_pol_closed_form"), WithinAbs((N - 1) * 2 * 2.0 * std::sin(M_PI / N) * 1.5, 1e-12));
  }
}

TEST_CASE("N = 4 interior phase classes") {
  auto below = run_scenario("n4_interior_phase", {{"sigma", 1.6}});
  CHECK(all_pass(below));
  CHECK(below.classification == "G0");
  auto above = run_scenario("n4_interior_phase", {{"sigma", 1.9}});
  CHECK(all_pass(above));
  CHECK(above.classification == "GR");
  auto at = run_scenario("n4_interior_phase", {{"sigma", std::sqrt(3.0)}});
  CHECK(all_pass(at));
  CHECK(at.values.at("flat_directions") == 1);
}

TEST_CASE("N = 4 threshold by bisection") {
  double t = n4_bisect_threshold(1.0, 1.5, 1.95, 1e-5);
  CHECK_THAT(t, WithinAbs(std::sqrt(3.0), 1e-3));
}

TEST_CASE("N = 7 with equality sigma") {
  auto r = run_scenario("n7_z3", {{"strict", 0}});
  CHECK(all_pass(r));
  CHECK_THAT(r.values.at("F_target"), WithinAbs(6 * std::cos(M_PI / 12), 1e-12));
  CHECK(r.values.at("max_dev") <= 1e-6);
  CHECK(r.values.at("flat_directions") >= 2);
}

TEST_CASE("N = 7 with strict sigma") {
  auto r = run_scenario("n7_z3", {{"strict", 1}});
  CHECK(all_pass(r));
  CHECK(r.best().name == "Gtri");
  CHECK(r.values.at("min_dF") >= -1e-9);
  auto s = n7_strict_sigma(M_PI / 12);
  CHECK_THAT(s.tau0, WithinAbs(0.2988584907, 1e-9));
}

TEST_CASE("scenario errors") {
  CHECK_THROWS_MATCHES(run_scenario("nope"), Error, Catch::Matchers::Predicate<Error>([](const Error& e) {
                         return e.code() == Errc::UnknownScenario;
                       }));
  CHECK_THROWS_MATCHES(scenario_defaults("nope"), Error, Catch::Matchers::Predicate<Error>([](const Error& e) {
                         return e.code() == Errc::UnknownScenario;
                       }));
  CHECK_THROWS_AS(run_scenario("n7_z3", {{"bogus", 1}}), Error);
  auto csv = scenario_csv(run_scenario("polygon_equal_sigma", {{"N", 3}}));
  CHECK(csv.rfind("candidate,F,c0,flat_directions,converged\n", 0) == 0);
}
