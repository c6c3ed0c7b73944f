#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "phasenet/errors.hpp"
#include "phasenet/interface.hpp"

using namespace phasenet;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// -1 left of x = -w/2, +1 right of x = w/2, 0 in between.
std::vector<double> band_field(const DomainGrid& g, double w) {
  std::vector<double> u(g.size());
  for (int c = 0; c < g.size(); ++c) {
    double x = g.center(c).x;
    u[c] = x < -w / 2 ? -1.0 : x > w / 2 ? 1.0 : 0.0;
  }
  return u;
}

std::vector<double> tanh_field(const DomainGrid& g, double eps) {
  std::vector<double> u(g.size());
  for (int c = 0; c < g.size(); ++c) u[c] = std::tanh(g.center(c).x / (std::sqrt(2.0) * eps));
  return u;
}

}  // namespace

TEST_CASE("band field") {
  auto p = make_double_well();
  auto g = build_rect_grid({-1, -1}, {1, 1}, 1.0 / 32);
  auto u = band_field(g, 0.25);
  auto s = extract(g, u, p, 0.5, 1.0);
  int band = 0;
  for (int c = 0; c < g.size(); ++c) band += std::abs(g.center(c).x) <= 0.125;
  CHECK(s.interface_cells == band);
  CHECK_THAT(s.measure, WithinRel(band * g.h * g.h, 1e-12));
  CHECK(s.n_interface_components == 1);
  CHECK(s.phase_components[0] == 1);
  CHECK(s.phase_components[1] == 1);
  CHECK(s.adjacent_phase_pairs == 0);
  // partition: interface plus phase cells cover the grid once
  CHECK(s.interface_cells + s.phase_cells[0] + s.phase_cells[1] == g.size());
  for (int c = 0; c < g.size(); ++c) CHECK((s.interface_mask[c] != 0) == (s.phase_label[c] < 0));
}

TEST_CASE("delta range") {
  auto p = make_double_well();
  auto g = build_rect_grid({-1, -1}, {1, 1}, 1.0 / 16);
  auto u = band_field(g, 0.25);
  for (double d : {0.0, -0.1, 1.0, 1.5})
    CHECK_THROWS_MATCHES(extract(g, u, p, d, 1.0), Error, Catch::Matchers::Predicate<Error>([](const Error& e) {
                           return e.code() == Errc::DeltaOutOfRange;
                         }));
}

TEST_CASE("measure decreases as delta grows") {
  auto p = make_double_well();
  auto g = build_rect_grid({-1, -1}, {1, 1}, 1.0 / 64);
  auto u = tanh_field(g, 0.05);
  double prev = INFINITY;
  for (double d : {0.05, 0.1, 0.2, 0.4, 0.8}) {
    auto s = extract(g, u, p, d, 1.0);
    CHECK(s.measure <= prev);
    prev = s.measure;
    CHECK(s.n_interface_components == 1);
  }
}

TEST_CASE("tanh band width") {
  // |tanh(x / (sqrt2 eps))| < 1 - delta  <=>  |x| < sqrt2 eps atanh(1 - delta)
  auto p = make_double_well();
  const double eps = 0.02, delta = 0.3;
  auto g = build_rect_grid({-1, -1}, {1, 1}, 1.0 / 256);
  auto s = extract(g, tanh_field(g, eps), p, delta, 1.0);
  double width = 2 * std::sqrt(2.0) * eps * std::atanh(1 - delta);
  CHECK_THAT(s.measure, WithinRel(width * 2.0, 0.1));
}

TEST_CASE("disconnected phase") {
  auto p = make_double_well();
  auto g = build_rect_grid({-1, -1}, {1, 1}, 1.0 / 32);
  std::vector<double> u(g.size(), 1.0);
  for (int c = 0; c < g.size(); ++c) {
    Vec2 x = g.center(c);
    if (std::hypot(x.x + 0.5, x.y) < 0.2 || std::hypot(x.x - 0.5, x.y) < 0.2) u[c] = -1.0;
  }
  auto s = extract(g, u, p, 0.5, 1.0);
  CHECK(s.phase_components[0] == 2);
  CHECK(s.phase_components[1] == 1);
  CHECK(s.n_interface_components == 0);
  auto r = connectivity_report(g, u, p, 0.5, 1.0);
  CHECK_FALSE(r.all_phases_connected());
  CHECK(r.phase_connected[1]);
  CHECK(r.complement_components[1] == 2);
}

TEST_CASE("connectivity warnings") {
  auto p = make_double_well();
  auto g = build_rect_grid({-1, -1}, {1, 1}, 1.0 / 32);
  auto u = band_field(g, 0.25);
  auto r = connectivity_report(g, u, p, 0.5, 1.0, nullptr, 0.4);
  CHECK(r.delta_above_delta0);
  CHECK(r.all_phases_connected());
  CHECK(r.interface_components == 1);
  // a band value exactly at the threshold flips under a 1% change of delta
  std::vector<double> v(g.size(), 1.0);
  for (int c = 0; c < g.size(); ++c)
    if (std::abs(g.center(c).x) < 0.1) v[c] = 0.5;
  auto near = connectivity_report(g, v, p, 0.5, 1.0);
  CHECK(near.near_critical_delta);
}

TEST_CASE("measure scaling") {
  std::vector<double> eps{0.04, 0.02, 0.01}, m;
  for (double e : eps) m.push_back(3.0 * std::pow(e, 2.0 / 3.0));
  auto s = measure_scaling(1.0 / 6.0, eps, m);
  CHECK_THAT(s.fit.exponent, WithinAbs(2.0 / 3.0, 1e-12));
  CHECK_THAT(s.fit.C, WithinRel(3.0, 1e-12));
  CHECK_THROWS_MATCHES(measure_scaling(1.0 / 6.0, {0.04, 0.02}, {1, 2}), Error,
                       Catch::Matchers::Predicate<Error>([](const Error& e) {
                         return e.code() == Errc::InsufficientData;
                       }));
  CHECK_THROWS_AS(measure_scaling(1.0 / 6.0, {0.04, 0.04, 0.02}, {1, 1, 2}), Error);
}

TEST_CASE("exports") {
  auto p = make_double_well();
  auto g = build_rect_grid({-1, -1}, {1, 1}, 1.0 / 32);
  auto s = extract(g, band_field(g, 0.25), p, 0.5, 1.0);
  auto csv = labels_csv(g, s);
  CHECK(csv.rfind("i,j,x,y,label,interface\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == g.size() + 1);
  auto svg = interface_svg(g, s);
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
}
