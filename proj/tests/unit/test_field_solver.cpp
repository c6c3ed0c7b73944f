#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "phasenet/boundary.hpp"
#include "phasenet/builders.hpp"
#include "phasenet/errors.hpp"
#include "phasenet/field_solver.hpp"
#include "phasenet/optimizer.hpp"
#include "phasenet/testmap.hpp"

using namespace phasenet;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

std::vector<WellPoint> three_wells() {
  std::vector<WellPoint> w;
  for (double d : {90.0, 210.0, 330.0}) w.push_back({std::cos(d * M_PI / 180), std::sin(d * M_PI / 180)});
  return w;
}

}  // namespace

TEST_CASE("disk grid") {
  auto g = build_disk_grid(1.0, 1.0 / 64);
  CHECK(std::abs(g.area() - M_PI) / M_PI < 0.02);
  auto chk = check_grid(g);
  CHECK(chk.ok);
  CHECK(chk.interior_components == 1);
  CHECK(chk.stencil_closed);
  CHECK_THROWS_MATCHES(build_disk_grid(1.0, 0.5), Error, Catch::Matchers::Predicate<Error>([](const Error& e) {
                         return e.code() == Errc::ResolutionTooCoarse;
                       }));
  auto g2 = build_disk_grid(2.0, 2.0 / 64);
  CHECK_THAT(static_cast<double>(g2.size()) / g.size(), WithinRel(1.0, 1e-12));
  auto g3 = build_disk_grid(2.0, 1.0 / 64);
  CHECK_THAT(static_cast<double>(g3.size()) / g.size(), WithinRel(4.0, 0.03));
  // every interior cell has four domain neighbours
  for (int c = 0; c < g.size(); ++c)
    if (g.interior(c))
      for (int q : g.nbr[c]) CHECK(q >= 0);
}

TEST_CASE("energy of a linear field on a square") {
  auto p = make_double_well();
  auto g = build_rect_grid({0, 0}, {1, 1}, 1.0 / 32);
  const double eps = 0.05;
  std::vector<double> u(g.size());
  for (int c = 0; c < g.size(); ++c) u[c] = -1 + 2 * g.center(c).x;
  // independent sum: cell W terms plus horizontal edge terms (vertical edges carry no jump)
  double expect = 0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      int c = g.at(i, j);
      if (c < 0) continue;
      double x = g.origin.x + (i + 0.5) * g.h, v = -1 + 2 * x;
      expect += g.h * g.h * 0.25 * (1 - v * v) * (1 - v * v) / eps;
      if (g.at(i + 1, j) >= 0) expect += eps * std::pow(2 * g.h, 2) / 2;
    }
  CHECK_THAT(energy_of(g, u, p, eps), WithinRel(expect, 1e-12));
  auto ce = cell_energy(g, u, p, eps);
  double sum = 0;
  for (double v : ce) sum += v;
  CHECK_THAT(sum, WithinRel(expect, 1e-12));
}

TEST_CASE("constant fields have zero energy") {
  auto p = make_double_well();
  auto g = build_disk_grid(1.0, 1.0 / 32);
  std::vector<double> u(g.size(), 1.0);
  CHECK(energy_of(g, u, p, 0.1) == 0.0);
  CHECK(energy_of(g, u, p, 0.2) == 0.0);
  double a[] = {-1.0};
  auto datum = constant_datum(g, a);
  auto f = minimize(g, datum, p, 0.1);
  CHECK(f.converged);
  CHECK(f.energy < 1e-12);
  for (double v : f.u) CHECK_THAT(v, WithinAbs(-1.0, 1e-6));
}

TEST_CASE("gradient matches finite differences") {
  auto p = make_product_potential(three_wells(), 0.5);
  auto g = build_disk_grid(1.0, 1.0 / 20);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> U(-1, 1);
  std::vector<double> u(2 * g.size());
  for (auto& v : u) v = U(rng);
  const double eps = 0.1;
  std::vector<double> grad;
  energy_gradient(g, u, p, eps, grad);
  std::uniform_int_distribution<int> pick(0, g.size() - 1);
  int tested = 0;
  while (tested < 40) {
    int c = pick(rng);
    if (!g.interior(c)) continue;
    for (int k = 0; k < 2; ++k) {
      const double h = 1e-6;
      auto up = u, um = u;
      up[2 * c + k] += h;
      um[2 * c + k] -= h;
      double fd = (energy_of(g, up, p, eps) - energy_of(g, um, p, eps)) / (2 * h);
      CHECK(std::abs(fd - grad[2 * c + k]) <= 1e-5 * std::max(1.0, std::abs(fd)));
    }
    ++tested;
  }
  // boundary entries are fixed
  for (int c : g.boundary_cells) CHECK(grad[2 * c] == 0.0);
}

TEST_CASE("strip matches the tanh profile and sigma") {
  auto p = make_double_well();
  const double eps = 0.02;
  auto g = build_rect_grid({0, 0}, {1, 1}, eps / 4);
  std::vector<double> f(g.size());
  for (int c = 0; c < g.size(); ++c) f[c] = std::tanh((g.center(c).x - 0.5) / (std::sqrt(2.0) * eps));
  auto datum = datum_from_field(g, f, 1);
  SolverOptions so;
  so.tol = 1e-8;
  auto res = minimize(g, datum, p, eps, so);
  REQUIRE(res.converged);
  CHECK(el_residual(g, res.u, p, eps) <= 1e-8);
  double err = 0;
  for (int c = 0; c < g.size(); ++c) {
    Vec2 x = g.center(c);
    if (std::abs(x.y - 0.5) > g.h) continue;
    err = std::max(err, std::abs(res.u[c] - std::tanh((x.x - 0.5) / (std::sqrt(2.0) * eps))));
  }
  CHECK(err < 0.02);
  CHECK(std::abs(res.energy - 2 * std::sqrt(2.0) / 3) / (2 * std::sqrt(2.0) / 3) < 0.05);
  // energy descent along the log
  for (size_t i = 1; i < res.log.size(); ++i) CHECK(res.log[i].energy <= res.log[i - 1].energy + 1e-12);
  // discrete maximum-type bound
  CHECK(res.max_norm <= std::max(datum.M, p.max_well_norm()) + 0.5);
}

TEST_CASE("grid refinement on the three-phase disk") {
  auto p = make_product_potential(three_wells(), 0.5);
  auto sa = assemble_sigma(p);
  Domain D = Domain::disk({0, 0}, 1);
  auto net = local_minimize(star_network(D, regular_angles(3, M_PI / 6), {0.1, 0}), sa.sigma).net;
  const double eps = 0.04;
  SolverOptions so;
  so.tol = 1e-8;
  double E[2];
  int k = 0;
  for (double h : {1.0 / 64, 1.0 / 128}) {
    auto g = build_disk_grid(1, h);
    auto tm = build_test_map(net, sa.profiles, p, g, eps);
    auto datum = datum_from_field(g, tm.u, 2);
    auto res = minimize(g, datum, p, eps, so, &tm.u);
    REQUIRE(res.converged);
    CHECK(res.energy <= tm.energy);
    E[k++] = res.energy;
  }
  CHECK(std::abs(E[1] - E[0]) / E[1] < 0.03);
}

TEST_CASE("multistart keeps the lowest energy") {
  auto p = make_double_well();
  auto g = build_rect_grid({0, 0}, {1, 1}, 1.0 / 40);
  const double eps = 0.08;
  std::vector<double> f(g.size());
  for (int c = 0; c < g.size(); ++c) f[c] = std::tanh((g.center(c).x - 0.5) / (std::sqrt(2.0) * eps));
  auto datum = datum_from_field(g, f, 1);
  auto seed = projection_seed(g, datum, p);
  std::vector<double> bad(g.size(), 1.0);
  for (int c : g.boundary_cells) bad[c] = f[c];
  auto ms = minimize_multistart(g, datum, p, eps, {}, {{"projection", seed}, {"all_plus", bad}});
  REQUIRE(ms.energies.size() == 2);
  double lo = std::min(ms.energies[0].second, ms.energies[1].second);
  CHECK(ms.best.energy == lo);
}
