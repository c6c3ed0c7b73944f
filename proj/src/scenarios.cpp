#include "phasenet/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include "phasenet/builders.hpp"
#include "phasenet/errors.hpp"
#include "phasenet/optimizer.hpp"

namespace phasenet {

namespace {

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

void check(ScenarioReport& r, std::string claim, bool pass, std::string detail) {
  r.checks.push_back({std::move(claim), pass, std::move(detail)});
}

ScenarioCandidate optimized(const std::string& name, const Network& init, const SurfaceTensionMatrix& s,
                            bool probe = true) {
  auto res = local_minimize(init, s);
  ScenarioCandidate c;
  c.name = name;
  c.F = res.F_value;
  c.converged = res.converged;
  c.flat_directions = res.degenerate_directions;
  c.net = res.net;
  if (probe) {
    double R = init.domain.scale();
    auto cert = nondegeneracy_probe(res.net, s, {1e-3 * R, 1e-2 * R});
    c.c0 = cert.c0;
    c.flat_directions = cert.flat_directions;
  }
  return c;
}

ScenarioCandidate fixed(const std::string& name, const Network& net, const SurfaceTensionMatrix& s) {
  ScenarioCandidate c;
  c.name = name;
  c.F = energy_F(net, s);
  c.net = net;
  return c;
}

void pick_winner(ScenarioReport& r) {
  r.winner = 0;
  for (size_t i = 1; i < r.candidates.size(); ++i)
    if (r.candidates[i].F < r.candidates[r.winner].F - 1e-12) r.winner = static_cast<int>(i);
}

double get(const std::map<std::string, double>& p, const char* key) { return p.at(key); }

// ---- polygon with equal sigma -------------------------------------------

void polygon_equal_sigma(ScenarioReport& r) {
  const auto& p = r.params;
  int N = static_cast<int>(get(p, "N"));
  double R = get(p, "R"), sg = get(p, "sigma");
  bool interior = get(p, "interior") != 0.0;
  if (N < 3) throw Error(Errc::InvalidArgument, "polygon_equal_sigma needs N >= 3");
  Domain D = Domain::disk({0, 0}, R);

  if (interior) {
    // N boundary wells plus one interior well; equal sigma.
    auto s = equal_sigma(N + 1, sg);
    auto init = interior_polygon_network(D, regular_angles(N), 0.5 * R);
    r.candidates.push_back(optimized("interior_polygon", init, s, false));
    pick_winner(r);
    auto diag = validate(r.best().net);
    double area = diag.phase_area.size() > static_cast<size_t>(N) ? diag.phase_area[N] : 0.0;
    r.values["interior_area"] = area;
    check(r, "interior phase has zero measure", area <= 1e-9 * R * R, fmt("area %.3e", area));
    check(r, "F <= sigma pi D", r.best().F <= sg * M_PI * 2 * R + 1e-9, fmt("F %.9f", r.best().F));
    return;
  }

  auto s = equal_sigma(N, sg);
  auto angles = regular_angles(N);
  Network pol = polygon_network(D, angles);
  double pol_closed = sg * (N - 1) * 2 * R * std::sin(M_PI / N);
  r.values["F_pol_closed_form"] = pol_closed;
  r.candidates.push_back(fixed("Pol", pol, s));
  auto from_pol = optimized("Pol_start", pol, s);
  r.candidates.push_back(from_pol);

  if (N == 3) r.candidates.push_back(optimized("star", star_network(D, angles, {0.1 * R, 0.05 * R}), s));
  if (N == 4) r.candidates.push_back(optimized("steiner", n4_steiner_init(D, angles), s));
  if (N == 5) r.candidates.push_back(optimized("steiner", n5_steiner_init(R), s));
  if (N == 6) {
    r.candidates.push_back(optimized("G1", n6_g1(R), s));
    r.candidates.push_back(optimized("G2", n6_g2(R), s));
  }
  pick_winner(r);
  const auto& win = r.best();

  check(r, "Pol F matches closed form", std::abs(r.candidates[0].F - pol_closed) <= 1e-9 * R,
        fmt("F %.12f closed %.12f", r.candidates[0].F, pol_closed));
  check(r, "F <= sigma pi D", win.F <= sg * M_PI * 2 * R + 1e-9, fmt("F %.9f bound %.9f", win.F, sg * M_PI * 2 * R));

  double theta = (1.0 - 2.0 / N) * M_PI;
  r.values["theta"] = theta;
  bool stays = std::abs(from_pol.F - pol_closed) <= 1e-9 * sg * R;
  if (theta >= 2 * M_PI / 3 - 1e-12) {
    check(r, "min theta >= 2pi/3: Pol is a local minimizer", stays && from_pol.converged,
          fmt("theta %.6f, optimized from Pol %.12f", theta, from_pol.F));
  } else {
    check(r, "min theta < 2pi/3: optimizer escapes Pol", from_pol.F < pol_closed - 1e-6 * sg * R,
          fmt("theta %.6f, optimized from Pol %.12f vs %.12f", theta, from_pol.F, pol_closed));
  }

  for (const auto& j : junction_residuals(win.net, s)) {
    double dev = 0;
    for (double a : j.angles) dev = std::max(dev, std::abs(a - 2 * M_PI / 3));
    r.values["max_angle_dev"] = std::max(r.values["max_angle_dev"], dev);
  }
  check(r, "interior junction angles 2pi/3", r.values["max_angle_dev"] <= 1e-4,
        fmt("max deviation %.3e", r.values["max_angle_dev"]));

  if (N == 6) {
    double g1 = r.candidates[2].F, g2 = r.candidates[3].F;
    r.values["F_G1"] = g1;
    r.values["F_G2"] = g2;
    check(r, "Pol6 wins with F = 5 sigma R", win.name.rfind("Pol", 0) == 0 && std::abs(win.F - 5 * sg * R) <= 1e-6,
          fmt("winner F %.12f", win.F));
    check(r, "F(Pol6) < F(G1) and F(Pol6) < F(G2)", pol_closed < g1 - 1e-9 && pol_closed < g2 - 1e-9,
          fmt("Pol6 %.9f G1 %.9f G2 %.9f", pol_closed, g1, g2));
    // Ordering of G1 and G2 is reported only.
    r.values["G1_below_G2"] = g1 < g2 ? 1.0 : 0.0;
  }
  r.classification = win.name;
}

// ---- N = 4 with an interior phase ---------------------------------------

std::string n4_class(const Network& net) {
  double R = net.domain.radius(), rmin = 1e300, rmax = 0;
  for (const auto& n : net.nodes) {
    if (n.kind != NodeKind::Branch) continue;
    double d = norm(n.pos - net.domain.center());
    rmin = std::min(rmin, d);
    rmax = std::max(rmax, d);
  }
  if (rmax <= 1e-6 * R) return "G0";
  if (rmin >= (1 - 1e-6) * R) return "GR";
  return "family";
}

ScenarioCandidate n4_winner(double sg, double s0, double R, bool probe) {
  auto s = n4_sigma(sg, s0);
  ScenarioCandidate best;
  best.F = 1e300;
  for (double f : {0.2, 0.5, 0.8}) {
    auto c = optimized("ell=" + fmt("%.1f", f) + "R", n4_family(R, f * R), s, probe);
    if (c.F < best.F - 1e-12) best = c;
  }
  return best;
}

void n4_interior_phase(ScenarioReport& r) {
  const auto& p = r.params;
  double sg = get(p, "sigma"), s0 = get(p, "sigma0"), R = get(p, "R");
  auto s = n4_sigma(sg, s0);
  double ratio = sg / s0;
  if (ratio >= 2.0) check(r, "triangle inequality sigma < 2 sigma0", false, fmt("sigma/sigma0 %.6f", ratio));

  for (double f : {0.2, 0.5, 0.8}) {
    auto c = optimized("ell=" + fmt("%.1f", f) + "R", n4_family(R, f * R), s);
    c.name += "->" + n4_class(c.net);
    r.candidates.push_back(c);
  }
  r.values["F_G0_closed_form"] = 3 * sg * R;
  r.values["F_GR_closed_form"] = 3 * std::sqrt(3.0) * s0 * R;
  pick_winner(r);
  const auto& win = r.best();
  r.classification = n4_class(win.net);

  const double tie = 1e-12 * s0;
  if (std::abs(sg - std::sqrt(3.0) * s0) <= tie) {
    r.classification = "family";
    double dev = 0;
    for (double f : {0.2, 0.5, 0.8}) dev = std::max(dev, std::abs(energy_F(n4_family(R, f * R), s) - 3 * R * sg));
    r.values["family_max_dev"] = dev;
    check(r, "F = 3 R sigma independent of ell", dev <= 1e-6, fmt("max deviation %.3e", dev));
    auto cert = nondegeneracy_probe(n4_family(R, 0.5 * R), s, {1e-3 * R, 1e-2 * R});
    r.values["flat_directions"] = cert.flat_directions;
    r.values["c0"] = cert.c0;
    check(r, "exactly one flat direction", cert.flat_directions == 1, fmt("flat %g, c0 %.3e", cert.flat_directions, cert.c0));
    bool all_stay = true;
    for (const auto& c : r.candidates) all_stay = all_stay && c.name.find("family") != std::string::npos;
    check(r, "optimizer stays on the family", all_stay, "");
  } else if (sg < std::sqrt(3.0) * s0) {
    check(r, "sigma < sqrt3 sigma0 gives G0", r.classification == "G0", "class " + r.classification);
    check(r, "F(G0) = 3 sigma R", std::abs(win.F - 3 * sg * R) <= 1e-9 * R, fmt("F %.12f", win.F));
    auto diag = validate(win.net);
    check(r, "interior phase has zero measure", diag.phase_area.at(0) <= 1e-9 * R * R,
          fmt("area %.3e", diag.phase_area.at(0)));
  } else {
    check(r, "sqrt3 sigma0 < sigma < 2 sigma0 gives GR", r.classification == "GR", "class " + r.classification);
    check(r, "F(GR) = 3 sqrt3 sigma0 R", std::abs(win.F - 3 * std::sqrt(3.0) * s0 * R) <= 1e-9 * R,
          fmt("F %.12f", win.F));
  }
}

// ---- seven wells, Z3 ----------------------------------------------------

void n7_z3(ScenarioReport& r) {
  const auto& p = r.params;
  double psi = get(p, "psi"), R = get(p, "R");
  bool strict = get(p, "strict") != 0.0;
  if (!(psi > 0 && psi < M_PI / 6)) throw Error(Errc::InvalidArgument, "psi must lie in (0, pi/6)");
  double target = n7_equal_F(psi) * R;
  r.values["F_target"] = target;

  if (!strict) {
    auto sp = n7_equality_sigma(psi);
    auto s = sp.matrix();
    double dev = 0;
    int invalid = 0;
    for (double d : {0.25, 0.5, 0.75})
      for (double f : {0.2, 0.5, 0.8}) {
        double ell = f * n7_g(psi) * d;
        for (int cs = 1; cs <= 2; ++cs) {
          Network net = cs == 1 ? n7_case1(psi, d, ell, R) : n7_case2(psi, d, ell, R);
          if (!validate(net).ok) ++invalid;
          double F = energy_F(net, s);
          dev = std::max(dev, std::abs(F - target));
          if (d == 0.5 && f == 0.5)
            r.candidates.push_back(fixed(std::string(cs == 1 ? "case_I" : "case_II") + " d=0.5", net, s));
        }
      }
    r.values["max_dev"] = dev;
    check(r, "F = 6 cos psi over the (d, ell) grid", dev <= 1e-6, fmt("max deviation %.3e", dev));
    check(r, "family networks validate", invalid == 0, fmt("%g invalid", invalid));
    auto cert = nondegeneracy_probe(n7_case1(psi, 0.5, 0.3 * n7_g(psi) * 0.5, R), s, {1e-3 * R, 1e-2 * R});
    r.values["flat_directions"] = cert.flat_directions;
    r.values["c0"] = cert.c0;
    check(r, "at least two flat directions", cert.flat_directions >= 2, fmt("flat %g", cert.flat_directions));
    for (auto& c : r.candidates) {
      c.flat_directions = cert.flat_directions;
      c.c0 = cert.c0;
    }
    pick_winner(r);
    r.classification = "family";
    return;
  }

  auto sp = n7_strict_sigma(psi, get(p, "margin"));
  auto s = sp.matrix();
  r.candidates.push_back(fixed("G0", n7_G0(psi, R), s));
  r.candidates.push_back(fixed("Gstar", n7_Gstar(psi, R), s));
  r.candidates.push_back(fixed("Gtri", n7_Gtri(psi, R), s));
  pick_winner(r);
  r.classification = r.best().name;
  double Ft = r.candidates[2].F;
  check(r, "Gtri is the strict minimizer", r.best().name == "Gtri" && Ft < r.candidates[0].F - 1e-9 &&
                                               Ft < r.candidates[1].F - 1e-9,
        fmt("G0 %.9f G* %.9f Gtri %.9f", r.candidates[0].F, r.candidates[1].F, Ft));
  check(r, "F(Gtri) = 6 cos psi", std::abs(Ft - target) <= 1e-9, fmt("F %.12f", Ft));

  // Conditions on sigma.
  const double s0 = sp.sigma0, sq3 = std::sqrt(3.0);
  double tau0_expected = 2 / sq3 * std::sin(M_PI / 6 - psi) * s0;
  check(r, "tau0 = (2/sqrt3) sin(pi/6 - psi) sigma0", std::abs(sp.tau0 - tau0_expected) <= 1e-12,
        fmt("tau0 %.12f", sp.tau0));
  check(r, "sigma > 2 cos psi", sp.sigma > 2 * std::cos(psi) * s0, fmt("sigma %.9f", sp.sigma));
  check(r, "sigma00 >= (2/sqrt3) cos psi sigma0", sp.sigma00 >= 2 / sq3 * std::cos(psi) * s0,
        fmt("sigma00 %.9f", sp.sigma00));
  check(r, "tau >= sqrt3 tau0", sp.tau >= sq3 * sp.tau0, fmt("tau %.9f", sp.tau));
  double beta0 = -sq3 / 2 * sp.tau0 - std::cos(2 * M_PI / 3 - psi) * s0;
  double betapi = sq3 / 2 * sp.tau0 - std::cos(M_PI / 3 + psi) * s0;
  check(r, "beta = 0 and beta = pi coefficients vanish", std::abs(beta0) <= 1e-12 && std::abs(betapi) <= 1e-12,
        fmt("%.3e %.3e", beta0, betapi));
  double min_rate = 1e300;
  for (int k = 1; k < 180; ++k) {
    double b = M_PI * k / 180;
    double c5 = std::sin(b) * sp.sigma00 - std::cos(b - M_PI / 6) * sp.tau0 - std::cos(2 * M_PI / 3 - psi - b) * s0;
    min_rate = std::min(min_rate, c5);
  }
  r.values["min_beta_coefficient"] = min_rate;
  check(r, "first-order coefficient >= 0 for beta in (0, pi)", min_rate >= 0, fmt("min %.3e", min_rate));

  // Random admissible perturbations of both types.
  int samples = static_cast<int>(get(p, "samples"));
  std::mt19937 rng(static_cast<unsigned>(get(p, "seed")));
  std::uniform_real_distribution<double> amp(0.0, get(p, "amplitude")), ang(0.0, M_PI);
  double min_dF = 1e300;
  int invalid = 0;
  for (int k = 0; k < samples; ++k) {
    Network q = k % 2 == 0 ? n7_type1(psi, amp(rng), amp(rng), R) : n7_type2(psi, amp(rng), amp(rng), ang(rng), R);
    if (!validate(q).ok) ++invalid;
    min_dF = std::min(min_dF, energy_F(q, s) - Ft);
  }
  r.values["min_dF"] = min_dF;
  check(r, "perturbations give dF >= -1e-9", min_dF >= -1e-9, fmt("min dF %.3e over %g", min_dF, samples));
  check(r, "perturbed networks validate", invalid == 0, fmt("%g invalid", invalid));
}

}  // namespace

bool ScenarioReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const ScenarioCheck& c) { return c.pass; });
}

std::map<std::string, double> scenario_defaults(const std::string& name) {
  if (name == "polygon_equal_sigma") return {{"N", 6}, {"R", 1}, {"sigma", 1}, {"interior", 0}};
  if (name == "n4_interior_phase") return {{"sigma", 1.6}, {"sigma0", 1}, {"R", 1}};
  if (name == "n7_z3")
    return {{"psi", M_PI / 12}, {"R", 1}, {"strict", 0}, {"margin", 0.1},
            {"samples", 200}, {"seed", 5}, {"amplitude", 0.05}};
  throw Error(Errc::UnknownScenario, "unknown scenario '" + name + "'");
}

ScenarioReport run_scenario(const std::string& name, const std::map<std::string, double>& params, bool throw_on_fail) {
  ScenarioReport r;
  r.name = name;
  r.params = scenario_defaults(name);
  for (const auto& [k, v] : params) {
    if (!r.params.count(k)) throw Error(Errc::InvalidArgument, "scenario " + name + " has no parameter '" + k + "'");
    r.params[k] = v;
  }
  if (name == "polygon_equal_sigma") polygon_equal_sigma(r);
  else if (name == "n4_interior_phase") n4_interior_phase(r);
  else n7_z3(r);
  if (throw_on_fail)
    for (const auto& c : r.checks)
      if (!c.pass) throw Error(Errc::AssertionFailure, name + ": " + c.claim + " (" + c.detail + ")");
  return r;
}

double n4_bisect_threshold(double sigma0, double lo, double hi, double tol, double R) {
  auto is_g0 = [&](double ratio) { return n4_class(n4_winner(ratio * sigma0, sigma0, R, false).net) == "G0"; };
  if (!is_g0(lo) || is_g0(hi)) throw Error(Errc::InvalidArgument, "bisection bracket does not straddle the switch");
  while (hi - lo > tol) {
    double mid = 0.5 * (lo + hi);
    (is_g0(mid) ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

std::string scenario_csv(const ScenarioReport& r) {
  std::ostringstream o;
  o << "candidate,F,c0,flat_directions,converged\n";
  char buf[256];
  for (const auto& c : r.candidates) {
    std::snprintf(buf, sizeof buf, "%s,%.12g,%.6g,%d,%d\n", c.name.c_str(), c.F, c.c0, c.flat_directions,
                  c.converged ? 1 : 0);
    o << buf;
  }
  return o.str();
}

}  // namespace phasenet
