#include "phasenet/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <sstream>

#include <json.hpp>

#include "phasenet/boundary.hpp"
#include "phasenet/errors.hpp"
#include "phasenet/field_io.hpp"
#include "phasenet/field_solver.hpp"
#include "phasenet/fit.hpp"
#include "phasenet/optimizer.hpp"

namespace phasenet {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string eps_dir_name(double eps) { return "eps_" + fmt("%g", eps); }

// End node -> arclength midpoint of the nearest measured datum transition.
std::map<int, double> transition_targets(const Network& net, const DatumArcs& arcs) {
  const Domain& D = net.domain;
  std::vector<double> mids;
  for (const auto& t : arcs.transitions) mids.push_back(t.s_start + 0.5 * D.ccw_gap(t.s_start, t.s_end));
  std::map<int, double> out;
  if (mids.empty()) return out;
  for (int k = 0; k < static_cast<int>(net.nodes.size()); ++k) {
    if (net.nodes[k].kind != NodeKind::End) continue;
    double s = D.param(net.nodes[k].pos);
    double best = mids[0];
    for (double m : mids)
      if (std::abs(D.signed_gap(s, m)) < std::abs(D.signed_gap(s, best))) best = m;
    out[k] = best;
  }
  return out;
}

}  // namespace

bool RunReport::assertions_pass() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const RunCheck& c) { return c.kind != "assert" || c.skipped || c.pass; });
}

bool RunReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const RunCheck& c) { return c.skipped || c.pass; });
}

const RunCheck* RunReport::check(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

std::string output_root() {
  const char* e = std::getenv("PHASENET_OUT");
  return e && *e ? e : "out";
}

std::string sigma_csv(const SurfaceTensionMatrix& s, const ProfileSet* profiles) {
  std::ostringstream o;
  o << "i,j,sigma,tail_rate\n";
  char buf[128];
  for (int i = 0; i < s.n(); ++i)
    for (int j = i + 1; j < s.n(); ++j) {
      double rate = profiles && profiles->has(i, j) ? profiles->get(i, j).tail_rate : 0.0;
      std::snprintf(buf, sizeof buf, "%d,%d,%.15g,%.9g\n", i, j, s(i, j), rate);
      o << buf;
    }
  return o.str();
}

RunReport run_pipeline(const ScenarioConfig& cfg, const std::string& out_root, const LogFn& log) {
  auto t_run = std::chrono::steady_clock::now();
  auto say = [&](const std::string& s) {
    if (log) log(s);
  };
  RunReport r;
  r.config = cfg;
  r.out_dir = (fs::path(out_root) / (cfg.output.empty() ? cfg.name : cfg.output)).string();
  fs::create_directories(r.out_dir);
  auto emit = [&](const std::string& rel, const std::string& text) {
    write_text((fs::path(r.out_dir) / rel).string(), text);
    r.files.push_back(rel);
  };
  auto add = [&](std::string name, std::string kind, bool pass, std::string detail, bool skipped = false) {
    r.checks.push_back({std::move(name), std::move(kind), pass, skipped, std::move(detail)});
  };

  Potential p = make_potential(cfg.potential);
  const int m = p.dim(), nw = p.num_wells();
  SigmaAssembly sa = assemble_sigma(p);
  r.sigma = sa.sigma;
  if (cfg.sigma_source == "manual") r.sigma = set_sigma_manual(nw, cfg.sigma_manual).sigma;
  r.c0 = sa.profiles.min_tail_rate();
  emit("sigma.csv", sigma_csv(r.sigma, &sa.profiles));
  say("sigma: " + std::to_string(nw) + " wells, c0 " + fmt("%.4f", r.c0));

  Domain D = Domain::disk({0, 0}, cfg.radius);
  auto opt = local_minimize(initial_network(D, cfg.end_angles_deg, cfg.labels, cfg.network_init), r.sigma);
  r.net = opt.net;
  r.F = energy_F(r.net, r.sigma);
  auto diag = validate(r.net);
  add("network_valid", "assert", diag.ok && opt.converged,
      diag.ok ? (opt.converged ? "" : "optimizer did not converge") : diag.failures.front());
  emit("network.json", network_to_json(r.net));
  emit("network.svg", network_to_svg(r.net));
  say("network: F " + fmt("%.9f", r.F));

  std::vector<double> eps_sorted = cfg.epsilons;
  std::sort(eps_sorted.begin(), eps_sorted.end(), std::greater<>());
  std::vector<UpperBoundPoint> ub;
  const double d0 = [&] {
    double d = std::numeric_limits<double>::infinity();
    for (int a = 0; a < nw; ++a)
      for (int b = a + 1; b < nw; ++b) {
        double s = 0;
        for (int i = 0; i < m; ++i) s += std::pow(p.well(a)[i] - p.well(b)[i], 2);
        d = std::min(d, 0.5 * std::sqrt(s));
      }
    return d;
  }();

  for (double eps : eps_sorted) {
    auto t_eps = std::chrono::steady_clock::now();
    EpsilonResult er;
    er.epsilon = eps;
    er.hgrid = cfg.grid_spacing(eps);
    const std::string dir = eps_dir_name(eps);
    fs::create_directories(fs::path(r.out_dir) / dir);
    DomainGrid g = build_disk_grid(cfg.radius, er.hgrid);
    er.cells = g.size();

    auto tm = build_test_map(r.net, sa.profiles, p, g, eps);
    DomainGrid gr = refined_grid(g, cfg.energy_refine);
    auto tmr = build_test_map(r.net, sa.profiles, p, gr, eps);
    er.J_test_grid = tm.energy;
    er.J_test = tmr.energy;
    er.F = r.F;
    er.e = er.J_test - r.F;
    er.parts = breakdown(gr, tmr.u, tmr.region, p, eps);
    er.geom = tmr.geom;
    ub.push_back({eps, gr.h, er.J_test, r.F, er.e, er.parts, er.geom});

    er.delta = std::pow(eps, cfg.alpha);
    BoundaryDatum datum;
    if (cfg.datum == "testmap") {
      datum = datum_from_field(g, tm.u, m);
    } else {
      std::vector<std::pair<double, int>> v;
      for (size_t k = 0; k < cfg.labels.size(); ++k)
        v.push_back({D.param(D.center() + polar(cfg.radius, cfg.end_angles_deg[k] * M_PI / 180)), cfg.labels[k]});
      std::sort(v.begin(), v.end());
      std::vector<double> verts;
      std::vector<int> labs;
      for (auto& [s, l] : v) {
        verts.push_back(s);
        labs.push_back(l);
      }
      datum = build_boundary_datum(g, verts, labs, cfg.transition_C * std::cbrt(eps), sa.profiles, eps, p);
    }
    er.M_prime = std::max(datum.M, p.max_well_norm()) + 0.5;
    er.datum = check_datum(g, datum, p, er.delta, er.M_prime, cfg.transition_C, eps);

    SolverOptions so;
    so.tol = cfg.solver_tol;
    PhaseField best;
    std::vector<std::pair<std::string, std::vector<double>>> seeds;
    for (const auto& s : cfg.seeds) seeds.push_back({s, s == "testmap" ? tm.u : projection_seed(g, datum, p)});
    if (seeds.size() == 1) {
      best = minimize(g, datum, p, eps, so, &seeds[0].second);
      best.seed = seeds[0].first;
    } else {
      best = minimize_multistart(g, datum, p, eps, so, seeds).best;
    }
    er.J = best.energy;
    er.residual = best.residual;
    er.converged = best.converged;
    er.iterations = best.iterations;
    er.seed = best.seed;
    er.max_norm = best.max_norm;
    write_field_bin((fs::path(r.out_dir) / dir / "field.bin").string(), make_dump(g, best.u, m, eps));
    r.files.push_back(dir + "/field.bin");
    if (cfg.write_field_csv) emit(dir + "/field.csv", field_csv(g, best.u, m));
    emit(dir + "/energy_log.csv", energy_log_csv(best.log));

    auto is = extract(g, best.u, p, er.delta, d0);
    auto conn = connectivity_report(g, best.u, p, er.delta, d0, &datum);
    er.measure = is.measure;
    er.interface_components = is.n_interface_components;
    er.phases_connected = conn.all_phases_connected();
    er.near_critical_delta = conn.near_critical_delta;
    emit(dir + "/interface.svg", interface_svg(g, is));
    if (cfg.write_labels_csv) emit(dir + "/labels.csv", labels_csv(g, is));

    FiberOptions fo;
    fo.beta = cfg.fiber_beta;
    fo.alpha = cfg.alpha;
    er.fibers = fiber_lower_bound(g, best.u, p, r.net, r.sigma, eps, fo);
    emit(dir + "/fibers.csv", fibers_csv(er.fibers));

    DecayOptions dopt;
    dopt.C_off = cfg.decay_C_off;
    dopt.node_C = cfg.decay_node_C;
    try {
      er.decay = decay_fit(g, best.u, p, r.net, eps, dopt);
      er.decay_ok = true;
      emit(dir + "/decay.csv", decay_csv(er.decay));
    } catch (const Error& e) {
      er.decay_error = e.what();
    }

    // Network through the measured datum transitions, re-optimized with its
    // ends pinned there.
    auto arcs = measure_datum_arcs(g, datum, p, er.delta);
    Network hat = reparam_to_endpoints(r.net, transition_targets(r.net, arcs), 0.1 * cfg.radius);
    hat = local_minimize(hat, r.sigma).net;
    er.F_hat = energy_F(hat, r.sigma);
    emit(dir + "/network_hat.json", network_to_json(hat));

    er.seconds = seconds_since(t_eps);
    say(fmt("eps %g", eps) + ": cells " + std::to_string(er.cells) + " J " + fmt("%.6f", er.J) + " J_test " +
        fmt("%.6f", er.J_test) + " measure " + fmt("%.5f", er.measure) + " (" + fmt("%.1f", er.seconds) + " s)");
    r.eps.push_back(std::move(er));
  }

  // Sandwich with C1 calibrated at the largest epsilon.
  const auto& e0 = r.eps.front();
  r.C1 = std::max(0.0, (e0.F_hat - e0.J) / std::cbrt(e0.epsilon));
  SandwichBudget budget{r.C1, 0.0, cfg.budget_tol};
  for (auto& er : r.eps) er.sandwich = sandwich_report(er.J, er.F_hat, r.F, er.epsilon, budget, er.J_test_grid);

  for (const auto& er : r.eps) {
    std::string tag = "[eps " + fmt("%g", er.epsilon) + "]";
    add("datum " + tag, "assert", er.datum.ok, er.datum.ok ? "" : er.datum.failures.front());
    add("solver_converged " + tag, "assert", er.converged, "residual " + fmt("%.3e", er.residual));
    add("field_bound " + tag, "assert", er.max_norm <= er.M_prime,
        "max |u| " + fmt("%.6f", er.max_norm) + " vs M' " + fmt("%.6f", er.M_prime));
    add("sandwich " + tag, "assert", er.sandwich.lower_ok && er.sandwich.upper_ok,
        "F_hat - budget " + fmt("%.6f", er.F_hat - er.sandwich.budget) + " <= J " + fmt("%.6f", er.J) +
            " <= J_test " + fmt("%.6f", er.J_test_grid));
    add("connectivity " + tag, "assert", er.interface_components == 1 && er.phases_connected,
        std::to_string(er.interface_components) + " interface components" +
            (er.phases_connected ? "" : ", a phase is disconnected"));
  }

  r.upper = summarize_upper_bound(ub);
  emit("upper_bound.csv", breakdown_csv(r.upper.points));
  if (r.eps.size() >= 3) {
    add("upper_bound_scaling", "fit", r.upper.pass,
        std::string(r.upper.positive ? "" : "e not positive; ") + (r.upper.monotone ? "" : "e not decreasing; ") +
            "q " + fmt("%.3f", r.upper.q));
    std::vector<double> es, ms;
    for (const auto& er : r.eps) {
      es.push_back(er.epsilon);
      ms.push_back(er.measure);
    }
    r.measure = measure_scaling(cfg.alpha, es, ms);
    r.have_measure_fit = true;
    double lo = 0.5, hi = 0.85;
    add("interface_scaling", "fit", r.measure.fit.exponent >= lo && r.measure.fit.exponent <= hi,
        "exponent " + fmt("%.3f", r.measure.fit.exponent) + " (target " + fmt("%.3f", 1 - 2 * cfg.alpha) + ")");
  }

  // Decay: gated on connected phases; each phase R^2 >= 0.9 with negative
  // slope, per-phase k eps stable within 20% between the two smallest eps.
  bool connected = std::all_of(r.eps.begin(), r.eps.end(), [](const auto& e) { return e.phases_connected; });
  for (const auto& er : r.eps) {
    std::string tag = "[eps " + fmt("%g", er.epsilon) + "]";
    if (!connected) {
      add("decay_fit " + tag, "fit", false, "phases not connected", true);
      continue;
    }
    double mr2 = 1.0;
    for (const auto& ph : er.decay.phases)
      if (ph.fitted) mr2 = std::min(mr2, ph.r2);
    add("decay_fit " + tag, "fit", er.decay_ok && er.decay.phases_pass(0.9),
        er.decay_ok ? "min phase R^2 " + fmt("%.4f", mr2) + ", pooled R^2 " + fmt("%.4f", er.decay.r2)
                    : er.decay_error);
  }
  if (connected && r.eps.size() >= 2) {
    const auto& a = r.eps[r.eps.size() - 2];
    const auto& b = r.eps.back();
    bool ok = a.decay_ok && b.decay_ok;
    double worst = 0.0;
    if (ok)
      for (size_t k = 0; k < a.decay.phases.size() && k < b.decay.phases.size(); ++k) {
        const auto &pa = a.decay.phases[k], &pb = b.decay.phases[k];
        if (!pa.fitted || !pb.fitted) continue;
        worst = std::max(worst, std::abs(pb.k_eps - pa.k_eps) / std::abs(pa.k_eps));
      }
    add("decay_stability", "fit", ok && worst <= 0.2, "max relative change of k eps " + fmt("%.4f", worst));
  }

  emit("report.csv", report_csv(r));
  r.seconds = seconds_since(t_run);

  json man;
  man["scenario"] = cfg.name;
  man["config"] = json::parse(scenario_config_json(cfg));
  man["F"] = r.F;
  man["C1"] = r.C1;
  man["checks"] = json::array();
  for (const auto& c : r.checks)
    man["checks"].push_back(
        {{"name", c.name}, {"kind", c.kind}, {"pass", c.pass}, {"skipped", c.skipped}, {"detail", c.detail}});
  man["timing_seconds"] = json::object();
  for (const auto& er : r.eps) man["timing_seconds"][eps_dir_name(er.epsilon)] = er.seconds;
  man["timing_seconds"]["total"] = r.seconds;
  man["status"] = r.assertions_pass() ? (r.all_pass() ? "pass" : "assertions pass, fit checks failed") : "fail";
  r.files.push_back("manifest.json");
  man["files"] = r.files;
  write_text((fs::path(r.out_dir) / "manifest.json").string(), man.dump(2) + "\n");
  return r;
}

std::string report_csv(const RunReport& r) {
  std::ostringstream o;
  o << "scenario,epsilon,hgrid,cells,J,J_test,J_test_grid,F,F_hat,e,budget,lower_ok,upper_ok,delta,measure,"
       "interface_components,phases_connected,fiber_ok_fraction,fiber_min_J,decay_k_eps,decay_r2,converged,"
       "residual,seed\n";
  char buf[768];
  for (const auto& e : r.eps) {
    std::snprintf(buf, sizeof buf,
                  "%s,%.9g,%.9g,%d,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.6g,%d,%d,%.9g,%.9g,%d,%d,%.6g,%.9g,%.6g,%.6g,%d,"
                  "%.3e,%s\n",
                  r.config.name.c_str(), e.epsilon, e.hgrid, e.cells, e.J, e.J_test, e.J_test_grid, e.F, e.F_hat, e.e,
                  e.sandwich.budget, e.sandwich.lower_ok ? 1 : 0, e.sandwich.upper_ok ? 1 : 0, e.delta, e.measure,
                  e.interface_components, e.phases_connected ? 1 : 0, e.fibers.fraction_phases_ok, e.fibers.min_J,
                  e.decay_ok ? e.decay.k_eps : 0.0, e.decay_ok ? e.decay.r2 : 0.0, e.converged ? 1 : 0, e.residual,
                  e.seed.c_str());
    o << buf;
  }
  return o.str();
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string f;
  while (std::getline(ss, f, ',')) out.push_back(f);
  return out;
}

}  // namespace

CompareSummary compare_reports(const std::vector<std::string>& paths) {
  if (paths.size() < 2) throw Error(Errc::IncompatibleReports, "compare needs at least two reports");
  CompareSummary s;
  for (const auto& path : paths) {
    std::stringstream in(read_text(path));
    std::string line;
    if (!std::getline(in, line)) throw Error(Errc::IncompatibleReports, path + " is empty");
    auto head = split(line);
    std::map<std::string, size_t> col;
    for (size_t i = 0; i < head.size(); ++i) col[head[i]] = i;
    for (const char* k : {"scenario", "epsilon", "J", "F", "e", "measure", "interface_components", "phases_connected"})
      if (!col.count(k)) throw Error(Errc::IncompatibleReports, path + " lacks column " + k);
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      auto f = split(line);
      if (f.size() != head.size()) throw Error(Errc::IncompatibleReports, path + " has a malformed row");
      CompareRow row;
      try {
        row.scenario = f[col["scenario"]];
        row.epsilon = std::stod(f[col["epsilon"]]);
        row.J = std::stod(f[col["J"]]);
        row.F = std::stod(f[col["F"]]);
        row.e = std::stod(f[col["e"]]);
        row.measure = std::stod(f[col["measure"]]);
        row.interface_components = std::stoi(f[col["interface_components"]]);
        row.phases_connected = std::stoi(f[col["phases_connected"]]) != 0;
      } catch (const std::exception&) {
        throw Error(Errc::IncompatibleReports, path + " has a non-numeric entry");
      }
      if (s.scenario.empty()) s.scenario = row.scenario;
      if (row.scenario != s.scenario)
        throw Error(Errc::IncompatibleReports, "mixed scenarios: " + s.scenario + " and " + row.scenario);
      s.rows.push_back(row);
    }
  }
  if (s.rows.empty()) throw Error(Errc::IncompatibleReports, "reports contain no rows");
  std::sort(s.rows.begin(), s.rows.end(), [](const auto& a, const auto& b) { return a.epsilon > b.epsilon; });
  s.e_decreasing = true;
  for (size_t i = 1; i < s.rows.size(); ++i)
    if (s.rows[i].epsilon < s.rows[i - 1].epsilon) s.e_decreasing = s.e_decreasing && s.rows[i].e < s.rows[i - 1].e;
  std::vector<double> eps, e, meas;
  for (const auto& row : s.rows) {
    eps.push_back(row.epsilon);
    e.push_back(row.e);
    meas.push_back(row.measure);
  }
  auto distinct = eps;
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() >= 2) {
    if (std::all_of(e.begin(), e.end(), [](double v) { return v > 0; })) {
      double C, r2;
      fit_excess(eps, e, &C, &s.q, &r2);
      s.have_q = true;
    }
    if (std::all_of(meas.begin(), meas.end(), [](double v) { return v > 0; })) {
      s.measure_exponent = power_fit(eps, meas).exponent;
      s.have_measure_exponent = true;
    }
  }
  return s;
}

std::string CompareSummary::table() const {
  std::ostringstream o;
  char buf[256];
  o << "scenario " << scenario << "\n";
  std::snprintf(buf, sizeof buf, "%10s %14s %14s %12s %12s %6s %6s\n", "epsilon", "J", "F", "e", "measure", "comps",
                "conn");
  o << buf;
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%10.4g %14.8f %14.8f %12.6f %12.6f %6d %6s\n", r.epsilon, r.J, r.F, r.e, r.measure,
                  r.interface_components, r.phases_connected ? "yes" : "no");
    o << buf;
  }
  o << "e decreasing: " << (e_decreasing ? "yes" : "no") << "\n";
  if (have_q) o << "q (e = C eps |ln eps|^q): " << fmt("%.4f", q) << "\n";
  if (have_measure_exponent) o << "interface measure exponent: " << fmt("%.4f", measure_exponent) << "\n";
  return o.str();
}

}  // namespace phasenet
