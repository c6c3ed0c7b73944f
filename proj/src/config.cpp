#include "phasenet/config.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <json.hpp>

#include "phasenet/builders.hpp"
#include "phasenet/errors.hpp"
#include "phasenet/field_io.hpp"

namespace phasenet {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& msg) { throw Error(Errc::ConfigParse, msg); }

void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) bad(where + " must be an object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* k) { return it.key() == k; }))
      bad("unknown key '" + it.key() + "' in " + where);
}

template <class T>
void read(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    bad(std::string("bad value for '") + key + "': " + e.what());
  }
}

double normalized_angle(double deg) {
  double t = std::fmod(deg * M_PI / 180.0, 2 * M_PI);
  return t < 0 ? t + 2 * M_PI : t;
}

}  // namespace

Potential make_potential(const PotentialSpec& s) {
  if (s.kind == "double_well") return make_double_well();
  if (s.kind == "product") return make_product_potential(s.wells, s.scale);
  throw Error(Errc::InvalidArgument, "unknown potential kind '" + s.kind + "'");
}

namespace {

PotentialSpec potential_from(const json& p) {
  check_keys(p, "potential", {"kind", "wells", "scale"});
  PotentialSpec s;
  read(p, "kind", s.kind);
  read(p, "wells", s.wells);
  read(p, "scale", s.scale);
  if (s.kind != "product" && s.kind != "double_well") bad("potential kind must be product or double_well");
  if (s.kind == "product" && s.wells.size() < 2) bad("product potential needs two or more wells");
  if (!(s.scale > 0)) bad("potential scale must be positive");
  if (s.kind == "product") {
    size_t m = s.wells[0].size();
    for (const auto& w : s.wells)
      if (w.size() != m || m == 0) bad("wells must share a positive dimension");
  }
  return s;
}

}  // namespace

PotentialSpec parse_potential_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    bad(std::string("malformed config: ") + e.what());
  }
  if (!j.is_object()) bad("potential config must be an object");
  return potential_from(j.contains("potential") ? j["potential"] : j);
}

ScenarioConfig parse_scenario_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    bad(std::string("malformed config: ") + e.what());
  }
  check_keys(j, "config",
             {"name", "potential", "domain", "boundary", "epsilons", "alpha", "sigma", "network", "seeds", "solver",
              "verify", "output"});
  ScenarioConfig c;
  read(j, "name", c.name);
  if (c.name.empty()) bad("config needs a name");

  if (!j.contains("potential")) bad("config needs a potential");
  c.potential = potential_from(j["potential"]);

  if (j.contains("domain")) {
    const auto& d = j["domain"];
    check_keys(d, "domain", {"radius", "hgrid", "grid_ratio"});
    read(d, "radius", c.radius);
    read(d, "hgrid", c.hgrid);
    read(d, "grid_ratio", c.grid_ratio);
  }
  if (!(c.radius > 0)) bad("domain radius must be positive");

  if (!j.contains("boundary")) bad("config needs a boundary");
  const auto& b = j["boundary"];
  check_keys(b, "boundary", {"end_angles_deg", "labels", "datum", "transition_C"});
  read(b, "end_angles_deg", c.end_angles_deg);
  read(b, "labels", c.labels);
  read(b, "datum", c.datum);
  read(b, "transition_C", c.transition_C);

  read(j, "epsilons", c.epsilons);
  read(j, "alpha", c.alpha);
  if (j.contains("sigma")) {
    const auto& s = j["sigma"];
    if (s.is_string()) {
      c.sigma_source = s.get<std::string>();
    } else {
      check_keys(s, "sigma", {"manual"});
      c.sigma_source = "manual";
      read(s, "manual", c.sigma_manual);
    }
  }
  if (j.contains("network")) {
    const auto& n = j["network"];
    check_keys(n, "network", {"init"});
    read(n, "init", c.network_init);
  }
  read(j, "seeds", c.seeds);
  if (j.contains("solver")) {
    const auto& s = j["solver"];
    check_keys(s, "solver", {"tol"});
    read(s, "tol", c.solver_tol);
  }
  if (j.contains("verify")) {
    const auto& v = j["verify"];
    check_keys(v, "verify",
               {"energy_refine", "budget_tol", "decay_C_off", "decay_node_C", "fiber_beta", "write_field_csv",
                "write_labels_csv"});
    read(v, "energy_refine", c.energy_refine);
    read(v, "budget_tol", c.budget_tol);
    read(v, "decay_C_off", c.decay_C_off);
    read(v, "decay_node_C", c.decay_node_C);
    read(v, "fiber_beta", c.fiber_beta);
    read(v, "write_field_csv", c.write_field_csv);
    read(v, "write_labels_csv", c.write_labels_csv);
  }
  read(j, "output", c.output);

  // Cross-field validation.
  int nw = c.potential.kind == "double_well" ? 2 : static_cast<int>(c.potential.wells.size());
  if (!(c.alpha > 0 && c.alpha < 0.5)) bad("validation: alpha must lie in (0, 1/2)");
  if (c.epsilons.empty()) bad("validation: epsilon list is empty");
  for (double e : c.epsilons) {
    if (!(e > 0 && e < 1)) bad("validation: every epsilon must lie in (0, 1)");
    if (e < 2 * c.grid_spacing(e)) bad("validation: epsilon below twice the grid spacing");
  }
  if (c.hgrid <= 0 && !(c.grid_ratio >= 2)) bad("validation: grid_ratio must be at least 2");
  if (c.end_angles_deg.size() != c.labels.size()) bad("validation: one label per boundary end point");
  if (static_cast<int>(c.labels.size()) != nw) bad("validation: every well needs exactly one boundary arc");
  std::set<int> seen;
  for (int l : c.labels) {
    if (l < 0 || l >= nw) bad("validation: label " + std::to_string(l) + " does not index a well");
    if (!seen.insert(l).second) bad("validation: label " + std::to_string(l) + " repeats");
  }
  std::set<long long> ang;
  for (double a : c.end_angles_deg)
    if (!ang.insert(std::llround(normalized_angle(a) * 1e9)).second) bad("validation: repeated end angle");
  if (c.datum != "testmap" && c.datum != "profile") bad("validation: datum must be testmap or profile");
  if (!(c.transition_C > 0)) bad("validation: transition_C must be positive");
  if (c.sigma_source != "computed" && c.sigma_source != "manual") bad("validation: sigma must be computed or manual");
  if (c.sigma_source == "manual") {
    if (static_cast<int>(c.sigma_manual.size()) != nw) bad("validation: manual sigma must be N x N");
    for (const auto& r : c.sigma_manual)
      if (static_cast<int>(r.size()) != nw) bad("validation: manual sigma must be N x N");
  }
  static const std::set<std::string> inits{"auto", "star", "steiner", "polygon"};
  if (!inits.count(c.network_init)) bad("validation: unknown network init '" + c.network_init + "'");
  if (c.seeds.empty()) bad("validation: seed list is empty");
  for (const auto& s : c.seeds)
    if (s != "testmap" && s != "projection") bad("validation: unknown seed '" + s + "'");
  if (!(c.solver_tol > 0)) bad("validation: solver tol must be positive");
  if (c.energy_refine < 1) bad("validation: energy_refine must be at least 1");
  if (!(c.budget_tol >= 0)) bad("validation: budget_tol must be nonnegative");
  if (!(c.fiber_beta > 0 && c.fiber_beta < 1)) bad("validation: fiber_beta must lie in (0, 1)");
  return c;
}

ScenarioConfig load_scenario_config(const std::string& path) {
  std::string text;
  try {
    text = read_text(path);
  } catch (const Error& e) {
    bad(e.what());
  }
  return parse_scenario_config(text);
}

std::string scenario_config_json(const ScenarioConfig& c) {
  json j;
  j["name"] = c.name;
  j["potential"] = {{"kind", c.potential.kind}, {"wells", c.potential.wells}, {"scale", c.potential.scale}};
  j["domain"] = {{"radius", c.radius}, {"hgrid", c.hgrid}, {"grid_ratio", c.grid_ratio}};
  j["boundary"] = {{"end_angles_deg", c.end_angles_deg},
                   {"labels", c.labels},
                   {"datum", c.datum},
                   {"transition_C", c.transition_C}};
  j["epsilons"] = c.epsilons;
  j["alpha"] = c.alpha;
  if (c.sigma_source == "manual")
    j["sigma"] = {{"manual", c.sigma_manual}};
  else
    j["sigma"] = c.sigma_source;
  j["network"] = {{"init", c.network_init}};
  j["seeds"] = c.seeds;
  j["solver"] = {{"tol", c.solver_tol}};
  j["verify"] = {{"energy_refine", c.energy_refine},   {"budget_tol", c.budget_tol},
                 {"decay_C_off", c.decay_C_off},       {"decay_node_C", c.decay_node_C},
                 {"fiber_beta", c.fiber_beta},         {"write_field_csv", c.write_field_csv},
                 {"write_labels_csv", c.write_labels_csv}};
  j["output"] = c.output;
  return j.dump(2);
}

NetworkConfig parse_network_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    bad(std::string("malformed config: ") + e.what());
  }
  check_keys(j, "network config", {"scenario", "params", "radius", "end_angles_deg", "sigma", "init"});
  NetworkConfig c;
  read(j, "scenario", c.scenario);
  read(j, "params", c.params);
  if (!c.scenario.empty()) return c;
  read(j, "radius", c.radius);
  read(j, "end_angles_deg", c.end_angles_deg);
  read(j, "init", c.init);
  if (j.contains("sigma")) {
    if (j["sigma"].is_number())
      c.sigma_equal = j["sigma"].get<double>();
    else
      read(j, "sigma", c.sigma);
  }
  if (!(c.radius > 0)) bad("radius must be positive");
  if (c.end_angles_deg.size() < 2) bad("need at least two end angles");
  int N = static_cast<int>(c.end_angles_deg.size());
  if (c.sigma_equal <= 0) {
    if (static_cast<int>(c.sigma.size()) != N) bad("sigma must be a number or an N x N matrix");
    for (const auto& r : c.sigma)
      if (static_cast<int>(r.size()) != N) bad("sigma must be a number or an N x N matrix");
  }
  return c;
}

Network initial_network(const Domain& D, const std::vector<double>& end_angles_deg, const std::vector<int>& labels,
                        const std::string& init) {
  const int N = static_cast<int>(end_angles_deg.size());
  if (static_cast<int>(labels.size()) != N) throw Error(Errc::InvalidArgument, "one label per end point");
  std::vector<std::pair<double, int>> v;
  for (int k = 0; k < N; ++k) v.push_back({normalized_angle(end_angles_deg[k]), labels[k]});
  std::sort(v.begin(), v.end());
  std::vector<double> ang;
  for (auto& [a, l] : v) ang.push_back(a);
  std::string kind = init;
  if (kind == "auto") kind = N == 3 ? "star" : N == 4 ? "steiner" : "polygon";
  Network net;
  if (kind == "star")
    net = star_network(D, ang, D.center() + 0.1 * D.radius() * Vec2{1, 0});
  else if (kind == "steiner")
    net = n4_steiner_init(D, ang);
  else if (kind == "polygon")
    net = polygon_network(D, ang);
  else
    throw Error(Errc::InvalidArgument, "unknown network init '" + init + "'");
  // Builders put phase k on the arc after the k-th end in ccw order.
  for (auto& a : net.arcs)
    for (int& ph : a.phases)
      if (ph >= 0 && ph < N) ph = v[ph].second;
  return net;
}

}  // namespace phasenet
