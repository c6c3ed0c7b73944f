#pragma once

#include <map>
#include <string>
#include <vector>

#include "phasenet/network.hpp"
#include "phasenet/potential.hpp"

namespace phasenet {

struct PotentialSpec {
  std::string kind = "product";  // product | double_well
  std::vector<WellPoint> wells;
  double scale = 1.0;
};

Potential make_potential(const PotentialSpec& s);

struct ScenarioConfig {
  std::string name;
  PotentialSpec potential;
  double radius = 1.0;
  double hgrid = 0.0;         // fixed grid spacing; <= 0 uses grid_ratio
  double grid_ratio = 2.56;   // eps / hgrid
  std::vector<double> end_angles_deg;  // boundary points where the datum changes phase
  std::vector<int> labels;             // well on the boundary arc ccw after each end point
  std::string datum = "testmap";       // testmap | profile
  double transition_C = 1.0;           // profile datum: |I_a| = C eps^{1/3}
  std::vector<double> epsilons;
  double alpha = 1.0 / 6.0;            // delta = eps^alpha
  std::string sigma_source = "computed";  // computed | manual
  std::vector<std::vector<double>> sigma_manual;
  std::string network_init = "auto";      // auto | star | steiner | polygon
  std::vector<std::string> seeds{"testmap"};  // testmap | projection
  double solver_tol = 1e-9;
  int energy_refine = 2;      // test map energy is evaluated on hgrid / energy_refine
  double budget_tol = 1e-6;   // absolute energy slack in the sandwich budget
  double decay_C_off = 0.1;
  double decay_node_C = 1.0;
  double fiber_beta = 1.0 / 3.0;
  bool write_field_csv = false;
  bool write_labels_csv = false;
  std::string output;         // output directory, relative to PHASENET_OUT

  double grid_spacing(double eps) const { return hgrid > 0 ? hgrid : eps / grid_ratio; }
};

// Reads {"potential": {...}} (other keys ignored) or a bare potential object.
PotentialSpec parse_potential_config(const std::string& text);

// Throws ConfigParse on malformed JSON, unknown keys or failed validation.
ScenarioConfig parse_scenario_config(const std::string& text);
ScenarioConfig load_scenario_config(const std::string& path);
// Every field with its resolved value.
std::string scenario_config_json(const ScenarioConfig& c);

// Geometry-only input for the optimize command: either a named scenario
// with parameters or an explicit disk problem.
struct NetworkConfig {
  std::string scenario;
  std::map<std::string, double> params;
  double radius = 1.0;
  std::vector<double> end_angles_deg;
  std::vector<std::vector<double>> sigma;
  double sigma_equal = 0.0;  // > 0 selects equal off-diagonal entries
  std::string init = "auto";
};

NetworkConfig parse_network_config(const std::string& text);

// Initial network with ends at the given angles; labels[k] is the well on
// the boundary arc ccw after the k-th end.
Network initial_network(const Domain& D, const std::vector<double>& end_angles_deg, const std::vector<int>& labels,
                        const std::string& init);

}  // namespace phasenet
