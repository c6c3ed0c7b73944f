#pragma once

#include <map>
#include <string>
#include <vector>

#include "phasenet/network.hpp"

namespace phasenet {

struct ScenarioCandidate {
  std::string name;
  double F = 0.0;
  double c0 = 0.0;
  int flat_directions = 0;
  bool converged = true;
  Network net;
};

struct ScenarioCheck {
  std::string claim;
  bool pass = false;
  std::string detail;
};

struct ScenarioReport {
  std::string name;
  std::map<std::string, double> params;
  std::vector<ScenarioCandidate> candidates;
  int winner = -1;
  std::string classification;
  std::vector<ScenarioCheck> checks;
  std::map<std::string, double> values;

  bool passed() const;
  const ScenarioCandidate& best() const { return candidates.at(winner); }
};

// Scenarios: polygon_equal_sigma, n4_interior_phase, n7_z3. Unset params
// take defaults (see scenario_defaults). When throw_on_fail is set a failed
// check raises AssertionFailure naming the claim.
ScenarioReport run_scenario(const std::string& name, const std::map<std::string, double>& params = {},
                            bool throw_on_fail = true);

std::map<std::string, double> scenario_defaults(const std::string& name);

// Ratio sigma / sigma0 at which the N = 4 optimizer winner switches from
// the collapsed network to the one with a full interior triangle.
double n4_bisect_threshold(double sigma0, double lo, double hi, double tol, double R = 1.0);

// candidate,F,c0,flat_directions,converged
std::string scenario_csv(const ScenarioReport& r);

}  // namespace phasenet
