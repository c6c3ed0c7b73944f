#pragma once

#include <functional>
#include <string>
#include <vector>

#include "phasenet/config.hpp"
#include "phasenet/connections.hpp"
#include "phasenet/interface.hpp"
#include "phasenet/network.hpp"
#include "phasenet/testmap.hpp"
#include "phasenet/verify.hpp"

namespace phasenet {

struct EpsilonResult {
  double epsilon = 0.0;
  double hgrid = 0.0;
  int cells = 0;
  // Test map energy on hgrid / energy_refine and on the solver grid.
  double J_test = 0.0, J_test_grid = 0.0;
  double F = 0.0, e = 0.0;
  EnergyBreakdown parts;
  TestMapGeometry geom;
  // Best-found minimizer.
  double J = 0.0;
  double residual = 0.0;
  bool converged = false;
  int iterations = 0;
  std::string seed;
  double max_norm = 0.0, M_prime = 0.0;
  DatumCheck datum;
  double delta = 0.0;
  double measure = 0.0;
  int interface_components = 0;
  bool phases_connected = false;
  bool near_critical_delta = false;
  FiberReport fibers;
  DecayFit decay;
  bool decay_ok = false;  // decay_fit ran
  std::string decay_error;
  double F_hat = 0.0;     // network with ends at the measured datum transitions
  SandwichReport sandwich;
  double seconds = 0.0;
};

struct RunCheck {
  std::string name;
  std::string kind;  // assert: run invariant; fit: scaling criterion
  bool pass = false;
  bool skipped = false;
  std::string detail;
};

struct RunReport {
  ScenarioConfig config;
  SurfaceTensionMatrix sigma;
  Network net;  // free optimal network
  double F = 0.0;
  double c0 = 0.0;
  std::vector<EpsilonResult> eps;
  UpperBoundFit upper;
  double C1 = 0.0;
  bool have_measure_fit = false;
  MeasureScaling measure;
  std::vector<RunCheck> checks;
  std::string out_dir;
  std::vector<std::string> files;  // relative to out_dir
  double seconds = 0.0;

  bool assertions_pass() const;
  bool all_pass() const;
  const RunCheck* check(const std::string& name) const;
};

using LogFn = std::function<void(const std::string&)>;

// $PHASENET_OUT, or "out" when unset.
std::string output_root();

// Full chain for one config: sigma, free network, then per epsilon the test
// map, datum, solve, interface, fibers, decay and sandwich. Writes all
// artifacts under out_root / (config.output or config.name).
RunReport run_pipeline(const ScenarioConfig& cfg, const std::string& out_root, const LogFn& log = {});

std::string report_csv(const RunReport& r);
std::string sigma_csv(const SurfaceTensionMatrix& s, const ProfileSet* profiles = nullptr);

// Cross-epsilon table from two or more report.csv files of one scenario.
// Throws IncompatibleReports.
struct CompareRow {
  std::string scenario;
  double epsilon = 0.0, J = 0.0, F = 0.0, e = 0.0, measure = 0.0;
  int interface_components = 0;
  bool phases_connected = false;
};
struct CompareSummary {
  std::string scenario;
  std::vector<CompareRow> rows;  // decreasing epsilon
  bool e_decreasing = false;
  bool have_q = false;
  double q = 0.0;
  bool have_measure_exponent = false;
  double measure_exponent = 0.0;
  std::string table() const;
};
CompareSummary compare_reports(const std::vector<std::string>& paths);

}  // namespace phasenet
