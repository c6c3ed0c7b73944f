#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "phasenet/boundary.hpp"
#include "phasenet/fit.hpp"
#include "phasenet/grid.hpp"
#include "phasenet/potential.hpp"

namespace phasenet {

// Cells farther than delta from every well form the interface; every other
// cell carries the index of its (unique) nearest well.
struct InterfaceSet {
  double delta = 0.0;
  int wells = 0;
  std::vector<std::uint8_t> interface_mask;  // per domain cell
  std::vector<int> phase_label;              // -1 on interface cells
  std::vector<int> interface_component;      // 8-connectivity, -1 off the interface
  std::vector<int> phase_component;          // 4-connectivity within one phase, -1 on the interface
  int n_interface_components = 0;
  std::vector<int> phase_components;         // per well
  std::vector<int> phase_cells;              // per well
  int interface_cells = 0;
  int adjacent_phase_pairs = 0;              // 4-adjacent cells of distinct phases
  double measure = 0.0;                      // interface cells * h^2
};

// Throws DeltaOutOfRange unless 0 < delta < d0.
InterfaceSet extract(const DomainGrid& g, const std::vector<double>& u, const Potential& p, double delta, double d0);

struct ConnectivityReport {
  int interface_components = 0;
  std::vector<int> phase_components;      // per well
  std::vector<int> complement_components;  // components of the domain minus each phase (4-connectivity)
  std::vector<bool> phase_connected;      // at most one component per well
  std::vector<int> gamma_runs;            // boundary arcs near each well (empty without a datum)
  std::vector<bool> gamma_single_arc;
  bool near_critical_delta = false;       // component counts change at delta (1 +- 1%)
  bool delta_above_delta0 = false;
  std::vector<std::string> warnings;
  bool all_phases_connected() const;
};

ConnectivityReport connectivity_report(const DomainGrid& g, const std::vector<double>& u, const Potential& p,
                                       double delta, double d0, const BoundaryDatum* datum = nullptr,
                                       double delta0 = 0.0);

// Log-log fit of interface measure against epsilon. Needs at least three
// distinct epsilon values with positive measure (else InsufficientData).
struct MeasureScaling {
  double alpha = 0.0;
  std::vector<double> eps;
  std::vector<double> measure;
  PowerFit fit;
};
MeasureScaling measure_scaling(double alpha, const std::vector<double>& eps, const std::vector<double>& measure);

// i,j,x,y,label,interface
std::string labels_csv(const DomainGrid& g, const InterfaceSet& s);
// Phase colouring with the interface band in grey.
std::string interface_svg(const DomainGrid& g, const InterfaceSet& s, int pixels = 480);

}  // namespace phasenet
