#pragma once

#include <string>
#include <utility>
#include <vector>

#include "phasenet/boundary.hpp"
#include "phasenet/grid.hpp"
#include "phasenet/potential.hpp"

namespace phasenet {

struct EnergyLogEntry {
  int iteration = 0;
  std::string phase;
  double energy = 0.0;
  double residual = 0.0;
};

struct SolverOptions {
  double tol = 0.0;  // residual tolerance; <= 0 selects 1e-6 / epsilon
  int max_iter = 200000;
  int max_flow_steps = 400;
  double flow_switch = 1e-6;  // relative energy decrease that ends the flow phase
  double stab = 0.0;          // convex-splitting constant; <= 0 selects max W_zz eigenvalue at the wells
  int cg_max = 2000;
  bool newton = true;
  bool log = true;
};

// Discrete field on all domain cells (boundary cells hold the datum).
struct PhaseField {
  int m = 0;
  double epsilon = 0.0;
  std::vector<double> u;
  double energy = 0.0;
  double residual = 0.0;
  double max_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  std::string seed;
  std::vector<EnergyLogEntry> log;
};

// Sum over domain cells of h^2 W(u)/eps plus, over grid edges joining two
// domain cells, eps |u_i - u_j|^2 / 2.
double energy_of(const DomainGrid& g, const std::vector<double>& u, const Potential& p, double eps);

// Per-cell split of energy_of: each cell carries its W term and half of
// every incident edge term.
std::vector<double> cell_energy(const DomainGrid& g, const std::vector<double>& u, const Potential& p, double eps);

// Gradient of energy_of with respect to interior values (zero elsewhere).
void energy_gradient(const DomainGrid& g, const std::vector<double>& u, const Potential& p, double eps,
                     std::vector<double>& grad);

// max over interior cells of |eps^2 Lap_h u - W_z(u)|.
double el_residual(const DomainGrid& g, const std::vector<double>& u, const Potential& p, double eps);

// Each interior cell takes the well nearest to the datum at the closest
// boundary cell.
std::vector<double> projection_seed(const DomainGrid& g, const BoundaryDatum& datum, const Potential& p);

PhaseField minimize(const DomainGrid& g, const BoundaryDatum& datum, const Potential& p, double eps,
                    const SolverOptions& opts = {}, const std::vector<double>* init = nullptr);

struct MultiStartResult {
  PhaseField best;
  std::vector<std::pair<std::string, double>> energies;
};

MultiStartResult minimize_multistart(const DomainGrid& g, const BoundaryDatum& datum, const Potential& p, double eps,
                                     const SolverOptions& opts,
                                     const std::vector<std::pair<std::string, std::vector<double>>>& seeds);

}  // namespace phasenet
