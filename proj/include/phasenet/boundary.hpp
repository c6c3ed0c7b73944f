#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "phasenet/connections.hpp"
#include "phasenet/grid.hpp"
#include "phasenet/potential.hpp"

namespace phasenet {

struct BoundaryArc {
  int label = -1;          // well index, or -1 for a transition arc
  int from = -1, to = -1;  // wells joined by a transition arc
  double s_start = 0.0;    // counterclockwise arclength extent
  double s_end = 0.0;
  double length = 0.0;
};

// Dirichlet data on the boundary cells of a grid. Values are stored per
// domain cell (entries on interior cells are unused).
struct BoundaryDatum {
  int m = 0;
  std::vector<double> values;
  double M = 0.0;  // sup norm of the datum
  std::vector<BoundaryArc> gammas;
  std::vector<BoundaryArc> transitions;

  std::span<const double> at(int cell) const { return {values.data() + cell * m, static_cast<size_t>(m)}; }
};

BoundaryDatum build_boundary_datum(const DomainGrid& grid, const std::vector<double>& vertices,
                                   const std::vector<int>& labels, double transition_width,
                                   const ProfileSet& profiles, double epsilon, const Potential& p);

// Datum sampled from a per-cell field (e.g. the trace of a test map).
BoundaryDatum datum_from_field(const DomainGrid& grid, const std::vector<double>& field, int m);

// Constant datum equal to one well.
BoundaryDatum constant_datum(const DomainGrid& grid, std::span<const double> value);

// Boundary arcs where the datum lies within delta of a well (Gamma_a) and
// the complementary transition arcs (I_a), measured on boundary cells.
struct DatumArcs {
  std::vector<BoundaryArc> gammas;
  std::vector<BoundaryArc> transitions;
  std::vector<int> gamma_runs_per_well;  // number of disjoint arcs per well
};
DatumArcs measure_datum_arcs(const DomainGrid& grid, const BoundaryDatum& datum, const Potential& p, double delta);

struct DatumCheck {
  bool ok = true;
  std::vector<std::string> failures;
};
// |v0| <= M_bound, each Gamma_a a single arc, each |I_a| <= C eps^{1/3}.
DatumCheck check_datum(const DomainGrid& grid, const BoundaryDatum& datum, const Potential& p, double delta,
                       double M_bound, double transition_C, double epsilon);

}  // namespace phasenet
