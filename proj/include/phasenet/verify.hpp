#pragma once

#include <string>
#include <vector>

#include "phasenet/connections.hpp"
#include "phasenet/grid.hpp"
#include "phasenet/network.hpp"
#include "phasenet/potential.hpp"

namespace phasenet {

struct FiberSample {
  int arc = -1;
  double s = 0.0;  // arclength of the base point
  Vec2 x{};
  Vec2 nu{};       // left normal of the arc
  double half_length = 0.0;
  double J = 0.0;
  bool phases_ok = false;  // ends near the right (-nu) and left (+nu) phases
  bool near_branch = false;
  double sigma = 0.0;
};

struct FiberOptions {
  double beta = 1.0 / 3.0;     // half-length eps^beta
  double spacing = 0.0;        // base point spacing; <= 0 selects 2 * grid spacing
  double branch_C = 1.0;       // exclusion radius branch_C * eps^{1/2 - alpha}
  double alpha = 1.0 / 6.0;    // delta = eps^alpha
  int samples = 0;             // points per fiber; <= 0 selects spacing h / 4
};

struct FiberReport {
  std::vector<FiberSample> fibers;
  int outside = 0;             // fibers dropped because they leave the grid
  double fraction_phases_ok = 0.0;
  double min_J = 0.0, mean_J = 0.0;
  double delta = 0.0;
  // Over fibers away from branch points: min of (J_x - sigma) / delta^2.
  double min_normalized_gap = 0.0;
  double covered_length = 0.0;     // sum of spacing over kept fibers
  double sigma_covered = 0.0;      // sum of sigma * spacing
  double fiber_energy = 0.0;       // sum of J_x * spacing
};

// Throws FiberOutsideGrid when no fiber lies inside the grid.
FiberReport fiber_lower_bound(const DomainGrid& g, const std::vector<double>& u, const Potential& p,
                              const Network& net, const SurfaceTensionMatrix& sigma, double eps,
                              const FiberOptions& opts = {});

// 1D energy of samples along a segment of length L (eps |u'|^2 / 2 + W / eps).
double fiber_energy(const Potential& p, const std::vector<double>& samples, int m, double L, double eps);

struct SandwichBudget {
  double C1 = 0.0;    // lower bound constant for eps^{1/3}
  double C_ub = 0.0;  // upper bound constant for eps |ln eps|^2
  double tol = 0.0;   // solver tolerance added to the budget
};

struct SandwichReport {
  double J = 0.0, F_hat = 0.0, F_free = 0.0, J_test = 0.0, eps = 0.0;
  double budget = 0.0;
  bool lower_ok = false;   // J >= F_hat - budget
  bool upper_ok = false;   // J <= J_test (or F_free + budget without a test map)
  bool network_ok = false; // F_hat - F_free <= budget
  bool pass() const { return lower_ok && upper_ok && network_ok; }
};

double sandwich_budget(const SandwichBudget& b, double eps);

// J_test <= 0 selects the F_free + budget upper bound. Throws
// SandwichViolation on failure when throw_on_fail is set.
SandwichReport sandwich_report(double J, double F_hat, double F_free, double eps, const SandwichBudget& b,
                               double J_test = 0.0, bool throw_on_fail = false);

struct PhaseDecay {
  int well = -1;
  int cells = 0;
  bool fitted = false;
  double slope = 0.0;       // d log|u - a| / d dist
  double intercept = 0.0;
  double r2 = 0.0;
  double k_eps = 0.0;       // -slope * eps
};

// Fit restricted to the cells of one face whose nearest arc is `arc`. A
// shifted interface moves the intercept but not the slope.
struct SideDecay {
  int arc = -1;
  int well = -1;
  int cells = 0;
  double k_eps = 0.0, intercept = 0.0, r2 = 0.0;
};

struct DecayOptions {
  double C_off = 0.1;       // cells need dist > C_off eps^{1/6}
  double floor = 1e-11;     // |u - a| must exceed this
  int min_cells = 10;
  // Cells within node_C * eps^{1/3} of a network node are dropped (junction
  // cores and end points, where the field is not a 1D tail). 0 keeps them.
  double node_C = 1.0;
};

struct DecayFit {
  double eps = 0.0;
  double offset = 0.0;
  std::vector<PhaseDecay> phases;
  std::vector<SideDecay> sides;
  double k_eps = 0.0;  // pooled fit over all phases
  double r2 = 0.0;
  int cells = 0;
  std::vector<double> dist, log_dev;  // pooled scatter
  // Every fitted phase has r2 >= min_r2 and a negative slope.
  bool phases_pass(double min_r2 = 0.9) const;
};

// Regresses log|u - a| on the distance to the network over interior cells
// of each face S_a that are at least as far from the domain boundary as
// from the network. Throws TooFewQualifyingCells if no phase has enough.
DecayFit decay_fit(const DomainGrid& g, const std::vector<double>& u, const Potential& p, const Network& net,
                   double eps, const DecayOptions& opts = {});

std::string fibers_csv(const FiberReport& r);
std::string decay_csv(const DecayFit& f);

}  // namespace phasenet
