#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "phasenet/connections.hpp"
#include "phasenet/field_solver.hpp"
#include "phasenet/grid.hpp"
#include "phasenet/network.hpp"

namespace phasenet {

struct TestMapParams {
  double kappa0 = 0.0;  // <= 0 selects 2 / c0, c0 the slowest profile tail rate
  double alpha0 = 0.0;  // <= 0 selects the smallest angle between arcs at a ball centre
  bool enforce = true;  // throw GeometryConflict when the size invariants fail
};

struct TestMapGeometry {
  double epsilon = 0.0;
  double kappa0 = 0.0;
  double alpha0 = 0.0;
  double h = 0.0;    // kappa0 eps |ln eps|
  double rho = 0.0;  // 4 h / sin(alpha0 / 2)
  std::vector<Vec2> centers;  // ball centres: distinct endpoints of nondegenerate arcs
  double min_arc = 0.0;
  double min_center_gap = 0.0;
  bool invariants_ok = true;
  std::vector<std::string> problems;
};

enum class TestRegion : std::uint8_t { Exterior = 0, Strip = 1, Blend = 2, Ball = 3 };

class TestMap {
public:
  TestMap(const Network& net, const ProfileSet& profiles, const Potential& p, double epsilon,
          const TestMapParams& params = {});

  const TestMapGeometry& geometry() const { return geom_; }
  int dim() const { return m_; }
  // Value at x; *conflict is set when x lies in the strips of two arcs
  // outside every ball.
  TestRegion eval(Vec2 x, std::span<double> out, bool* conflict = nullptr) const;

private:
  struct Seg {
    Vec2 p1, tau, nu;
    double len;
    int a, a_prime;  // left and right phases
  };
  TestRegion outside_balls(Vec2 x, std::span<double> out, bool* conflict) const;

  const Network* net_;
  const ProfileSet* profiles_;
  const Potential* pot_;
  int m_ = 0;
  std::vector<Seg> segs_;
  TestMapGeometry geom_;
};

struct TestMapField {
  std::vector<double> u;
  std::vector<TestRegion> region;
  TestMapGeometry geom;
  double energy = 0.0;
};

// Samples the test map at cell centres; GeometryConflict if strips of
// distinct arcs overlap outside the balls at some cell.
TestMapField build_test_map(const Network& net, const ProfileSet& profiles, const Potential& p,
                            const DomainGrid& g, double epsilon, const TestMapParams& params = {});

struct EnergyBreakdown {
  double strip = 0.0, blend = 0.0, ball = 0.0, exterior = 0.0, total = 0.0;
};
EnergyBreakdown breakdown(const DomainGrid& g, const std::vector<double>& u, const std::vector<TestRegion>& region,
                          const Potential& p, double epsilon);

// Same domain with spacing h / factor.
DomainGrid refined_grid(const DomainGrid& g, int factor);

struct UpperBoundPoint {
  double epsilon = 0.0;
  double hgrid = 0.0;  // grid the energy was evaluated on
  double J = 0.0;
  double F = 0.0;
  double e = 0.0;
  EnergyBreakdown parts;
  TestMapGeometry geom;
};

struct UpperBoundFit {
  std::vector<UpperBoundPoint> points;
  double C = 0.0, q = 0.0, r2 = 0.0;  // e = C eps |ln eps|^q
  bool positive = false;
  bool monotone = false;
  bool pass = false;
};

// e(eps) = J(u_test) - F on grids of spacing hgrid[i] / refine. Throws
// NegativeExcessBeyondTolerance when e < -negative_tol * F.
UpperBoundFit verify_upper_bound(const Network& net, const SurfaceTensionMatrix& sigma, const ProfileSet& profiles,
                                 const Potential& p, const std::vector<double>& eps_list,
                                 const std::vector<double>& hgrid, const TestMapParams& params = {}, int refine = 2,
                                 double negative_tol = 0.01);

// Positivity, monotonicity in eps and the exponent fit over given points.
UpperBoundFit summarize_upper_bound(std::vector<UpperBoundPoint> points);

// e = C eps |ln eps|^q fitted by least squares on log(e / eps).
void fit_excess(const std::vector<double>& eps, const std::vector<double>& e, double* C, double* q, double* r2);

std::string breakdown_csv(const std::vector<UpperBoundPoint>& pts);

}  // namespace phasenet
