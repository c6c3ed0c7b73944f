#pragma once

#include <array>
#include <vector>

#include "phasenet/connections.hpp"
#include "phasenet/network.hpp"

namespace phasenet {

// Boundary point of a disk at polar angle theta (radians).
Vec2 disk_point(const Domain& D, double theta);

// Tree network with N = Ntilde = ends.size(). Node indices: ends first,
// then branches. Phases follow assign_boundary_phases.
Network tree_network(const Domain& D, const std::vector<Vec2>& ends, const std::vector<Vec2>& branches,
                     const std::vector<std::array<int, 2>>& edges);

// For a tree whose wells all meet the boundary: the boundary arc that
// starts at the k-th end node (ccw order) carries phase k, and the path
// from that end node to the next one has phase k on its right.
void assign_boundary_phases(Network& net);

// Single branch node joined to every end node (N = 3 star).
Network star_network(const Domain& D, const std::vector<double>& end_angles, Vec2 center);

// Polygon through the end points with the side from vertex `removed` to
// the next one taken out; remaining vertices are branch nodes joined to
// their end nodes by degenerate arcs.
Network polygon_network(const Domain& D, const std::vector<double>& end_angles, int removed = 0);

// Regular end angles pi/2 + 2 pi k / N.
std::vector<double> regular_angles(int N, double offset = M_PI / 2);

// Radial arcs to branch nodes at distance ell on the end rays, joined by an
// interior polygon. Boundary arc k (ccw from the k-th end) carries
// boundary_labels[k] (default k); the polygon carries `interior` (default N).
Network interior_polygon_network(const Domain& D, std::vector<double> end_angles, double ell,
                                 std::vector<int> boundary_labels = {}, int interior = -1);

// Full Steiner topologies used as initial guesses.
Network n4_steiner_init(const Domain& D, const std::vector<double>& end_angles);
Network n5_steiner_init(double R);
Network n6_g1(double R);
Network n6_g2(double R);

// Wells 0 (interior) and a, b, c = 1, 2, 3 with sigma_ab = sigma, sigma_0a = sigma0.
SurfaceTensionMatrix n4_sigma(double sigma, double sigma0);
// Interior phase 0; boundary phases 1..3 on arcs centred at 150, 270, 30 degrees.
Network n4_family(double R, double ell);

// Seven-well Z3 problem on the unit disk scaled by R. Wells: 0, a, b, c,
// a', b', c' = 0..6. Boundary arcs a, b, c are centred at 30, 150, 270
// degrees; end points sit at 90, 210, 330 degrees.
struct N7Sigma {
  double sigma = 0, sigma0 = 1, tau = 0, tau0 = 0, sigma00 = 0, sigma_prime = 1.5;
  SurfaceTensionMatrix matrix() const;
};
N7Sigma n7_equality_sigma(double psi);
N7Sigma n7_strict_sigma(double psi, double margin = 0.1);

double n7_g(double psi);
// Tip distance of the star for branch nodes at distance d.
double n7_tip(double psi, double d);

// Case I: branch nodes p at distance dp, star tips at dtip, triangle
// vertices at dT (all on their rays).
Network n7_case1_explicit(double dp, double dtip, double dT, double R = 1.0);
Network n7_case1(double psi, double d, double ell, double R = 1.0);
// Case II: p at distance dp, the pair next to the top p given explicitly
// (left member near 150 degrees, right near 30 degrees); images by rotation.
Network n7_case2_explicit(double dp, Vec2 left, Vec2 right, double R = 1.0);
Network n7_case2(double psi, double d, double ell, double R = 1.0);
double n7_equal_F(double psi);  // 6 cos psi

Network n7_G0(double psi, double R = 1.0);
Network n7_Gstar(double psi, double R = 1.0);
Network n7_Gtri(double psi, double R = 1.0);
// Perturbations of the triangle network: type I moves p inward by h and
// the triangle vertices inward by s; type II also splits each tip.
Network n7_type1(double psi, double h, double s, double R = 1.0);
Network n7_type2(double psi, double h, double rho, double beta, double R = 1.0);
// First-order coefficient of the type II variation per unit rho (times 6).
double n7_type2_rate(const N7Sigma& s, double psi, double beta);

}  // namespace phasenet
