#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "phasenet/connections.hpp"
#include "phasenet/geometry.hpp"

namespace phasenet {

enum class NodeKind : std::uint8_t { Branch = 0, End = 1 };

struct NetworkNode {
  Vec2 pos{};
  NodeKind kind = NodeKind::Branch;
};

// Polyline arc from nodes[0] to nodes[1]. phases = {left, right} with
// respect to that direction. A degenerate arc has zero length; its phase
// pair is still meaningful and its orientation is the limiting one.
struct NetworkArc {
  std::array<int, 2> nodes{-1, -1};
  std::array<int, 2> phases{-1, -1};
  std::vector<Vec2> points;
  bool degenerate = false;

  double length() const { return degenerate ? 0.0 : polyline_length(points); }
};

struct Network {
  Domain domain = Domain::disk({0, 0}, 1.0);
  int N = 0;
  int Ntilde = 0;
  std::vector<NetworkNode> nodes;
  std::vector<NetworkArc> arcs;
  int background = -1;  // phase of a network without arcs

  int add_node(Vec2 p, NodeKind kind);
  // Straight arc between two nodes; flagged degenerate when they coincide.
  int add_arc(int a, int b, int left, int right);
  // Rebuild straight polylines from node positions (polyline interiors are
  // discarded) and recompute degenerate flags with tolerance tol.
  void straighten(double tol = 1e-12);

  int branch_count() const;
  int end_count() const;
  std::vector<int> degrees() const;
  // End node indices sorted by counterclockwise boundary arclength.
  std::vector<int> ends_ccw() const;
  // Phase on the boundary arc that starts at end node e and runs ccw.
  int boundary_phase_after(int e) const;
  int incident_arc(int e) const;
};

struct Face {
  int label = -1;  // -2 marks the exterior face
  double area = 0.0;
  std::vector<Vec2> boundary;
};

struct FaceTrace {
  bool consistent = true;
  std::vector<std::string> problems;
  std::vector<Face> faces;  // exterior included
  int vertices = 0;
  int edges = 0;
};

// Planar subdivision of the domain induced by the arcs and boundary arcs,
// with degenerate arcs contracted.
FaceTrace trace_faces(const Network& net);

struct NetworkDiagnostics {
  bool ok = true;
  std::vector<std::string> failures;
  std::vector<std::string> flags;
  int n_branch = 0;
  int n_arcs = 0;
  int n_degenerate = 0;
  std::vector<Face> faces;
  // Area per well (0 for a face that collapsed into degenerate arcs).
  std::vector<double> phase_area;
};

struct ValidateOptions {
  double boundary_tol = 1e-9;  // end nodes on the boundary, relative to scale
  double length_bound = 0.0;   // <= 0 selects 4 * perimeter
};

NetworkDiagnostics validate(const Network& net, const ValidateOptions& opts = {});

double energy_F(const Network& net, const SurfaceTensionMatrix& sigma);

// Sup-norm distance of constant-speed parameterizations, minimized over
// orientation.
double arc_distance(const std::vector<Vec2>& a, const std::vector<Vec2>& b);

// Arc correspondence by unordered phase pair and endpoint kinds; ties are
// broken by nearest endpoints. corr[i] is the arc of b matched to arc i of a.
std::vector<int> arc_correspondence(const Network& a, const Network& b);

double distance(const Network& a, const Network& b, const std::vector<int>& corr);
double distance(const Network& a, const Network& b);

struct JunctionResidual {
  int node = -1;
  double residual = 0.0;               // |sum sigma tau|
  std::array<double, 3> angles{};      // sectors between consecutive arcs, ccw
  std::array<int, 3> arcs{};           // incident arcs in ccw order
  double sine_law_spread = 0.0;        // relative spread of sigma / sin(opposite angle)
};

JunctionResidual junction_angle_residual(const Network& net, const SurfaceTensionMatrix& sigma, int node);
// All branch nodes whose three incident arcs are nondegenerate and which
// lie in the open domain.
std::vector<JunctionResidual> junction_residuals(const Network& net, const SurfaceTensionMatrix& sigma);

// Moves each listed end node to the boundary position with arclength
// targets[node], extending its arc along the boundary.
Network reparam_to_endpoints(const Network& net, const std::map<int, double>& targets, double max_shift);

// Well labelling the face containing x.
int face_label_at(const Network& net, Vec2 x);
double distance_to_network(const Network& net, Vec2 x);

// JSON and SVG.
std::string network_to_json(const Network& net);
Network network_from_json(const std::string& text);
std::string network_to_svg(const Network& net, int pixels = 480);

}  // namespace phasenet
