#pragma once

#include <cmath>
#include <vector>

namespace phasenet {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
inline Vec2 operator/(Vec2 a, double s) { return {a.x / s, a.y / s}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline Vec2 unit(Vec2 a) { return a / norm(a); }
inline Vec2 perp(Vec2 a) { return {-a.y, a.x}; }  // left normal
inline Vec2 polar(double r, double theta) { return {r * std::cos(theta), r * std::sin(theta)}; }
inline Vec2 rotate(Vec2 a, double th) {
  double c = std::cos(th), s = std::sin(th);
  return {c * a.x - s * a.y, s * a.x + c * a.y};
}

// Closest-point parameter t in [0,1] along segment ab and the distance.
double segment_distance(Vec2 p, Vec2 a, Vec2 b, double* t_out = nullptr);

// Proper or touching intersection of closed segments.
bool segments_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d);

double polyline_length(const std::vector<Vec2>& pts);

// Point at arclength fraction s in [0,1] of the polyline.
Vec2 polyline_at(const std::vector<Vec2>& pts, double s);

double polygon_area(const std::vector<Vec2>& pts);

// Convex planar domain: a disk or an axis-aligned rectangle. Boundary
// arclength is measured counterclockwise (disk: from angle 0; rect: from
// the lower-left corner).
class Domain {
public:
  enum class Kind { Disk, Rect };

  static Domain disk(Vec2 center, double radius);
  static Domain rect(Vec2 lo, Vec2 hi);

  Kind kind() const { return kind_; }
  Vec2 center() const { return center_; }
  double radius() const { return radius_; }
  Vec2 lo() const { return lo_; }
  Vec2 hi() const { return hi_; }

  bool contains(Vec2 p, double tol = 0.0) const;
  // Distance from an inside point to the boundary (negative outside).
  double boundary_distance(Vec2 p) const;
  double perimeter() const;
  double diameter() const;
  // Characteristic length (disk radius, rect half-diagonal).
  double scale() const;
  double param(Vec2 p) const;
  Vec2 point_at(double s) const;
  Vec2 tangent_at(double s) const;
  Vec2 project_to_boundary(Vec2 p) const;
  Vec2 clamp_inside(Vec2 p) const;
  // Counterclockwise boundary path from s0 to s1 (s1 taken modulo perimeter
  // so that the path length lies in [0, perimeter)).
  std::vector<Vec2> boundary_path(double s0, double s1, int min_points = 2) const;
  // Counterclockwise arclength from s0 to s1 in [0, perimeter).
  double ccw_gap(double s0, double s1) const;
  // Signed shortest arclength from s0 to s1 in (-P/2, P/2].
  double signed_gap(double s0, double s1) const;

private:
  Kind kind_ = Kind::Disk;
  Vec2 center_{};
  double radius_ = 1.0;
  Vec2 lo_{}, hi_{};
};

}  // namespace phasenet
