#include "phasenet/geometry.hpp"

#include <algorithm>
#include <numbers>

#include "phasenet/errors.hpp"

namespace phasenet {

double segment_distance(Vec2 p, Vec2 a, Vec2 b, double* t_out) {
  Vec2 d = b - a;
  double L2 = dot(d, d);
  double t = 0.0;
  if (L2 > 0.0) t = std::clamp(dot(p - a, d) / L2, 0.0, 1.0);
  if (t_out) *t_out = t;
  return norm(p - (a + t * d));
}

static int orient(Vec2 a, Vec2 b, Vec2 c) {
  double v = cross(b - a, c - a);
  double s = 1e-14 * (norm(b - a) + norm(c - a) + 1e-300);
  if (v > s) return 1;
  if (v < -s) return -1;
  return 0;
}

static bool on_segment(Vec2 a, Vec2 b, Vec2 p) {
  return std::min(a.x, b.x) - 1e-14 <= p.x && p.x <= std::max(a.x, b.x) + 1e-14 &&
         std::min(a.y, b.y) - 1e-14 <= p.y && p.y <= std::max(a.y, b.y) + 1e-14;
}

bool segments_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  int o1 = orient(a, b, c), o2 = orient(a, b, d);
  int o3 = orient(c, d, a), o4 = orient(c, d, b);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(a, b, c)) return true;
  if (o2 == 0 && on_segment(a, b, d)) return true;
  if (o3 == 0 && on_segment(c, d, a)) return true;
  if (o4 == 0 && on_segment(c, d, b)) return true;
  return false;
}

double polyline_length(const std::vector<Vec2>& pts) {
  double L = 0.0;
  for (size_t i = 1; i < pts.size(); ++i) L += norm(pts[i] - pts[i - 1]);
  return L;
}

Vec2 polyline_at(const std::vector<Vec2>& pts, double s) {
  if (pts.empty()) return {};
  double L = polyline_length(pts);
  if (L <= 0.0 || pts.size() == 1) return pts.front();
  double target = std::clamp(s, 0.0, 1.0) * L;
  double acc = 0.0;
  for (size_t i = 1; i < pts.size(); ++i) {
    double seg = norm(pts[i] - pts[i - 1]);
    if (acc + seg >= target && seg > 0.0) {
      double t = (target - acc) / seg;
      return pts[i - 1] + t * (pts[i] - pts[i - 1]);
    }
    acc += seg;
  }
  return pts.back();
}

double polygon_area(const std::vector<Vec2>& pts) {
  double a = 0.0;
  for (size_t i = 0; i < pts.size(); ++i) a += cross(pts[i], pts[(i + 1) % pts.size()]);
  return 0.5 * a;
}

Domain Domain::disk(Vec2 center, double radius) {
  if (!(radius > 0.0)) throw Error(Errc::InvalidArgument, "disk radius must be positive");
  Domain d;
  d.kind_ = Kind::Disk;
  d.center_ = center;
  d.radius_ = radius;
  d.lo_ = {center.x - radius, center.y - radius};
  d.hi_ = {center.x + radius, center.y + radius};
  return d;
}

Domain Domain::rect(Vec2 lo, Vec2 hi) {
  if (!(hi.x > lo.x && hi.y > lo.y)) throw Error(Errc::InvalidArgument, "empty rectangle");
  Domain d;
  d.kind_ = Kind::Rect;
  d.lo_ = lo;
  d.hi_ = hi;
  d.center_ = 0.5 * (lo + hi);
  d.radius_ = 0.5 * norm(hi - lo);
  return d;
}

bool Domain::contains(Vec2 p, double tol) const {
  if (kind_ == Kind::Disk) return norm(p - center_) <= radius_ + tol;
  return p.x >= lo_.x - tol && p.x <= hi_.x + tol && p.y >= lo_.y - tol && p.y <= hi_.y + tol;
}

double Domain::boundary_distance(Vec2 p) const {
  if (kind_ == Kind::Disk) return radius_ - norm(p - center_);
  return std::min({p.x - lo_.x, hi_.x - p.x, p.y - lo_.y, hi_.y - p.y});
}

double Domain::perimeter() const {
  if (kind_ == Kind::Disk) return 2.0 * std::numbers::pi * radius_;
  return 2.0 * ((hi_.x - lo_.x) + (hi_.y - lo_.y));
}

double Domain::diameter() const {
  if (kind_ == Kind::Disk) return 2.0 * radius_;
  return norm(hi_ - lo_);
}

double Domain::scale() const { return radius_; }

double Domain::param(Vec2 p) const {
  if (kind_ == Kind::Disk) {
    double th = std::atan2(p.y - center_.y, p.x - center_.x);
    if (th < 0) th += 2.0 * std::numbers::pi;
    return radius_ * th;
  }
  Vec2 q = project_to_boundary(p);
  double w = hi_.x - lo_.x, h = hi_.y - lo_.y;
  double dB = std::abs(q.y - lo_.y), dR = std::abs(q.x - hi_.x);
  double dT = std::abs(q.y - hi_.y), dL = std::abs(q.x - lo_.x);
  double m = std::min({dB, dR, dT, dL});
  if (m == dB) return q.x - lo_.x;
  if (m == dR) return w + (q.y - lo_.y);
  if (m == dT) return w + h + (hi_.x - q.x);
  return 2.0 * w + h + (hi_.y - q.y);
}

Vec2 Domain::point_at(double s) const {
  double P = perimeter();
  s = std::fmod(s, P);
  if (s < 0) s += P;
  if (kind_ == Kind::Disk) return center_ + polar(radius_, s / radius_);
  double w = hi_.x - lo_.x, h = hi_.y - lo_.y;
  if (s <= w) return {lo_.x + s, lo_.y};
  s -= w;
  if (s <= h) return {hi_.x, lo_.y + s};
  s -= h;
  if (s <= w) return {hi_.x - s, hi_.y};
  s -= w;
  return {lo_.x, hi_.y - s};
}

Vec2 Domain::tangent_at(double s) const {
  double P = perimeter();
  s = std::fmod(s, P);
  if (s < 0) s += P;
  if (kind_ == Kind::Disk) return perp(polar(1.0, s / radius_));
  double w = hi_.x - lo_.x, h = hi_.y - lo_.y;
  if (s < w) return {1, 0};
  if (s < w + h) return {0, 1};
  if (s < 2 * w + h) return {-1, 0};
  return {0, -1};
}

Vec2 Domain::project_to_boundary(Vec2 p) const {
  if (kind_ == Kind::Disk) {
    Vec2 d = p - center_;
    double r = norm(d);
    if (r == 0.0) return center_ + Vec2{radius_, 0.0};
    return center_ + (radius_ / r) * d;
  }
  Vec2 q{std::clamp(p.x, lo_.x, hi_.x), std::clamp(p.y, lo_.y, hi_.y)};
  if (contains(p)) {
    double dB = q.y - lo_.y, dR = hi_.x - q.x, dT = hi_.y - q.y, dL = q.x - lo_.x;
    double m = std::min({dB, dR, dT, dL});
    if (m == dB) q.y = lo_.y;
    else if (m == dR) q.x = hi_.x;
    else if (m == dT) q.y = hi_.y;
    else q.x = lo_.x;
  }
  return q;
}

Vec2 Domain::clamp_inside(Vec2 p) const {
  if (contains(p)) return p;
  if (kind_ == Kind::Disk) return project_to_boundary(p);
  return {std::clamp(p.x, lo_.x, hi_.x), std::clamp(p.y, lo_.y, hi_.y)};
}

double Domain::ccw_gap(double s0, double s1) const {
  double P = perimeter();
  double g = std::fmod(s1 - s0, P);
  if (g < 0) g += P;
  return g;
}

double Domain::signed_gap(double s0, double s1) const {
  double P = perimeter();
  double g = ccw_gap(s0, s1);
  if (g > 0.5 * P) g -= P;
  return g;
}

std::vector<Vec2> Domain::boundary_path(double s0, double s1, int min_points) const {
  double len = ccw_gap(s0, s1);
  std::vector<Vec2> out;
  if (kind_ == Kind::Disk) {
    int n = std::max(min_points, 2 + static_cast<int>(std::ceil(len / radius_ * 32.0)));
    for (int i = 0; i < n; ++i) out.push_back(point_at(s0 + len * i / (n - 1)));
    return out;
  }
  double w = hi_.x - lo_.x, h = hi_.y - lo_.y;
  double corners[4] = {w, w + h, 2 * w + h, 2 * w + 2 * h};
  out.push_back(point_at(s0));
  double P = perimeter();
  double base = std::fmod(s0, P);
  if (base < 0) base += P;
  for (int lap = 0; lap < 2; ++lap)
    for (double c : corners) {
      double rel = c + lap * P - base;
      if (rel > 1e-15 && rel < len - 1e-15) out.push_back(point_at(c));
    }
  out.push_back(point_at(s0 + len));
  while (static_cast<int>(out.size()) < min_points) out.insert(out.end() - 1, out.back());
  return out;
}

}  // namespace phasenet
