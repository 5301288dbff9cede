#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "gaitforge/model.hpp"
#include "gaitforge/types.hpp"

namespace gaitforge::stability {

inline constexpr double kGravity = 9.81;   // m/s^2
inline constexpr double kGeomTol = 1e-12;  // collinearity / boundary tolerance

/// Convex support pattern on the ground plane, vertices counterclockwise.
struct SupportPolygon {
  std::vector<Vec2> vertices;
};

struct ContactFlags {
  bool right = false;
  bool left = false;
};

/// Andrew's monotone chain. Ties are broken lexicographically (x, then y);
/// collinear points are dropped at tolerance kGeomTol. Throws if the input
/// spans fewer than three distinct non-collinear points.
inline SupportPolygon convex_hull(std::vector<Vec2> pts) {
  std::sort(pts.begin(), pts.end(), [](Vec2 a, Vec2 b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](Vec2 a, Vec2 b) { return a.x == b.x && a.y == b.y; }),
            pts.end());
  if (pts.size() < 3) throw std::invalid_argument("convex_hull: degenerate input");

  std::vector<Vec2> hull(2 * pts.size());
  size_t k = 0;
  for (size_t i = 0; i < pts.size(); ++i) {  // lower
    while (k >= 2 && cross(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= kGeomTol) --k;
    hull[k++] = pts[i];
  }
  const size_t lower = k + 1;
  for (size_t i = pts.size() - 1; i-- > 0;) {  // upper
    while (k >= lower && cross(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= kGeomTol) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);  // last point repeats the first
  if (hull.size() < 3) throw std::invalid_argument("convex_hull: degenerate input");
  return {hull};
}

/// Hull of the ground-plane projections of all sole corners of the feet
/// flagged in contact.
inline SupportPolygon support_polygon(const model::BodyPose& pose, ContactFlags contacts) {
  if (!contacts.right && !contacts.left) throw std::invalid_argument("no support");
  std::vector<Vec2> corners;
  if (contacts.right) {
    for (const Vec3& c : pose.right.sole) corners.push_back({c.x, c.y});
  }
  if (contacts.left) {
    for (const Vec3& c : pose.left.sole) corners.push_back({c.x, c.y});
  }
  return convex_hull(corners);
}

/// Inside-or-on-boundary test via half-plane checks against every edge.
inline bool contains(const SupportPolygon& poly, Vec2 p) {
  const size_t n = poly.vertices.size();
  for (size_t i = 0; i < n; ++i) {
    const Vec2 a = poly.vertices[i];
    const Vec2 b = poly.vertices[(i + 1) % n];
    if (cross(b - a, p - a) < -kGeomTol) return false;
  }
  return true;
}

namespace detail {

inline double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 == 0.0) return norm(p - a);
  const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return norm(p - (a + t * ab));
}

}  // namespace detail

/// Minimum distance from p to the polygon boundary, signed: positive
/// inside, negative outside, zero on the boundary.
inline double static_margin(const SupportPolygon& poly, Vec2 p) {
  const size_t n = poly.vertices.size();
  double dist = detail::point_segment_distance(p, poly.vertices[n - 1], poly.vertices[0]);
  for (size_t i = 0; i + 1 < n; ++i) {
    dist = std::min(dist, detail::point_segment_distance(p, poly.vertices[i], poly.vertices[i + 1]));
  }
  return contains(poly, p) ? dist : -dist;
}

/// Inverted-pendulum state. theta / theta_ddot parameterize the lean angle
/// form; y_mc / y_mc_ddot the lateral-displacement form of the same model.
struct PendulumState {
  double m = 1.0;          // kg
  double l = 1.0;          // m, COM height over the support point
  double g = kGravity;     // m/s^2
  double theta = 0.0;      // rad
  double theta_ddot = 0.0; // rad/s^2
  double y_mc = 0.0;       // m
  double y_mc_ddot = 0.0;  // m/s^2

  void validate() const {
    if (!(m > 0.0) || !(l > 0.0) || !(g > 0.0)) {
      throw std::invalid_argument("pendulum: m, l, g must be > 0");
    }
    for (double v : {m, l, g, theta, theta_ddot, y_mc, y_mc_ddot}) {
      if (!std::isfinite(v)) throw std::invalid_argument("pendulum: non-finite state");
    }
  }
};

/// Torque on the pendulum: T = m*g*l*theta - m*l^2*theta_ddot.
inline double pendulum_torque(const PendulumState& s) {
  s.validate();
  return s.m * s.g * s.l * s.theta - s.m * s.l * s.l * s.theta_ddot;
}

/// Lateral zero moment point: Y_zmp = Y_mc - (l/g) * Y_mc_ddot. The
/// formula is axis-agnostic; pass x-axis arguments for the sagittal value.
inline double zmp(double y_mc, double y_mc_ddot, double l, double g = kGravity) {
  if (!(l > 0.0) || !(g > 0.0)) throw std::invalid_argument("zmp: l and g must be > 0");
  if (!std::isfinite(y_mc) || !std::isfinite(y_mc_ddot)) {
    throw std::invalid_argument("zmp: non-finite input");
  }
  return y_mc - (l / g) * y_mc_ddot;
}

struct PoseSample {
  int64_t t_ms = 0;
  model::BodyPose pose;
  ContactFlags contacts;
};

/// Per-frame stability report row.
struct StabilitySample {
  int64_t t_ms = 0;
  Vec2 com_xy;
  double com_z = 0.0;
  SupportPolygon polygon;
  double margin_m = 0.0;  // > 0 iff the projected COM is strictly inside
  double y_zmp = 0.0;
};

/// Applies the static criterion and the lateral ZMP to each frame of a
/// uniformly sampled pose sequence. The COM lateral acceleration comes
/// from central finite differences (one-sided at the endpoints, both exact
/// for quadratics); the pendulum length is the frame's COM height.
inline std::vector<StabilitySample> analyze_trajectory(std::span<const PoseSample> samples,
                                                       const model::BipedGeometry& geom,
                                                       double g = kGravity) {
  if (samples.size() < 3) {
    throw std::invalid_argument("analyze_trajectory: need at least 3 samples");
  }
  const int64_t step_ms = samples[1].t_ms - samples[0].t_ms;
  if (step_ms <= 0) throw std::invalid_argument("analyze_trajectory: timestamps must increase");
  for (size_t i = 1; i < samples.size(); ++i) {
    if (samples[i].t_ms - samples[i - 1].t_ms != step_ms) {
      throw std::invalid_argument("analyze_trajectory: non-uniform timestamps");
    }
  }

  std::vector<Vec3> com(samples.size());
  for (size_t i = 0; i < samples.size(); ++i) {
    com[i] = center_of_mass(geom, samples[i].pose).xyz;
  }

  const double h = static_cast<double>(step_ms) / 1000.0;
  const size_t n = samples.size();
  auto second_diff = [&](size_t i) {
    const size_t k = i == 0 ? 1 : (i == n - 1 ? n - 2 : i);
    return (com[k - 1].y - 2.0 * com[k].y + com[k + 1].y) / (h * h);
  };

  std::vector<StabilitySample> out;
  out.reserve(n);
  for (size_t i = 0; i < n; ++i) {
    StabilitySample row;
    row.t_ms = samples[i].t_ms;
    row.com_xy = {com[i].x, com[i].y};
    row.com_z = com[i].z;
    row.polygon = support_polygon(samples[i].pose, samples[i].contacts);
    row.margin_m = static_margin(row.polygon, row.com_xy);
    const double l = com[i].z;  // COM height over the ground plane
    row.y_zmp = zmp(com[i].y, second_diff(i), l, g);
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace gaitforge::stability
