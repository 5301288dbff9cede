#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "gaitforge/types.hpp"

// Independent brute-force implementations used only to cross-check the
// library's geometry. Deliberately different algorithms: gift wrapping
// instead of monotone chain, ray casting instead of half-plane tests,
// ternary search instead of closed-form projection.
namespace oracle {

using gaitforge::Vec2;
using gaitforge::cross;
using gaitforge::dot;
using gaitforge::norm;

inline std::mt19937_64 rng(uint64_t seed) { return std::mt19937_64{seed}; }

inline double uniform(std::mt19937_64& gen, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(gen);
}

/// Gift-wrapping hull, counterclockwise, starting at the lexicographically
/// smallest point. Collinear ties keep the farthest point.
inline std::vector<Vec2> wrap_hull(const std::vector<Vec2>& pts) {
  size_t start = 0;
  for (size_t i = 1; i < pts.size(); ++i) {
    if (pts[i].x < pts[start].x || (pts[i].x == pts[start].x && pts[i].y < pts[start].y)) {
      start = i;
    }
  }
  auto dist2 = [](Vec2 a, Vec2 b) { return dot(a - b, a - b); };

  std::vector<Vec2> hull;
  size_t cur = start;
  do {
    hull.push_back(pts[cur]);
    size_t next = (cur + 1) % pts.size();
    for (size_t i = 0; i < pts.size(); ++i) {
      const double c = cross(pts[next] - pts[cur], pts[i] - pts[cur]);
      if (c < 0.0 || (c == 0.0 && dist2(pts[cur], pts[i]) > dist2(pts[cur], pts[next]))) {
        next = i;
      }
    }
    cur = next;
  } while (cur != start && hull.size() <= pts.size());
  return hull;
}

/// Crossing-number point-in-polygon test. Points on the boundary are
/// unreliable here; callers should skip near-boundary samples.
inline bool ray_contains(const std::vector<Vec2>& poly, Vec2 p) {
  bool in = false;
  const size_t n = poly.size();
  for (size_t i = 0, j = n - 1; i < n; j = i++) {
    if ((poly[i].y > p.y) != (poly[j].y > p.y)) {
      const double x_int =
          poly[j].x + (p.y - poly[j].y) * (poly[i].x - poly[j].x) / (poly[i].y - poly[j].y);
      if (p.x < x_int) in = !in;
    }
  }
  return in;
}

/// Distance from p to segment ab by ternary search over the parameter.
inline double segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  auto d2 = [&](double t) {
    const Vec2 q = a + t * (b - a) - p;
    return dot(q, q);
  };
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 200; ++i) {
    const double m1 = lo + (hi - lo) / 3.0;
    const double m2 = hi - (hi - lo) / 3.0;
    if (d2(m1) < d2(m2)) {
      hi = m2;
    } else {
      lo = m1;
    }
  }
  return norm(a + lo * (b - a) - p);
}

inline double boundary_distance(const std::vector<Vec2>& poly, Vec2 p) {
  double best = segment_distance(p, poly.back(), poly.front());
  for (size_t i = 0; i + 1 < poly.size(); ++i) {
    best = std::min(best, segment_distance(p, poly[i], poly[i + 1]));
  }
  return best;
}

/// A random convex polygon: hull of n points drawn from a disc.
inline std::vector<Vec2> random_convex_polygon(std::mt19937_64& gen, int n_points,
                                               double radius) {
  std::vector<Vec2> pts;
  for (int i = 0; i < n_points; ++i) {
    pts.push_back({uniform(gen, -radius, radius), uniform(gen, -radius, radius)});
  }
  return wrap_hull(pts);
}

}  // namespace oracle
