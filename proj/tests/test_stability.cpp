#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "gaitforge/stability.hpp"
#include "support/oracles.hpp"

using namespace gaitforge;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

stability::SupportPolygon unit_square() {
  return stability::convex_hull({{-0.5, -0.5}, {0.5, -0.5}, {0.5, 0.5}, {-0.5, 0.5}});
}

}  // namespace

TEST_CASE("convex_hull: squares, duplicates, collinear points") {
  SECTION("square with interior and collinear extras") {
    const auto hull = stability::convex_hull({{0, 0},
                                              {1, 0},
                                              {1, 1},
                                              {0, 1},
                                              {0.5, 0.5},    // interior
                                              {0.5, 0.0},    // on an edge
                                              {0.0, 0.25}});  // on an edge
    REQUIRE(hull.vertices.size() == 4);
    REQUIRE(hull.vertices[0].x == 0.0);
    REQUIRE(hull.vertices[0].y == 0.0);
    // Counterclockwise from the lexicographic minimum.
    REQUIRE(hull.vertices[1].x == 1.0);
    REQUIRE(hull.vertices[1].y == 0.0);
    REQUIRE(hull.vertices[2].x == 1.0);
    REQUIRE(hull.vertices[2].y == 1.0);
    REQUIRE(hull.vertices[3].x == 0.0);
    REQUIRE(hull.vertices[3].y == 1.0);
  }
  SECTION("exact duplicates are removed") {
    const auto hull = stability::convex_hull({{0, 0}, {0, 0}, {1, 0}, {1, 0}, {0, 1}, {0, 1}});
    REQUIRE(hull.vertices.size() == 3);
  }
  SECTION("degenerate input throws") {
    REQUIRE_THROWS_WITH(stability::convex_hull({{0, 0}, {1, 1}}), ContainsSubstring("degenerate"));
    REQUIRE_THROWS_WITH(stability::convex_hull({{0, 0}, {1, 1}, {2, 2}, {3, 3}}),
                        ContainsSubstring("degenerate"));
  }
}

TEST_CASE("convex_hull agrees with the gift-wrapping oracle") {
  auto gen = oracle::rng(201);
  std::uniform_int_distribution<int> count(4, 40);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<Vec2> pts;
    const int n = count(gen);
    for (int i = 0; i < n; ++i) {
      pts.push_back({oracle::uniform(gen, -1.0, 1.0), oracle::uniform(gen, -1.0, 1.0)});
    }
    const auto hull = stability::convex_hull(pts);
    const auto expected = oracle::wrap_hull(pts);

    REQUIRE(hull.vertices.size() == expected.size());
    for (size_t i = 0; i < expected.size(); ++i) {
      REQUIRE_THAT(hull.vertices[i].x, WithinAbs(expected[i].x, 1e-9));
      REQUIRE_THAT(hull.vertices[i].y, WithinAbs(expected[i].y, 1e-9));
    }
    // Every input point is contained in its own hull.
    for (const Vec2& p : pts) REQUIRE(stability::contains(hull, p));
  }
}

TEST_CASE("contains: rectangle cases and tolerance at the boundary") {
  const auto square = unit_square();
  REQUIRE(stability::contains(square, {0.0, 0.0}));
  REQUIRE(stability::contains(square, {0.5, 0.5}));    // corner
  REQUIRE(stability::contains(square, {0.5, 0.0}));    // edge
  REQUIRE_FALSE(stability::contains(square, {1.5, 0.0}));
  REQUIRE_FALSE(stability::contains(square, {0.0, -1.5}));
}

TEST_CASE("contains agrees with the ray-casting oracle away from the boundary") {
  auto gen = oracle::rng(202);
  int compared = 0;
  while (compared < 1000) {
    const auto poly = oracle::random_convex_polygon(gen, 12, 1.0);
    if (poly.size() < 3) continue;
    const stability::SupportPolygon hull{poly};
    const Vec2 p{oracle::uniform(gen, -1.2, 1.2), oracle::uniform(gen, -1.2, 1.2)};
    if (oracle::boundary_distance(poly, p) < 1e-9) continue;
    REQUIRE(stability::contains(hull, p) == oracle::ray_contains(poly, p));
    ++compared;
  }
}

TEST_CASE("static_margin: square oracle values and sign convention") {
  const auto square = unit_square();
  REQUIRE_THAT(stability::static_margin(square, {0.0, 0.0}), WithinAbs(0.5, 1e-12));
  REQUIRE_THAT(stability::static_margin(square, {0.25, 0.0}), WithinAbs(0.25, 1e-12));
  REQUIRE_THAT(stability::static_margin(square, {0.5, 0.0}), WithinAbs(0.0, 1e-12));
  REQUIRE_THAT(stability::static_margin(square, {1.5, 0.0}), WithinAbs(-1.0, 1e-12));
  REQUIRE_THAT(stability::static_margin(square, {1.5, 1.5}),
               WithinAbs(-std::sqrt(2.0), 1e-12));
}

TEST_CASE("static_margin agrees with the ternary-search oracle") {
  auto gen = oracle::rng(203);
  int compared = 0;
  while (compared < 1000) {
    const auto poly = oracle::random_convex_polygon(gen, 10, 1.0);
    if (poly.size() < 3) continue;
    const stability::SupportPolygon hull{poly};
    const Vec2 p{oracle::uniform(gen, -1.5, 1.5), oracle::uniform(gen, -1.5, 1.5)};
    const double dist = oracle::boundary_distance(poly, p);
    if (dist < 1e-9) continue;
    const double expected = oracle::ray_contains(poly, p) ? dist : -dist;
    REQUIRE_THAT(stability::static_margin(hull, p), WithinAbs(expected, 1e-9));
    REQUIRE(stability::contains(hull, p) == (stability::static_margin(hull, p) >= 0.0));
    ++compared;
  }
}

TEST_CASE("support_polygon: single foot, both feet, no feet") {
  const model::BipedGeometry geom;
  const auto pose = model::forward_kinematics(geom, model::JointVector{});

  SECTION("one flat foot is its sole rectangle") {
    const auto poly = stability::support_polygon(pose, {.right = true, .left = false});
    REQUIRE(poly.vertices.size() == 4);
    for (const Vec3& c : pose.right.sole) {
      REQUIRE(stability::contains(poly, {c.x, c.y}));
    }
    REQUIRE_FALSE(stability::contains(poly, {0.0, +geom.hip_half_width}));
  }
  SECTION("both feet: hull contains every corner") {
    const auto poly = stability::support_polygon(pose, {.right = true, .left = true});
    REQUIRE(poly.vertices.size() == 4);  // erect feet are axis-aligned rectangles
    for (const model::LegPose* leg : {&pose.right, &pose.left}) {
      for (const Vec3& c : leg->sole) REQUIRE(stability::contains(poly, {c.x, c.y}));
    }
  }
  SECTION("no contact throws") {
    REQUIRE_THROWS_WITH(stability::support_polygon(pose, {.right = false, .left = false}),
                        ContainsSubstring("no support"));
  }
}

TEST_CASE("pendulum torque: published arithmetic oracles") {
  stability::PendulumState s;
  s.m = 1.0;
  s.l = 0.3;
  s.g = 9.81;

  SECTION("upright equilibrium") {
    REQUIRE(stability::pendulum_torque(s) == 0.0);
  }
  SECTION("gravity term only") {
    s.theta = 0.1;
    REQUIRE_THAT(stability::pendulum_torque(s), WithinRel(0.2943, 1e-12));
  }
  SECTION("inertia term only") {
    s.theta_ddot = 1.0;
    REQUIRE_THAT(stability::pendulum_torque(s), WithinRel(-0.09, 1e-12));
  }
  SECTION("invalid states rejected") {
    s.m = 0.0;
    REQUIRE_THROWS_AS(stability::pendulum_torque(s), std::invalid_argument);
    s.m = 1.0;
    s.theta = std::numeric_limits<double>::infinity();
    REQUIRE_THROWS_AS(stability::pendulum_torque(s), std::invalid_argument);
  }
}

TEST_CASE("zmp: published arithmetic oracles") {
  REQUIRE(stability::zmp(0.0, 0.0, 0.3) == 0.0);
  REQUIRE(stability::zmp(0.07, 0.0, 0.3) == 0.07);
  REQUIRE_THAT(stability::zmp(0.05, 0.2, 0.3, 9.81), WithinRel(0.05 - 0.3 * 0.2 / 9.81, 1e-12));
  REQUIRE_THAT(stability::zmp(0.05, 0.2, 0.3, 9.81), WithinAbs(0.0438838, 1e-7));
  REQUIRE_THROWS_AS(stability::zmp(0.0, 0.0, 0.0), std::invalid_argument);
  REQUIRE_THROWS_AS(stability::zmp(std::nan(""), 0.0, 0.3), std::invalid_argument);
}

TEST_CASE("torque and zmp are the same statement: zmp * m * g == torque") {
  auto gen = oracle::rng(204);
  int done = 0;
  while (done < 10000) {
    stability::PendulumState s;
    s.m = oracle::uniform(gen, 0.1, 5.0);
    s.l = oracle::uniform(gen, 0.05, 1.0);
    s.g = oracle::uniform(gen, 1.0, 20.0);
    s.y_mc = oracle::uniform(gen, -0.5, 0.5);
    s.y_mc_ddot = oracle::uniform(gen, -5.0, 5.0);
    s.theta = s.y_mc / s.l;
    s.theta_ddot = s.y_mc_ddot / s.l;

    // Skip states where the two terms cancel to below 1% of their scale;
    // there the difference of two correctly rounded evaluations is itself
    // larger than 1e-12 of the result, for any implementation.
    const double t_gravity = s.m * s.g * s.y_mc;
    const double t_inertia = s.m * s.l * s.y_mc_ddot;
    if (std::abs(t_gravity - t_inertia) <
        0.01 * (std::abs(t_gravity) + std::abs(t_inertia))) {
      continue;
    }

    const double torque = stability::pendulum_torque(s);
    const double force = stability::zmp(s.y_mc, s.y_mc_ddot, s.l, s.g) * (s.m * s.g);
    REQUIRE_THAT(force, WithinRel(torque, 1e-12));
    ++done;
  }
}

TEST_CASE("analyze_trajectory: constant pose collapses zmp to the projected COM") {
  const model::BipedGeometry geom;
  const auto pose = model::forward_kinematics(geom, model::JointVector{});
  std::vector<stability::PoseSample> samples;
  for (int k = 0; k < 7; ++k) {
    samples.push_back({static_cast<int64_t>(k) * 20, pose, {.right = true, .left = true}});
  }
  const auto rows = stability::analyze_trajectory(samples, geom);
  REQUIRE(rows.size() == samples.size());
  const auto com = model::center_of_mass(geom, pose);
  for (const auto& row : rows) {
    REQUIRE_THAT(row.y_zmp, WithinAbs(com.xyz.y, 1e-12));
    REQUIRE_THAT(row.y_zmp, WithinAbs(row.com_xy.y, 1e-12));
    REQUIRE(row.margin_m > 0.0);
  }
}

TEST_CASE("analyze_trajectory: quadratic lateral motion recovers the exact acceleration") {
  const model::BipedGeometry geom;
  const auto base = model::forward_kinematics(geom, model::JointVector{});
  const double a = 0.8;  // m/s^2 of t^2 coefficient: y(t) = a t^2

  auto shifted = [&](double dy) {
    model::BodyPose p = base;
    p.pelvis.y += dy;
    for (model::LegPose* leg : {&p.right, &p.left}) {
      leg->hip.y += dy;
      leg->knee.y += dy;
      leg->ankle.y += dy;
      for (Vec3& c : leg->sole) c.y += dy;
    }
    return p;
  };

  std::vector<stability::PoseSample> samples;
  const int64_t step_ms = 20;
  for (int k = 0; k < 9; ++k) {
    const double t = static_cast<double>(k * step_ms) / 1000.0;
    samples.push_back({k * step_ms, shifted(a * t * t), {.right = true, .left = true}});
  }
  const auto rows = stability::analyze_trajectory(samples, geom);

  for (size_t i = 0; i < rows.size(); ++i) {
    const double t = static_cast<double>(rows[i].t_ms) / 1000.0;
    const double y = rows[i].com_xy.y;
    const double l = rows[i].com_z;
    // Central differences are exact on quadratics, including the shifted
    // endpoint stencils; only fp rounding of the samples remains.
    const double expected = stability::zmp(y, 2.0 * a, l);
    REQUIRE_THAT(rows[i].y_zmp, WithinAbs(expected, 1e-9));
    REQUIRE_THAT(y, WithinAbs(a * t * t, 1e-12));
  }
}

TEST_CASE("analyze_trajectory input validation") {
  const model::BipedGeometry geom;
  const auto pose = model::forward_kinematics(geom, model::JointVector{});
  const stability::ContactFlags both{.right = true, .left = true};

  std::vector<stability::PoseSample> two = {{0, pose, both}, {20, pose, both}};
  REQUIRE_THROWS_WITH(stability::analyze_trajectory(two, geom),
                      ContainsSubstring("at least 3"));

  std::vector<stability::PoseSample> jagged = {{0, pose, both}, {20, pose, both}, {60, pose, both}};
  REQUIRE_THROWS_WITH(stability::analyze_trajectory(jagged, geom),
                      ContainsSubstring("non-uniform"));

  std::vector<stability::PoseSample> reversed = {{40, pose, both}, {20, pose, both}, {0, pose, both}};
  REQUIRE_THROWS_WITH(stability::analyze_trajectory(reversed, geom),
                      ContainsSubstring("increase"));
}
