#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "gaitforge/types.hpp"

namespace gaitforge::model {

/// Link dimensions and masses of the 10-DOF biped. The ground frame has
/// z up, x forward, y to the robot's left; the right hip sits at
/// y = -hip_half_width. Defaults are sized for a hobby-servo biped and
/// can all be overridden through a key=value config file.
struct BipedGeometry {
  double hip_half_width = 0.035;  // pelvis center to hip joint [m]
  double thigh_len = 0.085;       // hip pitch axis to knee axis [m]
  double shin_len = 0.085;        // knee axis to ankle axis [m]
  double ankle_height = 0.035;    // ankle axis to sole plane [m]
  double sole_length = 0.10;      // sole extent along x [m]
  double sole_width = 0.06;       // sole extent along y [m]
  double pelvis_mass = 0.30;      // [kg]
  double thigh_mass = 0.12;       // per thigh [kg]
  double shin_mass = 0.12;        // per shin [kg]
  double foot_mass = 0.06;        // per foot [kg]

  double total_mass() const {
    return pelvis_mass + 2.0 * (thigh_mass + shin_mass + foot_mass);
  }

  void validate() const {
    auto positive = [](double v, const char* what) {
      if (!(v > 0.0) || !std::isfinite(v)) {
        throw std::invalid_argument(std::string("geometry: ") + what + " must be > 0");
      }
    };
    positive(hip_half_width, "hip_half_width");
    positive(thigh_len, "thigh_len");
    positive(shin_len, "shin_len");
    positive(ankle_height, "ankle_height");
    positive(sole_length, "sole_length");
    positive(sole_width, "sole_width");
    auto nonneg = [](double v, const char* what) {
      if (v < 0.0 || !std::isfinite(v)) {
        throw std::invalid_argument(std::string("geometry: ") + what + " must be >= 0");
      }
    };
    nonneg(pelvis_mass, "pelvis_mass");
    nonneg(thigh_mass, "thigh_mass");
    nonneg(shin_mass, "shin_mass");
    nonneg(foot_mass, "foot_mass");
    if (!(total_mass() > 0.0)) {
      throw std::invalid_argument("geometry: total mass must be > 0");
    }
  }
};

/// Ten joint angles in radians, canonical order RJ1..RJ5, LJ1..LJ5.
struct JointVector {
  std::array<double, kJointCount> angles{};

  double& operator[](JointId id) { return angles[static_cast<int>(id)]; }
  double operator[](JointId id) const { return angles[static_cast<int>(id)]; }
  double& operator[](int i) { return angles[static_cast<size_t>(i)]; }
  double operator[](int i) const { return angles[static_cast<size_t>(i)]; }

  friend bool operator==(const JointVector&, const JointVector&) = default;
};

/// True when every angle lies in the expected servo operating span [-pi/2, pi/2].
inline bool within_servo_span(const JointVector& j) {
  return std::all_of(j.angles.begin(), j.angles.end(), [](double a) {
    return std::isfinite(a) && std::abs(a) <= kPi / 2.0;
  });
}

/// Swaps the right/left joint blocks and negates the roll axes (J1, J5).
/// Involutive: mirror_joints(mirror_joints(j)) == j.
inline JointVector mirror_joints(const JointVector& j) {
  JointVector out;
  for (int i = 0; i < kJointCount; ++i) {
    const int other = (i + 5) % kJointCount;
    const double sign = is_roll_joint(static_cast<JointId>(i)) ? -1.0 : 1.0;
    out[i] = sign * j[other];
  }
  return out;
}

/// Chain points of one leg. Sole corners are ordered front-outer,
/// front-inner, back-inner, back-outer, where "outer" is the side away
/// from the pelvis; mirroring a pose maps corner k onto corner k.
struct LegPose {
  Vec3 hip;
  Vec3 knee;
  Vec3 ankle;
  std::array<Vec3, 4> sole;
};

struct BodyPose {
  Vec3 pelvis;
  LegPose right;
  LegPose left;

  std::array<const Vec3*, 15> points() const {
    return {&pelvis,
            &right.hip, &right.knee, &right.ankle,
            &right.sole[0], &right.sole[1], &right.sole[2], &right.sole[3],
            &left.hip, &left.knee, &left.ankle,
            &left.sole[0], &left.sole[1], &left.sole[2], &left.sole[3]};
  }
};

struct ComPoint {
  Vec3 xyz;
  double total_mass = 0.0;
};

namespace detail {

inline Vec3 rot_x(double t, Vec3 v) {
  const double c = std::cos(t), s = std::sin(t);
  return {v.x, c * v.y - s * v.z, s * v.y + c * v.z};
}

inline Vec3 rot_y(double t, Vec3 v) {
  const double c = std::cos(t), s = std::sin(t);
  return {c * v.x + s * v.z, v.y, -s * v.x + c * v.z};
}

// Joint axes: J1 hip roll, J2 hip pitch, J3 knee pitch, J4 ankle pitch,
// J5 ankle roll. Positive pitch swings the distal link toward +x.
inline LegPose leg_chain(const BipedGeometry& g, const double* q, double lateral_sign) {
  const auto pitch = [](double t, Vec3 v) { return rot_y(-t, v); };

  LegPose leg;
  leg.hip = {0.0, lateral_sign * g.hip_half_width, 0.0};

  Vec3 thigh = pitch(q[1], Vec3{0.0, 0.0, -g.thigh_len});
  leg.knee = leg.hip + rot_x(q[0], thigh);

  Vec3 shin = pitch(q[1], pitch(q[2], Vec3{0.0, 0.0, -g.shin_len}));
  leg.ankle = leg.knee + rot_x(q[0], shin);

  const double hl = g.sole_length / 2.0;
  const double hw = lateral_sign * g.sole_width / 2.0;  // outer edge
  const std::array<Vec3, 4> corners = {{{+hl, +hw, -g.ankle_height},
                                        {+hl, -hw, -g.ankle_height},
                                        {-hl, -hw, -g.ankle_height},
                                        {-hl, +hw, -g.ankle_height}}};
  for (int i = 0; i < 4; ++i) {
    Vec3 c = rot_x(q[4], corners[i]);
    c = pitch(q[1], pitch(q[2], pitch(q[3], c)));
    leg.sole[i] = leg.ankle + rot_x(q[0], c);
  }
  return leg;
}

}  // namespace detail

/// Computes all chain point positions for the given joint angles. The pose
/// is pelvis-rooted at x=0, y=0, then translated vertically so the lowest
/// sole corner touches z=0.
inline BodyPose forward_kinematics(const BipedGeometry& geom, const JointVector& joints) {
  geom.validate();
  for (double a : joints.angles) {
    if (!std::isfinite(a)) throw std::invalid_argument("forward_kinematics: non-finite joint angle");
  }

  BodyPose pose;
  pose.pelvis = {0.0, 0.0, 0.0};
  pose.right = detail::leg_chain(geom, joints.angles.data(), -1.0);
  pose.left = detail::leg_chain(geom, joints.angles.data() + 5, +1.0);

  double min_z = pose.right.sole[0].z;
  for (const LegPose* leg : {&pose.right, &pose.left}) {
    for (const Vec3& c : leg->sole) min_z = std::min(min_z, c.z);
  }
  pose.pelvis.z -= min_z;
  for (LegPose* leg : {&pose.right, &pose.left}) {
    leg->hip.z -= min_z;
    leg->knee.z -= min_z;
    leg->ankle.z -= min_z;
    for (Vec3& c : leg->sole) c.z -= min_z;
  }
  return pose;
}

/// Mass-weighted mean of the link midpoints. The pelvis link's midpoint is
/// the pelvis center; each foot's is halfway between ankle and sole center.
/// Right/left contributions are summed pairwise, so symmetric poses yield
/// an exactly zero lateral COM.
inline ComPoint center_of_mass(const BipedGeometry& geom, const BodyPose& pose) {
  const double total = geom.total_mass();
  if (!(total > 0.0)) throw std::invalid_argument("center_of_mass: zero total mass");

  auto midpoint = [](Vec3 a, Vec3 b) { return 0.5 * (a + b); };
  auto sole_center = [&](const LegPose& leg) {
    return 0.25 * ((leg.sole[0] + leg.sole[1]) + (leg.sole[2] + leg.sole[3]));
  };

  Vec3 weighted = geom.pelvis_mass * pose.pelvis;
  weighted = weighted + geom.thigh_mass * (midpoint(pose.right.hip, pose.right.knee) +
                                           midpoint(pose.left.hip, pose.left.knee));
  weighted = weighted + geom.shin_mass * (midpoint(pose.right.knee, pose.right.ankle) +
                                          midpoint(pose.left.knee, pose.left.ankle));
  weighted = weighted + geom.foot_mass * (midpoint(pose.right.ankle, sole_center(pose.right)) +
                                          midpoint(pose.left.ankle, sole_center(pose.left)));
  return {(1.0 / total) * weighted, total};
}

/// Parses a key=value geometry config. Keys are the BipedGeometry field
/// names; omitted keys keep their defaults; unknown keys are errors.
inline BipedGeometry parse_geometry_config(std::string_view text) {
  BipedGeometry geom;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      if (b == std::string::npos) return std::string();
      const auto e = s.find_last_not_of(" \t\r");
      return s.substr(b, e - b + 1);
    };
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("geometry config line " + std::to_string(line_no) +
                                  ": expected key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    double parsed = 0.0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), parsed);
    if (ec != std::errc() || ptr != value.data() + value.size()) {
      throw std::invalid_argument("geometry config line " + std::to_string(line_no) +
                                  ": bad number '" + value + "'");
    }

    if (key == "hip_half_width") geom.hip_half_width = parsed;
    else if (key == "thigh_len") geom.thigh_len = parsed;
    else if (key == "shin_len") geom.shin_len = parsed;
    else if (key == "ankle_height") geom.ankle_height = parsed;
    else if (key == "sole_length") geom.sole_length = parsed;
    else if (key == "sole_width") geom.sole_width = parsed;
    else if (key == "pelvis_mass") geom.pelvis_mass = parsed;
    else if (key == "thigh_mass") geom.thigh_mass = parsed;
    else if (key == "shin_mass") geom.shin_mass = parsed;
    else if (key == "foot_mass") geom.foot_mass = parsed;
    else {
      throw std::invalid_argument("geometry config line " + std::to_string(line_no) +
                                  ": unknown key '" + key + "'");
    }
  }
  geom.validate();
  return geom;
}

}  // namespace gaitforge::model
