#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace gaitforge {

inline constexpr int kJointCount = 10;
inline constexpr double kPi = 3.14159265358979323846;

/// Joint indices in canonical order: right leg hip-to-ankle, then left leg.
enum class JointId : int { RJ1 = 0, RJ2, RJ3, RJ4, RJ5, LJ1, LJ2, LJ3, LJ4, LJ5 };

enum class Leg { Right, Left };

inline constexpr std::array<std::string_view, kJointCount> kJointNames = {
    "RJ1", "RJ2", "RJ3", "RJ4", "RJ5", "LJ1", "LJ2", "LJ3", "LJ4", "LJ5"};

inline constexpr std::string_view joint_name(JointId id) {
  return kJointNames[static_cast<int>(id)];
}

inline JointId joint_from_name(std::string_view name) {
  for (int i = 0; i < kJointCount; ++i) {
    if (kJointNames[i] == name) return static_cast<JointId>(i);
  }
  throw std::invalid_argument("unknown joint '" + std::string(name) + "'");
}

inline constexpr Leg joint_leg(JointId id) {
  return static_cast<int>(id) < 5 ? Leg::Right : Leg::Left;
}

/// J1 (hip) and J5 (ankle) are the frontal-plane roll axes; J2-J4 are pitch.
inline constexpr bool is_roll_joint(JointId id) {
  const int within_leg = static_cast<int>(id) % 5;
  return within_leg == 0 || within_leg == 4;
}

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }
};

inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend Vec3 operator*(double s, Vec3 v) { return {s * v.x, s * v.y, s * v.z}; }
};

inline double norm(Vec3 v) { return std::sqrt(v.x * v.x + v.y * v.y + v.z * v.z); }

inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

}  // namespace gaitforge
