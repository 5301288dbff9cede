#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "gaitforge/model.hpp"
#include "gaitforge/types.hpp"

namespace gaitforge::servo {

inline constexpr int kPulseMin = 800;   // microseconds
inline constexpr int kPulseMax = 2400;  // microseconds
inline constexpr int kFramePeriodMs = 20;

// 800..2400 us covering 180 degrees of nominal travel.
inline constexpr double kDefaultScaleDegPerUs = 0.1125;

/// Erect-stance pulse per joint; the default neutral (zero-angle) pulses.
inline constexpr std::array<int, kJointCount> kErectStancePulses = {
    870, 1152, 957, 957, 1696, 2152, 1043, 957, 1935, 1761};

/// One servo's pulse-to-angle mapping. `sign` captures mounting
/// orientation: +1 means a longer pulse rotates the joint anticlockwise.
struct ServoConfig {
  JointId joint = JointId::RJ1;
  int neutral_us = 1600;
  int sign = +1;
  int min_us = kPulseMin;
  int max_us = kPulseMax;
  double scale_deg_per_us = kDefaultScaleDegPerUs;

  void validate() const {
    if (sign != 1 && sign != -1) {
      throw std::invalid_argument(std::string(joint_name(joint)) + ": sign must be +1 or -1");
    }
    if (!(min_us < max_us)) {
      throw std::invalid_argument(std::string(joint_name(joint)) + ": min_us must be < max_us");
    }
    if (neutral_us < min_us || neutral_us > max_us) {
      throw std::invalid_argument(std::string(joint_name(joint)) +
                                  ": neutral_us outside [min_us, max_us]");
    }
    if (!(scale_deg_per_us > 0.0)) {
      throw std::invalid_argument(std::string(joint_name(joint)) + ": scale must be > 0");
    }
  }
};

using ServoBank = std::array<ServoConfig, kJointCount>;

/// One 20 ms output frame: a timestamp and ten pulse widths in joint order.
struct PwmFrame {
  int64_t t_ms = 0;
  std::array<int, kJointCount> pulses_us{};

  friend bool operator==(const PwmFrame&, const PwmFrame&) = default;
};

/// Default bank: neutrals at the erect-stance pulses, right-leg servos
/// mounted +1 and left-leg servos mirrored -1.
inline ServoBank default_servo_bank() {
  ServoBank bank;
  for (int i = 0; i < kJointCount; ++i) {
    const auto id = static_cast<JointId>(i);
    bank[i] = ServoConfig{.joint = id,
                          .neutral_us = kErectStancePulses[i],
                          .sign = joint_leg(id) == Leg::Right ? +1 : -1};
  }
  return bank;
}

/// Linear pulse-to-angle map: sign * (pulse - neutral) * scale, in radians.
inline double pulse_to_angle(const ServoConfig& cfg, int pulse_us) {
  if (pulse_us < cfg.min_us || pulse_us > cfg.max_us) {
    throw std::out_of_range(std::string(joint_name(cfg.joint)) + ": pulse " +
                            std::to_string(pulse_us) + " out of range [" +
                            std::to_string(cfg.min_us) + ", " + std::to_string(cfg.max_us) + "]");
  }
  const double deg = cfg.sign * (pulse_us - cfg.neutral_us) * cfg.scale_deg_per_us;
  return deg_to_rad(deg);
}

/// Inverse of pulse_to_angle, rounded to the nearest whole microsecond.
inline int angle_to_pulse(const ServoConfig& cfg, double angle_rad) {
  if (!std::isfinite(angle_rad)) {
    throw std::invalid_argument(std::string(joint_name(cfg.joint)) + ": non-finite angle");
  }
  const double offset_us = rad_to_deg(angle_rad) / cfg.scale_deg_per_us * cfg.sign;
  const long long pulse = std::llround(cfg.neutral_us + offset_us);
  if (pulse < cfg.min_us || pulse > cfg.max_us) {
    throw std::out_of_range(std::string(joint_name(cfg.joint)) + ": angle " +
                            std::to_string(angle_rad) + " rad maps to pulse " +
                            std::to_string(pulse) + " outside [" + std::to_string(cfg.min_us) +
                            ", " + std::to_string(cfg.max_us) + "]");
  }
  return static_cast<int>(pulse);
}

inline model::JointVector frame_to_joints(const PwmFrame& frame, const ServoBank& bank) {
  model::JointVector joints;
  for (int i = 0; i < kJointCount; ++i) {
    joints[i] = pulse_to_angle(bank[i], frame.pulses_us[i]);
  }
  return joints;
}

struct Violation {
  JointId joint;
  int pulse_us;
  int min_us;
  int max_us;
};

inline std::string to_string(const Violation& v) {
  return std::string(joint_name(v.joint)) + " pulse " + std::to_string(v.pulse_us) +
         " out of range [" + std::to_string(v.min_us) + ", " + std::to_string(v.max_us) + "]";
}

/// Reports every pulse outside its servo's [min_us, max_us]; boundaries
/// are inclusive. An empty result means the frame is valid.
inline std::vector<Violation> validate_frame(const PwmFrame& frame, const ServoBank& bank) {
  std::vector<Violation> violations;
  for (int i = 0; i < kJointCount; ++i) {
    const int p = frame.pulses_us[i];
    if (p < bank[i].min_us || p > bank[i].max_us) {
      violations.push_back({bank[i].joint, p, bank[i].min_us, bank[i].max_us});
    }
  }
  return violations;
}

/// Parses a servo config file. Each line overrides one joint:
///   <JOINT_ID> neutral=<int> sign=<+1|-1> [min=<int>] [max=<int>] [scale=<float>]
/// Joints without a line keep their defaults.
inline ServoBank parse_servo_config(std::string_view text) {
  ServoBank bank = default_servo_bank();
  std::array<bool, kJointCount> seen{};

  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream tokens{line};
    std::string joint_token;
    if (!(tokens >> joint_token)) continue;

    const auto error = [line_no](const std::string& msg) -> std::invalid_argument {
      return std::invalid_argument("servo config line " + std::to_string(line_no) + ": " + msg);
    };

    JointId id;
    try {
      id = joint_from_name(joint_token);
    } catch (const std::invalid_argument&) {
      throw error("unknown joint '" + joint_token + "'");
    }
    const int idx = static_cast<int>(id);
    if (seen[idx]) throw error("duplicate joint '" + joint_token + "'");
    seen[idx] = true;

    ServoConfig cfg = bank[idx];
    bool have_neutral = false, have_sign = false;
    std::string kv;
    while (tokens >> kv) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw error("expected key=value, got '" + kv + "'");
      const std::string key = kv.substr(0, eq);
      const std::string value = kv.substr(eq + 1);
      if (key == "sign") {
        if (value == "+1") cfg.sign = +1;
        else if (value == "-1") cfg.sign = -1;
        else throw error("sign must be +1 or -1, got '" + value + "'");
        have_sign = true;
        continue;
      }
      if (key == "scale") {
        double parsed = 0.0;
        const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), parsed);
        if (ec != std::errc() || ptr != value.data() + value.size()) {
          throw error("bad number '" + value + "'");
        }
        cfg.scale_deg_per_us = parsed;
        continue;
      }
      int parsed = 0;
      const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), parsed);
      if (ec != std::errc() || ptr != value.data() + value.size()) {
        throw error("bad integer '" + value + "'");
      }
      if (key == "neutral") { cfg.neutral_us = parsed; have_neutral = true; }
      else if (key == "min") cfg.min_us = parsed;
      else if (key == "max") cfg.max_us = parsed;
      else throw error("unknown key '" + key + "'");
    }
    if (!have_neutral || !have_sign) throw error("neutral= and sign= are required");
    try {
      cfg.validate();
    } catch (const std::invalid_argument& e) {
      throw error(e.what());
    }
    bank[idx] = cfg;
  }
  return bank;
}

}  // namespace gaitforge::servo
