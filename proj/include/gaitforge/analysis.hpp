#pragma once

#include <cstdint>
#include <cstdio>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "gaitforge/gait.hpp"
#include "gaitforge/model.hpp"
#include "gaitforge/servo.hpp"
#include "gaitforge/stability.hpp"
#include "gaitforge/types.hpp"

namespace gaitforge::analysis {

/// One CSV row of the walk report.
struct ReportRow {
  int64_t t_ms = 0;
  std::array<int, kJointCount> pulses_us{};
  std::array<double, kJointCount> angles_rad{};
  Vec3 com;
  double margin_m = 0.0;
  double y_zmp = 0.0;
  gait::Support support = gait::Support::Double;
  bool stable = false;  // margin_m >= 0
};

inline stability::ContactFlags contacts_for(gait::Support support) {
  switch (support) {
    case gait::Support::Double: return {true, true};
    case gait::Support::SingleLeft: return {false, true};
    case gait::Support::SingleRight: return {true, false};
  }
  return {true, true};
}

/// Maps every trajectory frame through the servo model and forward
/// kinematics, then runs the per-frame stability analysis.
inline std::vector<ReportRow> analyze(const gait::Trajectory& traj, const servo::ServoBank& bank,
                                      const model::BipedGeometry& geom,
                                      double g = stability::kGravity) {
  std::vector<ReportRow> rows;
  if (traj.frames.empty()) return rows;

  std::vector<stability::PoseSample> samples;
  samples.reserve(traj.frames.size());
  std::vector<model::JointVector> joints;
  joints.reserve(traj.frames.size());
  for (const gait::TrajectoryFrame& tf : traj.frames) {
    joints.push_back(servo::frame_to_joints(tf.frame, bank));
    samples.push_back({tf.frame.t_ms, model::forward_kinematics(geom, joints.back()),
                       contacts_for(tf.support)});
  }

  const auto stability_rows = stability::analyze_trajectory(samples, geom, g);

  rows.reserve(traj.frames.size());
  for (size_t i = 0; i < traj.frames.size(); ++i) {
    ReportRow row;
    row.t_ms = traj.frames[i].frame.t_ms;
    row.pulses_us = traj.frames[i].frame.pulses_us;
    row.angles_rad = joints[i].angles;
    row.com = {stability_rows[i].com_xy.x, stability_rows[i].com_xy.y, stability_rows[i].com_z};
    row.margin_m = stability_rows[i].margin_m;
    row.y_zmp = stability_rows[i].y_zmp;
    row.support = traj.frames[i].support;
    row.stable = row.margin_m >= 0.0;
    rows.push_back(row);
  }
  return rows;
}

inline constexpr std::string_view kCsvHeader =
    "t_ms,"
    "pulse_RJ1,pulse_RJ2,pulse_RJ3,pulse_RJ4,pulse_RJ5,"
    "pulse_LJ1,pulse_LJ2,pulse_LJ3,pulse_LJ4,pulse_LJ5,"
    "angle_RJ1,angle_RJ2,angle_RJ3,angle_RJ4,angle_RJ5,"
    "angle_LJ1,angle_LJ2,angle_LJ3,angle_LJ4,angle_LJ5,"
    "com_x,com_y,com_z,margin_m,y_zmp,support,stable";

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

/// Writes the report with the fixed header row. Output is deterministic:
/// identical rows serialize to identical bytes.
inline void write_csv(std::ostream& out, std::span<const ReportRow> rows) {
  out << kCsvHeader << "\n";
  for (const ReportRow& row : rows) {
    out << row.t_ms;
    for (int p : row.pulses_us) out << ',' << p;
    for (double a : row.angles_rad) out << ',' << format_double(a);
    out << ',' << format_double(row.com.x) << ',' << format_double(row.com.y) << ','
        << format_double(row.com.z) << ',' << format_double(row.margin_m) << ','
        << format_double(row.y_zmp) << ',' << gait::support_tag(row.support) << ','
        << (row.stable ? 1 : 0) << "\n";
  }
}

struct Summary {
  size_t frames = 0;
  size_t unstable = 0;
  double min_margin_m = 0.0;
  double mean_margin_m = 0.0;
  std::vector<int64_t> unstable_t_ms;
};

inline Summary summarize(std::span<const ReportRow> rows) {
  Summary s;
  s.frames = rows.size();
  if (rows.empty()) return s;
  double sum = 0.0;
  s.min_margin_m = rows.front().margin_m;
  for (const ReportRow& row : rows) {
    sum += row.margin_m;
    if (row.margin_m < s.min_margin_m) s.min_margin_m = row.margin_m;
    if (!row.stable) {
      ++s.unstable;
      s.unstable_t_ms.push_back(row.t_ms);
    }
  }
  s.mean_margin_m = sum / static_cast<double>(rows.size());
  return s;
}

}  // namespace gaitforge::analysis
