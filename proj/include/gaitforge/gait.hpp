#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "gaitforge/servo.hpp"
#include "gaitforge/types.hpp"

namespace gaitforge::gait {

enum class Support { Double, SingleLeft, SingleRight };

inline constexpr std::string_view support_tag(Support s) {
  switch (s) {
    case Support::Double: return "D";
    case Support::SingleLeft: return "SL";
    case Support::SingleRight: return "SR";
  }
  return "?";
}

inline Support support_from_tag(std::string_view tag) {
  if (tag == "D") return Support::Double;
  if (tag == "SL") return Support::SingleLeft;
  if (tag == "SR") return Support::SingleRight;
  throw std::invalid_argument("unknown support tag '" + std::string(tag) + "'");
}

/// The leg in the air during a single-support stage; absent for double support.
inline constexpr std::optional<Leg> swing_leg(Support s) {
  switch (s) {
    case Support::SingleLeft: return Leg::Right;
    case Support::SingleRight: return Leg::Left;
    case Support::Double: break;
  }
  return std::nullopt;
}

/// One keyframe of the walking pattern: ten pulse widths plus the support
/// phase that holds while the pattern moves into this stage.
struct Stage {
  int index = 1;  // 1-based
  std::array<int, kJointCount> pulses_us{};
  Support support = Support::Double;

  friend bool operator==(const Stage&, const Stage&) = default;
};

struct GaitTable {
  std::string name;
  std::vector<Stage> stages;

  friend bool operator==(const GaitTable&, const GaitTable&) = default;

  void validate() const {
    if (name.empty() || name.find_first_of(" \t") != std::string::npos) {
      throw std::invalid_argument("gait table: name must be a non-empty identifier");
    }
    if (stages.size() < 2) throw std::invalid_argument("gait table: need at least 2 stages");
    for (size_t i = 0; i < stages.size(); ++i) {
      if (stages[i].index != static_cast<int>(i) + 1) {
        throw std::invalid_argument("gait table: stage indices must be 1..k in order");
      }
      for (int p : stages[i].pulses_us) {
        if (p < servo::kPulseMin || p > servo::kPulseMax) {
          throw std::invalid_argument("gait table: pulse " + std::to_string(p) +
                                      " out of range [" + std::to_string(servo::kPulseMin) +
                                      ", " + std::to_string(servo::kPulseMax) + "]");
        }
      }
    }
  }
};

/// The published five-stage forward walking pattern. Stage 1 is the erect
/// double-support posture; the cycle closes by wrapping stage 5 back to
/// stage 1.
inline GaitTable builtin_forward_table() {
  // Pulse widths per joint across stages 1..5.
  constexpr std::array<std::array<int, 5>, kJointCount> pulses = {{
      {870, 891, 891, 870, 870},       // RJ1
      {1152, 1043, 1043, 1152, 826},   // RJ2
      {957, 1043, 1043, 957, 957},     // RJ3
      {957, 935, 935, 957, 1109},      // RJ4
      {1696, 1500, 1500, 1500, 1522},  // RJ5
      {2152, 2152, 2152, 2152, 2152},  // LJ1
      {1043, 1087, 826, 1043, 1043},   // LJ2
      {957, 891, 891, 957, 957},       // LJ3
      {1935, 1913, 1913, 1935, 1935},  // LJ4
      {1761, 2000, 1783, 1826, 2000},  // LJ5
  }};
  constexpr std::array<Support, 5> support = {Support::Double, Support::SingleRight,
                                              Support::Double, Support::SingleLeft,
                                              Support::Double};

  GaitTable table;
  table.name = "forward";
  for (int s = 0; s < 5; ++s) {
    Stage stage;
    stage.index = s + 1;
    stage.support = support[s];
    for (int j = 0; j < kJointCount; ++j) stage.pulses_us[j] = pulses[j][s];
    table.stages.push_back(stage);
  }
  return table;
}

namespace detail {

inline std::invalid_argument parse_error(int line_no, const std::string& msg) {
  return std::invalid_argument("gait table line " + std::to_string(line_no) + ": " + msg);
}

inline long long parse_int(std::string_view token, int line_no, const char* what) {
  long long value = 0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    throw parse_error(line_no, std::string("bad ") + what + " '" + std::string(token) + "'");
  }
  return value;
}

}  // namespace detail

/// Parses the plain-text gait table format:
///   GAIT <name> STAGES <k>
///   SUPPORT <tag_1> ... <tag_k>        tags in {D, SL, SR}
///   <JOINT_ID> <p_1> ... <p_k>         one line per joint, all ten exactly once
/// '#' starts a comment; blank lines are ignored.
inline GaitTable parse_gait_table(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;

  auto next_line = [&](std::vector<std::string>& tokens) -> bool {
    while (std::getline(in, raw)) {
      ++line_no;
      if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
      tokens.clear();
      std::istringstream split{raw};
      std::string tok;
      while (split >> tok) tokens.push_back(tok);
      if (!tokens.empty()) return true;
    }
    return false;
  };

  std::vector<std::string> tokens;
  if (!next_line(tokens)) throw detail::parse_error(line_no, "missing GAIT header");
  if (tokens.size() != 4 || tokens[0] != "GAIT" || tokens[2] != "STAGES") {
    throw detail::parse_error(line_no, "expected 'GAIT <name> STAGES <k>'");
  }
  GaitTable table;
  table.name = tokens[1];
  const long long stage_count = detail::parse_int(tokens[3], line_no, "stage count");
  if (stage_count < 2) throw detail::parse_error(line_no, "need at least 2 stages");
  const auto k = static_cast<size_t>(stage_count);

  if (!next_line(tokens)) throw detail::parse_error(line_no, "missing SUPPORT line");
  if (tokens.empty() || tokens[0] != "SUPPORT") {
    throw detail::parse_error(line_no, "expected 'SUPPORT <tag_1> ... <tag_k>'");
  }
  if (tokens.size() != k + 1) {
    throw detail::parse_error(line_no, "expected " + std::to_string(k) + " support tags");
  }
  table.stages.resize(k);
  for (size_t s = 0; s < k; ++s) {
    table.stages[s].index = static_cast<int>(s) + 1;
    try {
      table.stages[s].support = support_from_tag(tokens[s + 1]);
    } catch (const std::invalid_argument& e) {
      throw detail::parse_error(line_no, e.what());
    }
  }

  std::array<bool, kJointCount> seen{};
  for (int row = 0; row < kJointCount; ++row) {
    if (!next_line(tokens)) throw detail::parse_error(line_no, "missing joint rows");
    JointId id;
    try {
      id = joint_from_name(tokens[0]);
    } catch (const std::invalid_argument& e) {
      throw detail::parse_error(line_no, e.what());
    }
    const int idx = static_cast<int>(id);
    if (seen[idx]) throw detail::parse_error(line_no, "duplicate joint '" + tokens[0] + "'");
    seen[idx] = true;
    if (tokens.size() != k + 1) {
      throw detail::parse_error(line_no, "expected " + std::to_string(k) + " values");
    }
    for (size_t s = 0; s < k; ++s) {
      const long long p = detail::parse_int(tokens[s + 1], line_no, "pulse");
      if (p < servo::kPulseMin || p > servo::kPulseMax) {
        throw detail::parse_error(line_no, "pulse out of range: " + std::to_string(p));
      }
      table.stages[s].pulses_us[idx] = static_cast<int>(p);
    }
  }
  if (next_line(tokens)) throw detail::parse_error(line_no, "unexpected extra line");

  table.validate();
  return table;
}

/// Canonical serialization; parse_gait_table(serialize_gait_table(t)) == t.
inline std::string serialize_gait_table(const GaitTable& table) {
  table.validate();
  std::ostringstream out;
  out << "GAIT " << table.name << " STAGES " << table.stages.size() << "\n";
  out << "SUPPORT";
  for (const Stage& s : table.stages) out << ' ' << support_tag(s.support);
  out << "\n";
  for (int j = 0; j < kJointCount; ++j) {
    out << joint_name(static_cast<JointId>(j));
    for (const Stage& s : table.stages) out << ' ' << s.pulses_us[j];
    out << "\n";
  }
  return out.str();
}

/// Linear pulse-space interpolation from one stage to the next. Frame k of
/// n carries round(from + (to - from) * k / n) per joint, so the final
/// frame equals the destination exactly. Timestamps are relative to the
/// transition start: k * frame_period_ms.
inline std::vector<servo::PwmFrame> interpolate_transition(const Stage& from, const Stage& to,
                                                           int duration_ms,
                                                           int frame_period_ms = servo::kFramePeriodMs) {
  if (frame_period_ms <= 0) throw std::invalid_argument("interpolate: frame period must be > 0");
  if (duration_ms <= 0 || duration_ms % frame_period_ms != 0) {
    throw std::invalid_argument("interpolate: duration must be a positive multiple of " +
                                std::to_string(frame_period_ms) + " ms");
  }
  const int n = duration_ms / frame_period_ms;
  std::vector<servo::PwmFrame> frames(static_cast<size_t>(n));
  for (int k = 1; k <= n; ++k) {
    servo::PwmFrame& f = frames[static_cast<size_t>(k - 1)];
    f.t_ms = static_cast<int64_t>(k) * frame_period_ms;
    for (int j = 0; j < kJointCount; ++j) {
      const long long delta = to.pulses_us[j] - from.pulses_us[j];
      const double value = from.pulses_us[j] + static_cast<double>(delta * k) / n;
      f.pulses_us[j] = static_cast<int>(std::llround(value));
    }
  }
  return frames;
}

struct TrajectoryFrame {
  servo::PwmFrame frame;
  Support support = Support::Double;

  friend bool operator==(const TrajectoryFrame&, const TrajectoryFrame&) = default;
};

/// A fully expanded walk: one frame every frame_period_ms, each carrying
/// the support phase of its transition's destination stage.
struct Trajectory {
  int frame_period_ms = servo::kFramePeriodMs;
  std::vector<TrajectoryFrame> frames;
};

/// Expands the cyclic stage sequence 1 -> 2 -> ... -> k -> 1, n_cycles
/// times, prefixed with a single hold frame of stage 1 at t=0.
inline Trajectory generate_cycle(const GaitTable& table, int stage_duration_ms, int n_cycles) {
  table.validate();
  if (n_cycles < 1) throw std::invalid_argument("generate_cycle: n_cycles must be >= 1");

  Trajectory traj;
  const size_t k = table.stages.size();

  TrajectoryFrame hold;
  hold.frame.t_ms = 0;
  hold.frame.pulses_us = table.stages[0].pulses_us;
  hold.support = table.stages[0].support;
  traj.frames.push_back(hold);

  int64_t base_ms = 0;
  for (int cycle = 0; cycle < n_cycles; ++cycle) {
    for (size_t j = 0; j < k; ++j) {
      const Stage& from = table.stages[j];
      const Stage& to = table.stages[(j + 1) % k];
      for (servo::PwmFrame f : interpolate_transition(from, to, stage_duration_ms,
                                                      traj.frame_period_ms)) {
        f.t_ms += base_ms;
        traj.frames.push_back({f, to.support});
      }
      base_ms += stage_duration_ms;
    }
  }
  return traj;
}

/// Support phase at a trajectory timestamp, reconstructed from the stage
/// schedule alone. Agrees with generate_cycle's per-frame metadata.
inline Support support_at(const GaitTable& table, int stage_duration_ms, int64_t t_ms,
                          int frame_period_ms = servo::kFramePeriodMs) {
  if (frame_period_ms <= 0 || stage_duration_ms <= 0 || stage_duration_ms % frame_period_ms != 0) {
    throw std::invalid_argument("support_at: bad stage duration or frame period");
  }
  if (t_ms < 0 || t_ms % frame_period_ms != 0) {
    throw std::invalid_argument("support_at: timestamp not on the frame grid");
  }
  if (t_ms == 0) return table.stages[0].support;
  const int64_t n = stage_duration_ms / frame_period_ms;
  const int64_t index = t_ms / frame_period_ms;
  const auto k = static_cast<int64_t>(table.stages.size());
  const int64_t transition = (index - 1) / n % k;
  return table.stages[static_cast<size_t>((transition + 1) % k)].support;
}

enum class Direction { Clockwise, Anticlockwise, None };

inline constexpr std::string_view direction_tag(Direction d) {
  switch (d) {
    case Direction::Clockwise: return "CW";
    case Direction::Anticlockwise: return "ACW";
    case Direction::None: return "NONE";
  }
  return "?";
}

inline Direction direction_from_tag(std::string_view tag) {
  if (tag == "CW") return Direction::Clockwise;
  if (tag == "ACW") return Direction::Anticlockwise;
  if (tag == "NONE") return Direction::None;
  throw std::invalid_argument("unknown direction '" + std::string(tag) + "'");
}

/// Expected rotation direction for one joint over one stage transition.
/// Joints without an entry are unspecified.
struct NarrativeEntry {
  int from_stage = 1;
  int to_stage = 2;
  JointId joint = JointId::RJ1;
  Direction dir = Direction::None;

  friend bool operator==(const NarrativeEntry&, const NarrativeEntry&) = default;
};

struct NarrativeSpec {
  std::string name;
  std::vector<NarrativeEntry> entries;

  friend bool operator==(const NarrativeSpec&, const NarrativeSpec&) = default;
};

/// The rotation directions the forward pattern's stage-by-stage description
/// names. The 5 -> 1 wrap names none.
inline constexpr std::string_view builtin_forward_narrative_text() {
  return "# Joint rotation directions stated per stage transition of the\n"
         "# builtin forward pattern. Joints not listed are unspecified.\n"
         "NARRATIVE forward\n"
         "1->2 LJ2 ACW\n"
         "1->2 LJ3 ACW\n"
         "1->2 LJ4 ACW\n"
         "1->2 RJ5 CW\n"
         "1->2 RJ1 CW\n"
         "2->3 LJ2 CW\n"
         "2->3 LJ3 CW\n"
         "2->3 LJ4 CW\n"
         "2->3 LJ5 ACW\n"
         "2->3 RJ1 NONE\n"
         "2->3 RJ5 NONE\n"
         "2->3 RJ2 CW\n"
         "2->3 RJ3 CW\n"
         "2->3 RJ4 CW\n"
         "3->4 LJ5 ACW\n"
         "3->4 LJ1 ACW\n"
         "3->4 LJ2 CW\n"
         "3->4 LJ3 CW\n"
         "3->4 LJ4 CW\n"
         "3->4 RJ2 ACW\n"
         "3->4 RJ3 CW\n"
         "3->4 RJ4 CW\n"
         "4->5 RJ2 CW\n"
         "4->5 RJ3 CW\n"
         "4->5 RJ4 CW\n"
         "4->5 LJ5 CW\n"
         "4->5 LJ1 CW\n";
}

/// Parses a narrative spec:
///   NARRATIVE <name>
///   <from>-><to> <JOINT_ID> <CW|ACW|NONE>
inline NarrativeSpec parse_narrative(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  NarrativeSpec spec;
  bool have_header = false;

  while (std::getline(in, raw)) {
    ++line_no;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    std::istringstream split{raw};
    std::vector<std::string> tokens;
    std::string tok;
    while (split >> tok) tokens.push_back(tok);
    if (tokens.empty()) continue;

    const auto error = [line_no](const std::string& msg) -> std::invalid_argument {
      return std::invalid_argument("narrative line " + std::to_string(line_no) + ": " + msg);
    };

    if (!have_header) {
      if (tokens.size() != 2 || tokens[0] != "NARRATIVE") {
        throw error("expected 'NARRATIVE <name>'");
      }
      spec.name = tokens[1];
      have_header = true;
      continue;
    }
    if (tokens.size() != 3) throw error("expected '<from>-><to> <JOINT_ID> <CW|ACW|NONE>'");

    const auto arrow = tokens[0].find("->");
    if (arrow == std::string::npos) throw error("expected '<from>-><to>'");
    NarrativeEntry entry;
    entry.from_stage = static_cast<int>(detail::parse_int(
        std::string_view(tokens[0]).substr(0, arrow), line_no, "stage index"));
    entry.to_stage = static_cast<int>(detail::parse_int(
        std::string_view(tokens[0]).substr(arrow + 2), line_no, "stage index"));
    try {
      entry.joint = joint_from_name(tokens[1]);
      entry.dir = direction_from_tag(tokens[2]);
    } catch (const std::invalid_argument& e) {
      throw error(e.what());
    }
    spec.entries.push_back(entry);
  }
  if (!have_header) throw std::invalid_argument("narrative: missing NARRATIVE header");
  return spec;
}

inline NarrativeSpec builtin_forward_narrative() {
  return parse_narrative(builtin_forward_narrative_text());
}

enum class NarrativeVerdict { Match, Mismatch, ZeroButSpecified };

inline constexpr std::string_view verdict_tag(NarrativeVerdict v) {
  switch (v) {
    case NarrativeVerdict::Match: return "MATCH";
    case NarrativeVerdict::Mismatch: return "MISMATCH";
    case NarrativeVerdict::ZeroButSpecified: return "ZERO-BUT-SPECIFIED";
  }
  return "?";
}

struct NarrativeCheck {
  NarrativeEntry entry;
  int delta_pulse = 0;    // to - from
  int realized_sign = 0;  // sign(delta) * servo sign; +1 means anticlockwise
  NarrativeVerdict verdict = NarrativeVerdict::Match;
};

/// Compares each narrative entry against the table's pulse deltas under
/// the convention that anticlockwise is the positive angle direction.
/// The report is data; disagreements are not failures.
inline std::vector<NarrativeCheck> check_narrative(const GaitTable& table,
                                                   const NarrativeSpec& spec,
                                                   const servo::ServoBank& bank) {
  table.validate();
  const auto k = static_cast<int>(table.stages.size());
  std::vector<NarrativeCheck> report;
  report.reserve(spec.entries.size());

  for (const NarrativeEntry& entry : spec.entries) {
    if (entry.from_stage < 1 || entry.from_stage > k || entry.to_stage < 1 || entry.to_stage > k) {
      throw std::invalid_argument("narrative: transition " + std::to_string(entry.from_stage) +
                                  "->" + std::to_string(entry.to_stage) + " not in table");
    }
    const int j = static_cast<int>(entry.joint);
    const int from = table.stages[static_cast<size_t>(entry.from_stage - 1)].pulses_us[j];
    const int to = table.stages[static_cast<size_t>(entry.to_stage - 1)].pulses_us[j];

    NarrativeCheck check;
    check.entry = entry;
    check.delta_pulse = to - from;
    const int delta_sign = (check.delta_pulse > 0) - (check.delta_pulse < 0);
    check.realized_sign = delta_sign * bank[static_cast<size_t>(j)].sign;

    const int expected_sign = entry.dir == Direction::Anticlockwise ? +1
                              : entry.dir == Direction::Clockwise   ? -1
                                                                    : 0;
    if (check.realized_sign == expected_sign) {
      check.verdict = NarrativeVerdict::Match;
    } else if (expected_sign != 0 && check.realized_sign == 0) {
      check.verdict = NarrativeVerdict::ZeroButSpecified;
    } else {
      check.verdict = NarrativeVerdict::Mismatch;
    }
    report.push_back(check);
  }
  return report;
}

inline std::string format_narrative_report(const std::vector<NarrativeCheck>& report) {
  std::ostringstream out;
  for (const NarrativeCheck& c : report) {
    const std::string_view realized = c.realized_sign > 0   ? "ACW"
                                      : c.realized_sign < 0 ? "CW"
                                                            : "NONE";
    out << c.entry.from_stage << "->" << c.entry.to_stage << ' ' << joint_name(c.entry.joint)
        << " expected=" << direction_tag(c.entry.dir) << " delta=" << (c.delta_pulse > 0 ? "+" : "")
        << c.delta_pulse << " realized=" << realized << " verdict=" << verdict_tag(c.verdict)
        << "\n";
  }
  return out.str();
}

}  // namespace gaitforge::gait
