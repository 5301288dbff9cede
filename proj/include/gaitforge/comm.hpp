#pragma once

#include <charconv>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "gaitforge/gait.hpp"
#include "gaitforge/servo.hpp"
#include "gaitforge/types.hpp"

namespace gaitforge::comm {

struct Forward {
  int cycles = 1;
};
struct Stop {};
struct SetStageDuration {
  int ms = 500;
};
using Command = std::variant<Forward, Stop, SetStageDuration>;

/// Parses one command line. Grammar (case-sensitive, single spaces):
///   CMD FWD <n>    walk n cycles, n >= 1
///   CMD STOP       stop at the next erect keyframe
///   CMD DUR <ms>   stage duration for subsequent walks, positive multiple of 20
inline Command parse_command(std::string_view line) {
  std::istringstream split{std::string(line)};
  std::vector<std::string> tokens;
  std::string tok;
  while (split >> tok) tokens.push_back(tok);

  if (tokens.empty() || tokens[0] != "CMD") {
    throw std::invalid_argument("command: expected 'CMD', got '" +
                                (tokens.empty() ? std::string() : tokens[0]) + "'");
  }
  if (tokens.size() < 2) throw std::invalid_argument("command: missing verb");
  const std::string& verb = tokens[1];

  auto parse_arg = [&](const char* what) -> long long {
    if (tokens.size() != 3) {
      throw std::invalid_argument(std::string("command: ") + verb + " takes exactly one " + what);
    }
    long long value = 0;
    const std::string& arg = tokens[2];
    const auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), value);
    if (ec != std::errc() || ptr != arg.data() + arg.size()) {
      throw std::invalid_argument("command: bad integer '" + arg + "'");
    }
    return value;
  };

  if (verb == "FWD") {
    const long long cycles = parse_arg("cycle count");
    if (cycles < 1) throw std::invalid_argument("command: cycles must be >= 1, got '" +
                                                tokens[2] + "'");
    return Forward{static_cast<int>(cycles)};
  }
  if (verb == "STOP") {
    if (tokens.size() != 2) throw std::invalid_argument("command: STOP takes no argument");
    return Stop{};
  }
  if (verb == "DUR") {
    const long long ms = parse_arg("duration");
    if (ms <= 0 || ms % servo::kFramePeriodMs != 0) {
      throw std::invalid_argument("command: duration must be a positive multiple of " +
                                  std::to_string(servo::kFramePeriodMs) + " ms, got '" +
                                  tokens[2] + "'");
    }
    return SetStageDuration{static_cast<int>(ms)};
  }
  throw std::invalid_argument("command: unknown verb '" + verb + "'");
}

namespace detail {

inline unsigned xor_checksum(std::string_view bytes) {
  unsigned ck = 0;
  for (unsigned char c : bytes) ck ^= c;
  return ck & 0xFFu;
}

inline char hex_digit(unsigned v) { return "0123456789ABCDEF"[v & 0xFu]; }

inline int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace detail

enum class WireErrorKind { Checksum, BadField, Arity };

class WireError : public std::runtime_error {
 public:
  WireError(WireErrorKind kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}
  WireErrorKind kind() const { return kind_; }

 private:
  WireErrorKind kind_;
};

/// Serializes a frame as `F <t_ms> <p1> ... <p10> *<CK>` where CK is the
/// XOR of every byte before the space preceding '*', as two uppercase hex
/// digits.
inline std::string encode_frame(const servo::PwmFrame& frame) {
  std::ostringstream body;
  body << "F " << frame.t_ms;
  for (int p : frame.pulses_us) body << ' ' << p;
  std::string line = body.str();
  const unsigned ck = detail::xor_checksum(line);
  line += " *";
  line += detail::hex_digit(ck >> 4);
  line += detail::hex_digit(ck);
  return line;
}

/// Inverse of encode_frame. Verifies the checksum before touching the
/// fields; checksum, malformed-field, and wrong-pulse-count failures are
/// distinct error kinds.
inline servo::PwmFrame decode_frame(std::string_view line) {
  const auto marker = line.rfind(" *");
  if (marker == std::string_view::npos || line.size() != marker + 4) {
    throw WireError(WireErrorKind::BadField, "missing checksum marker");
  }
  const int hi = detail::hex_value(line[marker + 2]);
  const int lo = detail::hex_value(line[marker + 3]);
  if (hi < 0 || lo < 0) throw WireError(WireErrorKind::BadField, "bad checksum digits");

  const std::string_view body = line.substr(0, marker);
  const unsigned stated = static_cast<unsigned>(hi << 4 | lo);
  const unsigned actual = detail::xor_checksum(body);
  if (stated != actual) {
    throw WireError(WireErrorKind::Checksum, "checksum mismatch");
  }

  std::istringstream split{std::string(body)};
  std::vector<std::string> tokens;
  std::string tok;
  while (split >> tok) tokens.push_back(tok);
  if (tokens.empty() || tokens[0] != "F") {
    throw WireError(WireErrorKind::BadField, "expected frame marker 'F'");
  }
  if (tokens.size() != 2 + kJointCount) {
    throw WireError(WireErrorKind::Arity, "expected " + std::to_string(kJointCount) +
                                              " pulses, got " + std::to_string(tokens.size() - 2));
  }

  auto parse_int = [](const std::string& s, const char* what) -> long long {
    long long value = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
      throw WireError(WireErrorKind::BadField, std::string("bad ") + what + " '" + s + "'");
    }
    return value;
  };

  servo::PwmFrame frame;
  frame.t_ms = parse_int(tokens[1], "timestamp");
  if (frame.t_ms < 0) throw WireError(WireErrorKind::BadField, "negative timestamp");
  for (int j = 0; j < kJointCount; ++j) {
    frame.pulses_us[j] = static_cast<int>(parse_int(tokens[2 + j], "pulse"));
  }
  return frame;
}

/// The controlling side of the link: turns commands into a frame stream,
/// emitting every frame whose timestamp has been reached at each tick.
/// Time is caller-supplied; nothing reads a wall clock.
class Master {
 public:
  explicit Master(gait::GaitTable table, int stage_duration_ms = 500)
      : table_(std::move(table)), stage_duration_ms_(stage_duration_ms) {
    table_.validate();
  }

  /// Applies a command at the given simulated time.
  void handle_command(const Command& cmd, int64_t now_ms) {
    if (const auto* fwd = std::get_if<Forward>(&cmd)) {
      if (running_) throw std::invalid_argument("master: walk already in progress");
      trajectory_ = gait::generate_cycle(table_, stage_duration_ms_, fwd->cycles);
      frames_per_cycle_ = static_cast<size_t>(table_.stages.size()) *
                          static_cast<size_t>(stage_duration_ms_ / trajectory_.frame_period_ms);
      cursor_ = 0;
      start_ms_ = now_ms;
      running_ = true;
      return;
    }
    if (std::holds_alternative<Stop>(cmd)) {
      if (!running_) return;
      // Truncate at the next erect (stage 1) frame so the walk always
      // halts in the stable standing posture.
      const size_t last_emitted = cursor_ == 0 ? 0 : cursor_ - 1;
      const size_t boundary =
          (last_emitted + frames_per_cycle_ - 1) / frames_per_cycle_ * frames_per_cycle_;
      trajectory_.frames.resize(boundary + 1);
      return;
    }
    stage_duration_ms_ = std::get<SetStageDuration>(cmd).ms;
  }

  /// Emits every not-yet-sent frame due by now_ms, encoded for the wire.
  std::vector<std::string> tick(int64_t now_ms) {
    if (now_ms < last_tick_ms_) throw std::invalid_argument("master: time went backwards");
    last_tick_ms_ = now_ms;
    std::vector<std::string> lines;
    while (running_ && cursor_ < trajectory_.frames.size() &&
           start_ms_ + trajectory_.frames[cursor_].frame.t_ms <= now_ms) {
      lines.push_back(encode_frame(trajectory_.frames[cursor_].frame));
      ++cursor_;
    }
    if (running_ && cursor_ >= trajectory_.frames.size()) running_ = false;
    return lines;
  }

  bool running() const { return running_; }
  int stage_duration_ms() const { return stage_duration_ms_; }
  const gait::GaitTable& table() const { return table_; }

 private:
  gait::GaitTable table_;
  int stage_duration_ms_;
  gait::Trajectory trajectory_;
  size_t frames_per_cycle_ = 0;
  size_t cursor_ = 0;
  int64_t start_ms_ = 0;
  int64_t last_tick_ms_ = 0;
  bool running_ = false;
};

/// The servo-controller side: validates each wire line and applies it,
/// answering `ACK <t_ms>` or `ERR <code> <detail>` in-band.
/// Codes: 1 checksum, 2 parse, 3 range.
class Slave {
 public:
  explicit Slave(servo::ServoBank bank) : bank_(bank) {}

  std::string apply_line(std::string_view line) {
    servo::PwmFrame frame;
    try {
      frame = decode_frame(line);
    } catch (const WireError& e) {
      ++error_count_;
      const int code = e.kind() == WireErrorKind::Checksum ? 1 : 2;
      return "ERR " + std::to_string(code) + " " + e.what();
    }
    const auto violations = servo::validate_frame(frame, bank_);
    if (!violations.empty()) {
      ++error_count_;
      return "ERR 3 " + servo::to_string(violations.front());
    }
    last_applied_ = frame;
    applied_.push_back(frame);
    return "ACK " + std::to_string(frame.t_ms);
  }

  const std::optional<servo::PwmFrame>& last_applied() const { return last_applied_; }
  const std::vector<servo::PwmFrame>& applied_frames() const { return applied_; }
  int error_count() const { return error_count_; }

 private:
  servo::ServoBank bank_;
  std::optional<servo::PwmFrame> last_applied_;
  std::vector<servo::PwmFrame> applied_;
  int error_count_ = 0;
};

}  // namespace gaitforge::comm
