#pragma once

#include <charconv>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "gaitforge/analysis.hpp"
#include "gaitforge/comm.hpp"
#include "gaitforge/gait.hpp"
#include "gaitforge/model.hpp"
#include "gaitforge/servo.hpp"
#include "gaitforge/stability.hpp"
#include "gaitforge/types.hpp"

namespace gaitforge::cli {

/// Options shared by the subcommands. Empty paths mean builtin defaults.
struct Options {
  std::string geometry_path;
  std::string servos_path;
  std::string gait_path = "builtin";
  std::string narrative_path = "builtin";
  int stage_ms = 500;
  int cycles = 1;
  std::string out_path;
  std::string wire_log_path;
  bool color = false;
};

namespace detail {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline model::BipedGeometry load_geometry(const Options& opt) {
  if (opt.geometry_path.empty()) return model::BipedGeometry{};
  return model::parse_geometry_config(read_file(opt.geometry_path));
}

inline servo::ServoBank load_servos(const Options& opt) {
  if (opt.servos_path.empty()) return servo::default_servo_bank();
  return servo::parse_servo_config(read_file(opt.servos_path));
}

inline gait::GaitTable load_table(const std::string& path_or_builtin) {
  if (path_or_builtin == "builtin") return gait::builtin_forward_table();
  return gait::parse_gait_table(read_file(path_or_builtin));
}

inline gait::NarrativeSpec load_narrative(const std::string& path_or_builtin) {
  if (path_or_builtin == "builtin") return gait::builtin_forward_narrative();
  return gait::parse_narrative(read_file(path_or_builtin));
}

struct Style {
  bool enabled = false;
  std::string ok(const std::string& s) const { return enabled ? "\033[32m" + s + "\033[0m" : s; }
  std::string bad(const std::string& s) const { return enabled ? "\033[31m" + s + "\033[0m" : s; }
  std::string warn(const std::string& s) const { return enabled ? "\033[33m" + s + "\033[0m" : s; }
};

inline void print_summary(const analysis::Summary& s, const Style& style, std::ostream& out) {
  out << "frames: " << s.frames << "\n";
  out << "min margin: " << analysis::format_double(s.min_margin_m) << " m\n";
  out << "mean margin: " << analysis::format_double(s.mean_margin_m) << " m\n";
  if (s.unstable == 0) {
    out << style.ok("all frames stable") << "\n";
  } else {
    out << style.bad(std::to_string(s.unstable) + " unstable frames") << " (t_ms:";
    for (int64_t t : s.unstable_t_ms) out << ' ' << t;
    out << ")\n";
  }
}

}  // namespace detail

/// `walk`: generate a cycle trajectory, analyze every frame, write the CSV
/// report. Exit 0 when every frame is statically stable, 2 otherwise,
/// 1 on config errors.
inline int run_walk(const Options& opt, std::ostream& out, std::ostream& err) {
  try {
    const auto geom = detail::load_geometry(opt);
    const auto bank = detail::load_servos(opt);
    const auto table = detail::load_table(opt.gait_path);
    const auto traj = gait::generate_cycle(table, opt.stage_ms, opt.cycles);
    const auto rows = analysis::analyze(traj, bank, geom);

    const std::string out_path = opt.out_path.empty() ? "walk.csv" : opt.out_path;
    std::ofstream csv(out_path, std::ios::binary);
    if (!csv) throw std::runtime_error("cannot write '" + out_path + "'");
    analysis::write_csv(csv, rows);

    const auto summary = analysis::summarize(rows);
    detail::print_summary(summary, {opt.color}, out);
    out << "csv: " << out_path << "\n";
    return summary.unstable == 0 ? 0 : 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

/// `validate`: range-check every stage of a gait table against the servo
/// configs and print the narrative consistency report. Narrative
/// mismatches are warnings; only range failures affect the exit code.
inline int run_validate(const Options& opt, std::ostream& out, std::ostream& err) {
  try {
    const auto bank = detail::load_servos(opt);
    const auto table = detail::load_table(opt.gait_path);
    const auto narrative = detail::load_narrative(opt.narrative_path);
    const detail::Style style{opt.color};

    bool range_ok = true;
    for (const gait::Stage& stage : table.stages) {
      servo::PwmFrame frame;
      frame.t_ms = 0;
      frame.pulses_us = stage.pulses_us;
      const auto violations = servo::validate_frame(frame, bank);
      out << "stage " << stage.index << ": ";
      if (violations.empty()) {
        out << style.ok("ok") << "\n";
      } else {
        range_ok = false;
        out << style.bad("range violations") << "\n";
        for (const auto& v : violations) out << "  " << servo::to_string(v) << "\n";
      }
    }

    const auto report = gait::check_narrative(table, narrative, bank);
    size_t match = 0, mismatch = 0, zero = 0;
    for (const auto& c : report) {
      switch (c.verdict) {
        case gait::NarrativeVerdict::Match: ++match; break;
        case gait::NarrativeVerdict::Mismatch: ++mismatch; break;
        case gait::NarrativeVerdict::ZeroButSpecified: ++zero; break;
      }
    }
    out << "narrative report (" << report.size() << " entries):\n";
    out << gait::format_narrative_report(report);
    std::ostringstream tally;
    tally << match << " match, " << mismatch << " mismatch, " << zero << " zero-but-specified";
    out << "narrative summary: " << (mismatch + zero > 0 ? style.warn(tally.str()) : tally.str())
        << "\n";
    return range_ok ? 0 : 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

/// `table`: print the canonical serialization of a gait table.
inline int run_table(const std::string& path_or_builtin, std::ostream& out, std::ostream& err) {
  try {
    out << gait::serialize_gait_table(detail::load_table(path_or_builtin));
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

/// `replay`: drive the master/slave pipeline from a command script on a
/// simulated clock, log every wire and ack line, then analyze the frames
/// the slave actually applied (the most recent walk) exactly as `walk`
/// does. Script lines: `CMD ...` or `WAIT <ms>`; '#' comments allowed.
inline int run_replay(const std::string& script_path, const Options& opt, std::ostream& out,
                      std::ostream& err) {
  try {
    const auto geom = detail::load_geometry(opt);
    const auto bank = detail::load_servos(opt);
    const auto table = detail::load_table(opt.gait_path);

    const std::string script = detail::read_file(script_path);
    comm::Master master(table, opt.stage_ms);
    comm::Slave slave(bank);

    std::ostringstream wire_log;
    int64_t now_ms = 0;
    int analysis_stage_ms = opt.stage_ms;

    auto advance = [&](int64_t until_ms) {
      while (now_ms < until_ms) {
        now_ms += servo::kFramePeriodMs;
        for (const std::string& line : master.tick(now_ms)) {
          wire_log << line << "\n";
          wire_log << slave.apply_line(line) << "\n";
        }
      }
    };

    std::istringstream lines{script};
    std::string raw;
    int line_no = 0;
    while (std::getline(lines, raw)) {
      ++line_no;
      if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
      std::istringstream split{raw};
      std::vector<std::string> tokens;
      std::string tok;
      while (split >> tok) tokens.push_back(tok);
      if (tokens.empty()) continue;

      if (tokens[0] == "WAIT") {
        if (tokens.size() != 2) {
          throw std::runtime_error("script line " + std::to_string(line_no) +
                                   ": expected 'WAIT <ms>'");
        }
        long long ms = 0;
        const auto [ptr, ec] =
            std::from_chars(tokens[1].data(), tokens[1].data() + tokens[1].size(), ms);
        if (ec != std::errc() || ptr != tokens[1].data() + tokens[1].size() || ms < 0) {
          throw std::runtime_error("script line " + std::to_string(line_no) + ": bad wait '" +
                                   tokens[1] + "'");
        }
        advance(now_ms + ms);
        continue;
      }
      try {
        const comm::Command cmd = comm::parse_command(raw);
        master.handle_command(cmd, now_ms);
        if (std::holds_alternative<comm::Forward>(cmd)) {
          analysis_stage_ms = master.stage_duration_ms();
        }
        // Deliver frames due immediately (e.g. the t=0 frame of a walk).
        for (const std::string& line : master.tick(now_ms)) {
          wire_log << line << "\n";
          wire_log << slave.apply_line(line) << "\n";
        }
      } catch (const std::exception& e) {
        throw std::runtime_error("script line " + std::to_string(line_no) + ": " + e.what());
      }
    }
    while (master.running()) advance(now_ms + servo::kFramePeriodMs);

    if (opt.wire_log_path.empty()) {
      out << wire_log.str();
    } else {
      std::ofstream log(opt.wire_log_path, std::ios::binary);
      if (!log) throw std::runtime_error("cannot write '" + opt.wire_log_path + "'");
      log << wire_log.str();
    }

    // Reconstruct the slave-side trajectory of the most recent walk:
    // frames since the last t=0, with support phases recomputed from the
    // stage schedule.
    const auto& applied = slave.applied_frames();
    size_t begin = 0;
    for (size_t i = applied.size(); i-- > 0;) {
      if (applied[i].t_ms == 0) {
        begin = i;
        break;
      }
    }
    gait::Trajectory slave_traj;
    for (size_t i = begin; i < applied.size(); ++i) {
      slave_traj.frames.push_back(
          {applied[i], gait::support_at(table, analysis_stage_ms, applied[i].t_ms)});
    }

    std::vector<analysis::ReportRow> rows;
    if (!slave_traj.frames.empty()) rows = analysis::analyze(slave_traj, bank, geom);

    const std::string out_path = opt.out_path.empty() ? "replay.csv" : opt.out_path;
    std::ofstream csv(out_path, std::ios::binary);
    if (!csv) throw std::runtime_error("cannot write '" + out_path + "'");
    analysis::write_csv(csv, rows);

    const auto summary = analysis::summarize(rows);
    detail::print_summary(summary, {opt.color}, out);
    out << "acks: " << slave.applied_frames().size() << ", errors: " << slave.error_count()
        << "\n";
    out << "csv: " << out_path << "\n";
    return summary.frames == 0 || summary.unstable == 0 ? 0 : 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace gaitforge::cli
