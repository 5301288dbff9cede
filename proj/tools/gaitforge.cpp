#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <string>

#include <unistd.h>

#include <CLI11.hpp>

#include "gaitforge/cli.hpp"

namespace {

bool color_enabled() {
  if (std::getenv("GAITFORGE_NO_COLOR") != nullptr) return false;
  return ::isatty(::fileno(stdout)) == 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Biped gait pattern simulator and stability analyzer"};
  app.require_subcommand(1);

  gaitforge::cli::Options opt;
  opt.color = color_enabled();
  std::string script_path;

  const auto add_geometry = [&](CLI::App* cmd) {
    cmd->add_option("--geometry", opt.geometry_path, "Geometry config file (default: builtin)");
  };
  const auto add_servos = [&](CLI::App* cmd) {
    cmd->add_option("--servos", opt.servos_path, "Servo config file (default: builtin)");
  };
  const auto add_gait = [&](CLI::App* cmd) {
    cmd->add_option("--gait", opt.gait_path, "Gait table file, or 'builtin'");
  };
  const auto add_stage_ms = [&](CLI::App* cmd) {
    cmd->add_option("--stage-ms", opt.stage_ms, "Per-stage transition duration in ms")
        ->check(CLI::PositiveNumber);
  };

  CLI::App* walk =
      app.add_subcommand("walk", "Generate a walk, analyze every frame, write a CSV report");
  add_geometry(walk);
  add_servos(walk);
  add_gait(walk);
  add_stage_ms(walk);
  walk->add_option("--cycles", opt.cycles, "Number of gait cycles")->check(CLI::PositiveNumber);
  walk->add_option("--out", opt.out_path, "CSV output path (default: walk.csv)");

  CLI::App* validate =
      app.add_subcommand("validate", "Range-check a gait table and report narrative consistency");
  add_servos(validate);
  add_gait(validate);
  validate->add_option("--narrative", opt.narrative_path, "Narrative spec file, or 'builtin'");

  CLI::App* replay =
      app.add_subcommand("replay", "Run a command script through the master/slave pipeline");
  replay->add_option("script", script_path, "Command script (CMD/WAIT lines)")->required();
  add_geometry(replay);
  add_servos(replay);
  add_gait(replay);
  add_stage_ms(replay);
  replay->add_option("--out", opt.out_path, "CSV output path (default: replay.csv)");
  replay->add_option("--wire-log", opt.wire_log_path,
                     "Write wire traffic here instead of stdout");

  CLI::App* table = app.add_subcommand("table", "Print the canonical form of a gait table");
  add_gait(table);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  if (*walk) return gaitforge::cli::run_walk(opt, std::cout, std::cerr);
  if (*validate) return gaitforge::cli::run_validate(opt, std::cout, std::cerr);
  if (*replay) return gaitforge::cli::run_replay(script_path, opt, std::cout, std::cerr);
  if (*table) return gaitforge::cli::run_table(opt.gait_path, std::cout, std::cerr);
  return 1;
}
